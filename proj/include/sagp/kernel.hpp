#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace sagp {

/// Thrown when a factorization cannot be rescued by jitter escalation.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// ARD squared-exponential kernel: exp(-sum_j kappa_j (x_j - x'_j)^2).
inline double ard_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& x2,
                         const Eigen::VectorXd& kappa) {
    if (x.size() != x2.size() || x.size() != kappa.size())
        throw std::invalid_argument("ard_kernel: dimension mismatch");
    const double s = (kappa.array() * (x - x2).array().square()).sum();
    return std::exp(-s);
}

/// Cross-kernel matrix: out(i, i') = ard_kernel(A.row(i), B.row(i'), kappa).
inline Eigen::MatrixXd ard_kernel(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                  const Eigen::VectorXd& kappa) {
    if (A.cols() != B.cols() || A.cols() != kappa.size())
        throw std::invalid_argument("ard_kernel: dimension mismatch");
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(A.rows(), B.rows());
    for (Eigen::Index j = 0; j < kappa.size(); ++j) {
        if (kappa[j] == 0.0) continue;
        const Eigen::MatrixXd d =
            A.col(j).replicate(1, B.rows()) - B.col(j).transpose().replicate(A.rows(), 1);
        S.noalias() += kappa[j] * d.array().square().matrix();
    }
    return (-S.array()).exp();
}

/// Symmetric kernel matrix over one point set.
inline Eigen::MatrixXd ard_kernel(const Eigen::MatrixXd& X, const Eigen::VectorXd& kappa) {
    return ard_kernel(X, X, kappa);
}

/// Per-dimension squared-distance matrices D_j[i][i'] = (X(i,j) - X(i',j))^2.
/// Caching these makes a single-coordinate kappa change an O(n^2) kernel update.
class DistanceCache {
public:
    DistanceCache() = default;

    explicit DistanceCache(const Eigen::MatrixXd& X) : n_(X.rows()), p_(X.cols()) {
        dims_.reserve(p_);
        for (Eigen::Index j = 0; j < p_; ++j) {
            const auto col = X.col(j);
            Eigen::MatrixXd d = col.replicate(1, n_) - col.transpose().replicate(n_, 1);
            dims_.push_back(d.array().square().matrix());
        }
    }

    Eigen::Index n() const { return n_; }
    Eigen::Index p() const { return p_; }
    const Eigen::MatrixXd& dim(Eigen::Index j) const { return dims_[j]; }

private:
    Eigen::Index n_ = 0, p_ = 0;
    std::vector<Eigen::MatrixXd> dims_;
};

struct KernelMatrix {
    Eigen::MatrixXd K;
    double jitter = 0.0;  // set by factorization, diagnostic only
};

/// Exponent-sum cache for one component: S = sum_j kappa_j D_j and K = exp(-S).
/// shift_from() rebuilds only the single changed coordinate's contribution.
class KernelCache {
public:
    void rebuild(const DistanceCache& cache, const Eigen::VectorXd& kappa) {
        if (kappa.size() != cache.p())
            throw std::invalid_argument("KernelCache: scales length != cache dimension");
        S_.setZero(cache.n(), cache.n());
        for (Eigen::Index j = 0; j < cache.p(); ++j)
            if (kappa[j] != 0.0) S_.noalias() += kappa[j] * cache.dim(j);
        K_ = (-S_.array()).exp();
    }

    /// this <- other with kappa_j shifted by dk (other stays untouched).
    void shift_from(const KernelCache& other, const DistanceCache& cache, Eigen::Index j,
                    double dk) {
        S_ = other.S_ + dk * cache.dim(j);
        K_ = (-S_.array()).exp();
    }

    void swap(KernelCache& other) {
        S_.swap(other.S_);
        K_.swap(other.K_);
    }

    const Eigen::MatrixXd& exponent() const { return S_; }
    const Eigen::MatrixXd& K() const { return K_; }

private:
    Eigen::MatrixXd S_;
    Eigen::MatrixXd K_;
};

inline KernelMatrix kernel_matrix(const DistanceCache& cache, const Eigen::VectorXd& kappa) {
    KernelCache ws;
    ws.rebuild(cache, kappa);
    return KernelMatrix{ws.K(), 0.0};
}

/// Cholesky of a symmetric matrix. The first attempt is exact (no jitter) so
/// well-conditioned solves stay bit-faithful to dense algebra; only on
/// factorization failure does diagonal jitter engage, starting at
/// 1e-10 * mean(diag) and escalating x10 up to 1e-4 * mean(diag).
class JitteredCholesky {
public:
    /// Factorizes M + jitter*I. Throws NumericalError when escalation runs out.
    void compute(const Eigen::MatrixXd& M, const std::string& context) {
        const double mean_diag = M.diagonal().mean();
        const double jit_max = 1e-4 * mean_diag;
        double jit = 0.0;
        escalations_ = 0;
        while (true) {
            work_ = M;
            work_.diagonal().array() += jit;
            llt_.compute(work_);
            if (llt_.info() == Eigen::Success) {
                jitter_ = jit;
                return;
            }
            const double next = jit == 0.0 ? 1e-10 * mean_diag : jit * 10.0;
            if (!(next > jit) || jit >= jit_max) break;
            jit = next;
            ++escalations_;
        }
        throw NumericalError("Cholesky failed after jitter escalation: " + context);
    }

    const Eigen::LLT<Eigen::MatrixXd>& llt() const { return llt_; }
    double jitter() const { return jitter_; }
    int escalations() const { return escalations_; }

    double log_det() const {
        return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return llt_.solve(b); }
    Eigen::MatrixXd solve(const Eigen::MatrixXd& B) const { return llt_.solve(B); }

private:
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::MatrixXd work_;
    double jitter_ = 0.0;
    int escalations_ = 0;
};

/// log N(r; 0, K + sigma2*I) without the -(n/2) log 2pi constant.
/// Only ratios and relative comparisons ever consume this value.
inline double log_marginal(const Eigen::VectorXd& r, const Eigen::MatrixXd& K, double sigma2,
                           const std::string& context = "log_marginal") {
    Eigen::MatrixXd M = K;
    M.diagonal().array() += sigma2;
    JitteredCholesky chol;
    chol.compute(M, context);
    const Eigen::VectorXd alpha = chol.solve(r);
    return -0.5 * r.dot(alpha) - 0.5 * chol.log_det();
}

}  // namespace sagp
