#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "sagp/rng.hpp"

namespace sagp {

// Standardized design over the k component columns. Near-constant columns are
// excluded (zero column, unit scale) so they can never enter the path.
struct ComponentDesign {
    Eigen::MatrixXd Zs;              // n x k, standardized (excluded cols zeroed)
    Eigen::VectorXd mean, scale;     // per column
    std::vector<bool> included;

    static ComponentDesign build(const Eigen::MatrixXd& Z) {
        const int n = int(Z.rows()), k = int(Z.cols());
        ComponentDesign d;
        d.Zs.resize(n, k);
        d.mean.resize(k);
        d.scale.resize(k);
        d.included.assign(k, false);
        for (int j = 0; j < k; ++j) {
            const double mu = Z.col(j).mean();
            const double sd = std::sqrt((Z.col(j).array() - mu).square().mean());
            d.mean[j] = mu;
            if (sd > 1e-12) {
                d.scale[j] = sd;
                d.Zs.col(j) = (Z.col(j).array() - mu) / sd;
                d.included[j] = true;
            } else {
                d.scale[j] = 1.0;
                d.Zs.col(j).setZero();
            }
        }
        return d;
    }
};

struct PathPoint {
    double lambda;
    Eigen::VectorXd beta;
};

namespace detail {

// Solve G x = b for the active-set systems; G is PSD but may be rank-deficient
// when columns duplicate, so escalate a tiny ridge until the solve is clean.
inline Eigen::VectorXd solve_psd(const Eigen::MatrixXd& G, const Eigen::VectorXd& b) {
    double ridge = 0.0;
    for (int attempt = 0; attempt < 6; ++attempt) {
        Eigen::MatrixXd Gr = G;
        if (ridge > 0.0) Gr.diagonal().array() += ridge;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(Gr);
        if (ldlt.info() == Eigen::Success) {
            Eigen::VectorXd x = ldlt.solve(b);
            if (x.allFinite() && (Gr * x - b).cwiseAbs().maxCoeff() <= 1e-8 * (1.0 + b.cwiseAbs().maxCoeff()))
                return x;
        }
        ridge = (ridge == 0.0) ? 1e-12 : ridge * 100.0;
    }
    Eigen::MatrixXd Gr = G;
    Gr.diagonal().array() += 1e-8;
    return Gr.ldlt().solve(b);
}

}  // namespace detail

// Full piecewise-linear lasso path for (1/2n)||y - Z beta||^2 + lambda ||beta||_1,
// recorded at breakpoints from lambda_max down to 0. Coefficients between
// breakpoints are linear in lambda.
inline std::vector<PathPoint> lars_path(const Eigen::MatrixXd& Zs, const Eigen::VectorXd& y) {
    const int n = int(Zs.rows()), k = int(Zs.cols());
    const Eigen::VectorXd cy = Zs.transpose() * y / double(n);

    std::vector<PathPoint> path;
    int j0 = 0;
    double lambda_max = 0.0;
    for (int j = 0; j < k; ++j)
        if (std::abs(cy[j]) > lambda_max) { lambda_max = std::abs(cy[j]); j0 = j; }

    path.push_back({lambda_max, Eigen::VectorXd::Zero(k)});
    if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) {
        if (path.back().lambda != 0.0) path.push_back({0.0, Eigen::VectorXd::Zero(k)});
        return path;
    }

    std::vector<int> A{j0};
    std::vector<double> sA{cy[j0] >= 0.0 ? 1.0 : -1.0};
    double lam = lambda_max;
    const int max_events = 20 * k + 100;

    for (int event = 0; event < max_events && lam > 0.0; ++event) {
        const int a = int(A.size());
        Eigen::MatrixXd ZA(n, a);
        Eigen::VectorXd sv(a);
        for (int i = 0; i < a; ++i) { ZA.col(i) = Zs.col(A[i]); sv[i] = sA[i]; }
        const Eigen::MatrixXd G = ZA.transpose() * ZA / double(n);
        const Eigen::VectorXd c0 = detail::solve_psd(G, ZA.transpose() * y / double(n));
        const Eigen::VectorXd w = detail::solve_psd(G, sv);

        // beta_A(lambda) = c0 - lambda * w on this segment
        const double guard = lam - 1e-14 * std::max(1.0, lam);
        double lam_next = 0.0;
        int enter = -1, drop = -1;
        double enter_sign = 1.0;

        std::vector<char> inA(k, 0);
        for (int i : A) inA[i] = 1;
        const Eigen::VectorXd ZAc0 = ZA * c0, ZAw = ZA * w;
        for (int j = 0; j < k; ++j) {
            if (inA[j]) continue;
            const double aj = (Zs.col(j).dot(y) - Zs.col(j).dot(ZAc0)) / double(n);
            const double gj = Zs.col(j).dot(ZAw) / double(n);
            // c_j(lambda) = aj + lambda*gj meets +lambda or -lambda
            const double cand_p = (1.0 - gj != 0.0) ? aj / (1.0 - gj) : -1.0;
            const double cand_m = (-1.0 - gj != 0.0) ? aj / (-1.0 - gj) : -1.0;
            if (cand_p > lam_next && cand_p < guard) { lam_next = cand_p; enter = j; enter_sign = 1.0; drop = -1; }
            if (cand_m > lam_next && cand_m < guard) { lam_next = cand_m; enter = j; enter_sign = -1.0; drop = -1; }
        }
        for (int i = 0; i < a; ++i) {
            if (w[i] == 0.0) continue;
            const double cand = c0[i] / w[i];
            if (cand > lam_next && cand < guard) { lam_next = cand; drop = i; enter = -1; }
        }

        Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
        const Eigen::VectorXd bA = c0 - lam_next * w;
        for (int i = 0; i < a; ++i) beta[A[i]] = bA[i];
        if (drop >= 0) beta[A[drop]] = 0.0;
        path.push_back({lam_next, beta});
        lam = lam_next;

        if (enter >= 0) {
            A.push_back(enter);
            sA.push_back(enter_sign);
        } else if (drop >= 0) {
            A.erase(A.begin() + drop);
            sA.erase(sA.begin() + drop);
            if (A.empty()) break;
        } else {
            break;  // reached lambda = 0
        }
    }
    if (path.back().lambda != 0.0) {
        // terminate the final segment at zero
        const int a = int(A.size());
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
        if (a > 0) {
            Eigen::MatrixXd ZA(n, a);
            for (int i = 0; i < a; ++i) ZA.col(i) = Zs.col(A[i]);
            const Eigen::VectorXd c0 =
                detail::solve_psd(ZA.transpose() * ZA / double(n), ZA.transpose() * y / double(n));
            for (int i = 0; i < a; ++i) beta[A[i]] = c0[i];
        }
        path.push_back({0.0, beta});
    }
    return path;
}

// Exact coefficients at an arbitrary lambda by linear interpolation between breakpoints.
inline Eigen::VectorXd coef_at(const std::vector<PathPoint>& path, double lambda) {
    const int k = int(path.front().beta.size());
    if (lambda >= path.front().lambda) return Eigen::VectorXd::Zero(k);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const double hi = path[i].lambda, lo = path[i + 1].lambda;
        if (lambda <= hi && lambda >= lo) {
            if (hi == lo) return path[i + 1].beta;
            const double t = (hi - lambda) / (hi - lo);
            return path[i].beta + t * (path[i + 1].beta - path[i].beta);
        }
    }
    return path.back().beta;
}

// 5-fold CV over a 100-point log grid [1e-4*lambda_max, lambda_max]:
// seeded shuffle, contiguous fold blocks, mean held-out squared error.
inline double cv_select(const ComponentDesign& design, const Eigen::VectorXd& y, Rng& rng,
                        int folds = 5) {
    const int n = int(y.size()), k = int(design.Zs.cols());
    const double lambda_max = (design.Zs.transpose() * y).cwiseAbs().maxCoeff() / double(n);
    if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) return 0.0;

    constexpr int grid_size = 100;
    std::vector<double> grid(grid_size);
    for (int i = 0; i < grid_size; ++i)
        grid[i] = lambda_max * std::pow(1e-4, double(i) / double(grid_size - 1));

    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = n - 1; i > 0; --i)
        std::swap(idx[i], idx[std::uint64_t(rng.below(std::uint64_t(i) + 1))]);

    std::vector<double> err(grid_size, 0.0);
    for (int b = 0; b < folds; ++b) {
        const int lo = (b * n) / folds, hi = ((b + 1) * n) / folds;
        const int n_test = hi - lo, n_train = n - n_test;
        if (n_test == 0 || n_train == 0) continue;
        Eigen::MatrixXd Ztr(n_train, k), Zte(n_test, k);
        Eigen::VectorXd ytr(n_train), yte(n_test);
        int r = 0;
        for (int i = 0; i < n; ++i) {
            if (i >= lo && i < hi) continue;
            Ztr.row(r) = design.Zs.row(idx[i]);
            ytr[r++] = y[idx[i]];
        }
        for (int i = lo; i < hi; ++i) {
            Zte.row(i - lo) = design.Zs.row(idx[i]);
            yte[i - lo] = y[idx[i]];
        }
        const auto path = lars_path(Ztr, ytr);
        for (int g = 0; g < grid_size; ++g) {
            const Eigen::VectorXd pred = Zte * coef_at(path, grid[g]);
            err[g] += (yte - pred).squaredNorm() / double(n_test);
        }
    }
    int best = 0;
    for (int g = 1; g < grid_size; ++g)
        if (err[g] < err[best]) best = g;
    return grid[best];
}

struct WeightVector {
    Eigen::VectorXd weights;  // sqrt(phi_l), nonnegative, raw scale
    Eigen::VectorXd signs;    // +-1
    double lambda_selected = 0.0;
};

// Lasso fit at a fixed lambda; coefficients mapped back from the standardized
// to the raw column scale, with signs absorbed into the component orientation.
inline WeightVector update_weights(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                                   double lambda) {
    const auto design = ComponentDesign::build(Z);
    const auto path = lars_path(design.Zs, y);
    const Eigen::VectorXd beta = coef_at(path, lambda);
    const int k = int(Z.cols());
    WeightVector wv;
    wv.weights.resize(k);
    wv.signs.resize(k);
    wv.lambda_selected = lambda;
    for (int j = 0; j < k; ++j) {
        const double raw = design.included[j] ? beta[j] / design.scale[j] : 0.0;
        wv.weights[j] = std::abs(raw);
        wv.signs[j] = raw < 0.0 ? -1.0 : 1.0;
    }
    return wv;
}

}  // namespace sagp
