#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

#include "sagp/kernel.hpp"
#include "sagp/rng.hpp"

namespace sagp {

/// One additive component: its inverse-bandwidth row, sampled function values
/// at the training points, and the weight/sign learned by the lasso stage.
struct ComponentState {
    Eigen::VectorXd kappa;    // length p, entries >= 0
    Eigen::VectorXd f_train;  // length n
    double weight = 0.0;      // sqrt(phi), >= 0
    double sign = 1.0;        // +-1, orientation absorbed from the lasso fit
};

struct AdditiveModel {
    std::vector<ComponentState> components;
    double sigma2 = 0.0;

    Eigen::Index n() const {
        return components.empty() ? 0 : components.front().f_train.size();
    }
    Eigen::Index p() const {
        return components.empty() ? 0 : components.front().kappa.size();
    }

    /// F at the training points: sum_l sign_l * weight_l * f_l.
    Eigen::VectorXd train_sum() const {
        Eigen::VectorXd F = Eigen::VectorXd::Zero(n());
        for (const auto& c : components) F.noalias() += c.sign * c.weight * c.f_train;
        return F;
    }
};

/// r_l = y - sum_{j != l} sign_j * weight_j * f_j.
inline Eigen::VectorXd partial_residual(const Eigen::VectorXd& y, const AdditiveModel& model,
                                        std::size_t l) {
    if (l >= model.components.size())
        throw std::invalid_argument("partial_residual: component index out of range");
    Eigen::VectorXd r = y - model.train_sum();
    const auto& c = model.components[l];
    r.noalias() += c.sign * c.weight * c.f_train;
    return r;
}

struct PredictiveMoments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

/// mean = K* (K + sigma2 I)^-1 r,  cov = K** - K* (K + sigma2 I)^-1 K*^T,
/// with cov symmetrized as (C + C^T)/2.
inline PredictiveMoments predictive_moments(const Eigen::VectorXd& r, const Eigen::MatrixXd& K,
                                            const Eigen::MatrixXd& K_star,
                                            const Eigen::MatrixXd& K_ss, double sigma2) {
    if (K.rows() != K.cols() || K_star.cols() != K.rows() || r.size() != K.rows() ||
        K_ss.rows() != K_ss.cols() || K_ss.rows() != K_star.rows())
        throw std::invalid_argument("predictive_moments: nonconformable dimensions");
    Eigen::MatrixXd M = K;
    M.diagonal().array() += sigma2;
    JitteredCholesky chol;
    chol.compute(M, "predictive_moments");
    PredictiveMoments out;
    out.mean = K_star * chol.solve(r);
    const Eigen::MatrixXd KsT = K_star.transpose();
    const Eigen::MatrixXd W = chol.solve(KsT);
    Eigen::MatrixXd C = K_ss - K_star * W;
    out.cov = 0.5 * (C + C.transpose());
    return out;
}

/// Predictive mean only (prediction path never needs the covariance).
inline Eigen::VectorXd predictive_mean(const Eigen::VectorXd& r, const Eigen::MatrixXd& K,
                                       const Eigen::MatrixXd& K_star, double sigma2) {
    Eigen::MatrixXd M = K;
    M.diagonal().array() += sigma2;
    JitteredCholesky chol;
    chol.compute(M, "predictive_mean");
    return K_star * chol.solve(r);
}

/// Draw from N(mean, cov) via Cholesky of (cov + jitter I).
/// A zero covariance returns the mean exactly.
inline Eigen::VectorXd sample_component(const PredictiveMoments& moments, Rng& rng) {
    const Eigen::Index m = moments.mean.size();
    if (moments.cov.rows() != m || moments.cov.cols() != m)
        throw std::invalid_argument("sample_component: moment dimensions disagree");
    if (moments.cov.cwiseAbs().maxCoeff() == 0.0) return moments.mean;
    JitteredCholesky chol;
    chol.compute(moments.cov, "sample_component covariance");
    Eigen::VectorXd z(m);
    for (Eigen::Index i = 0; i < m; ++i) z[i] = rng.normal();
    return moments.mean + chol.llt().matrixL() * z;
}

}  // namespace sagp
