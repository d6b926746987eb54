#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "sagp/gp.hpp"
#include "sagp/kernel.hpp"
#include "sagp/rng.hpp"

namespace sagp {

// Half-normal density for kappa: N(0, psi*tau) folded onto [0, inf).
inline double log_prior_kappa(double kappa, double psi, double tau) {
    if (psi <= 0.0 || tau <= 0.0)
        throw std::invalid_argument("log_prior_kappa: scales must be positive");
    const double v = psi * tau;
    return std::log(2.0) - 0.5 * std::log(2.0 * M_PI * v) - kappa * kappa / (2.0 * v);
}

// Density of s when sqrt(s) is standard half-Cauchy: (1/pi) s^{-1/2} / (1+s).
inline double log_prior_scale(double s) {
    if (s <= 0.0) throw std::invalid_argument("log_prior_scale: s must be positive");
    return -std::log(M_PI) - 0.5 * std::log(s) - std::log1p(s);
}

// Per-parameter random-walk step on the log scale with windowed adaptation.
struct ProposalTuner {
    double log_step = 1.0;
    int accept_count = 0;
    int propose_count = 0;

    void record(bool accepted) {
        ++propose_count;
        if (accepted) ++accept_count;
    }
    double window_rate() const {
        return propose_count > 0 ? double(accept_count) / propose_count : 0.0;
    }
    // Burn-in only, every 50 sweeps: nudge toward the 20-40% band.
    void adapt() {
        const double r = window_rate();
        if (r > 0.4) log_step *= 1.1;
        else if (r < 0.2) log_step *= 0.9;
        accept_count = 0;
        propose_count = 0;
    }
};

// One log-normal random-walk MH step against an arbitrary log-target over (0, inf).
// The +log(value) terms are the Jacobian of the log transform. Returns acceptance.
template <typename LogTarget>
bool mh_log_normal_step(double& value, LogTarget&& log_target, ProposalTuner& tuner, Rng& rng) {
    const double lv = std::log(value);
    const double lv_star = lv + tuner.log_step * rng.normal();
    const double v_star = std::exp(lv_star);
    bool accepted = false;
    if (v_star > 0.0 && std::isfinite(v_star)) {
        const double la =
            (log_target(v_star) + lv_star) - (log_target(value) + lv);
        if (std::isfinite(la) && std::log(rng.uniform_pos()) < la) {
            value = v_star;
            accepted = true;
        }
    }
    tuner.record(accepted);
    return accepted;
}

// MH update of one inverse-bandwidth kappa_{lj}. `kc` holds the component's current
// exponent cache; `scratch` is reused for proposals. On accept the caches swap, so
// `kc` always matches comp.kappa. A Cholesky failure rejects the proposal.
inline bool mh_update_kappa(ComponentState& comp, int j,
                            const Eigen::VectorXd& r, double sigma2,
                            double psi_lj, double tau_l,
                            const DistanceCache& dcache,
                            KernelCache& kc, KernelCache& scratch,
                            double& cur_log_marginal,
                            ProposalTuner& tuner, Rng& rng,
                            int* incident_count = nullptr) {
    const double k_cur = comp.kappa[j];
    const double lk = std::log(k_cur);
    const double lk_star = lk + tuner.log_step * rng.normal();
    const double k_star = std::exp(lk_star);
    bool accepted = false;
    if (k_star > 0.0 && std::isfinite(k_star)) {
        scratch.shift_from(kc, dcache, j, k_star - k_cur);
        double lm_star;
        bool ok = true;
        try {
            lm_star = log_marginal(r, scratch.K(), sigma2, "kappa proposal");
        } catch (const NumericalError&) {
            ok = false;
            if (incident_count) ++(*incident_count);
        }
        if (ok) {
            const double la =
                (lm_star + log_prior_kappa(k_star, psi_lj, tau_l) + lk_star) -
                (cur_log_marginal + log_prior_kappa(k_cur, psi_lj, tau_l) + lk);
            if (std::isfinite(la) && std::log(rng.uniform_pos()) < la) {
                comp.kappa[j] = k_star;
                kc.swap(scratch);
                cur_log_marginal = lm_star;
                accepted = true;
            }
        }
    }
    tuner.record(accepted);
    return accepted;
}

// MH update of one local scale psi_{lj}; the likelihood depends on kappa only,
// so the target is the kappa prior term plus the scale prior.
inline bool mh_update_psi(double kappa_lj, double& psi_lj, double tau_l,
                          ProposalTuner& tuner, Rng& rng) {
    return mh_log_normal_step(
        psi_lj,
        [&](double s) { return log_prior_kappa(kappa_lj, s, tau_l) + log_prior_scale(s); },
        tuner, rng);
}

// MH update of the component-wide global scale tau_l (sums over all dimensions).
inline bool mh_update_tau(const Eigen::VectorXd& kappa_row, const Eigen::VectorXd& psi_row,
                          double& tau_l, ProposalTuner& tuner, Rng& rng) {
    return mh_log_normal_step(
        tau_l,
        [&](double t) {
            double s = log_prior_scale(t);
            for (int j = 0; j < kappa_row.size(); ++j)
                s += log_prior_kappa(kappa_row[j], psi_row[j], t);
            return s;
        },
        tuner, rng);
}

}  // namespace sagp
