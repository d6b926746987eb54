#pragma once

#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "sagp/rng.hpp"

namespace sagp {

// Simulation settings. Defaults for (n, p) by dataset: (100,10), (100,100),
// (100,20), (100,100); callers may override (e.g. the high-dimension runs).
struct SimSpec {
    int dataset_id = 1;  // 1..4
    bool interaction = false;
    int n = 100;
    int p = 10;
    double sigma2 = 0.02;
    std::uint64_t seed = 0;

    static int default_p(int dataset_id) {
        switch (dataset_id) {
            case 1: return 10;
            case 2: return 100;
            case 3: return 20;
            case 4: return 100;
            default: throw std::invalid_argument("dataset_id must be 1..4");
        }
    }
    int min_p() const { return dataset_id <= 2 ? 3 : 5; }
};

struct SimData {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::set<int> truth_vars;                      // 0-based
    std::set<std::pair<int, int>> truth_pairs;     // 0-based, i < j
};

// The noiseless regression function for a dataset family, evaluated at one row.
template <typename Row>
double sim_mean(int dataset_id, bool interaction, const Row& x) {
    const bool five = dataset_id >= 3;
    double f = x[0] + x[1] * x[1] + x[2];
    if (five) f += x[3] * x[3] + x[4];
    if (interaction) {
        f += x[0] * x[1] + x[1] * x[2];
        f += five ? x[2] * x[3] : x[2] * x[0];
    }
    return f;
}

inline SimData generate(const SimSpec& spec) {
    if (spec.dataset_id < 1 || spec.dataset_id > 4)
        throw std::invalid_argument("dataset_id must be 1..4");
    if (spec.p < spec.min_p())
        throw std::invalid_argument("p too small for the chosen mean function");
    if (spec.n < 1 || spec.sigma2 <= 0.0)
        throw std::invalid_argument("need n >= 1 and sigma2 > 0");

    Rng rng(spec.seed);
    SimData out;
    out.X.resize(spec.n, spec.p);
    for (int i = 0; i < spec.n; ++i)
        for (int j = 0; j < spec.p; ++j) out.X(i, j) = rng.uniform();

    out.y.resize(spec.n);
    const bool five = spec.dataset_id >= 3;
    const double sd = std::sqrt(spec.sigma2);
    for (int i = 0; i < spec.n; ++i)
        out.y[i] = sim_mean(spec.dataset_id, spec.interaction, out.X.row(i)) + sd * rng.normal();

    for (int j = 0; j < (five ? 5 : 3); ++j) out.truth_vars.insert(j);
    if (spec.interaction) {
        out.truth_pairs.insert({0, 1});
        out.truth_pairs.insert({1, 2});
        out.truth_pairs.insert(five ? std::make_pair(2, 3) : std::make_pair(0, 2));
    }
    return out;
}

}  // namespace sagp
