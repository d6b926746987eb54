#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "sagp/rng.hpp"
#include "sagp/selection.hpp"

using namespace sagp;

TEST_CASE("two_means_1d on pinned examples") {
    REQUIRE(two_means_1d({0.01, 0.02, 0.03, 5.0, 4.8}).h == 2);
    REQUIRE(two_means_1d({1.0, 1.0, 1.0, 1.0}).h == 0);  // no spread
    REQUIRE(two_means_1d({0.0, 10.0}).h == 1);
    REQUIRE(two_means_1d({3.0}).h == 0);
    REQUIRE(two_means_1d({}).h == 0);
}

TEST_CASE("two_means_1d matches exhaustive bipartition search") {
    Rng rng(71);
    for (int inst = 0; inst < 500; ++inst) {
        const int m = 2 + int(rng.below(11));  // 2..12
        std::vector<double> v(m);
        const bool clustered = inst % 2 == 0;
        for (int i = 0; i < m; ++i) {
            if (clustered)
                v[i] = (rng.uniform() < 0.4 ? 4.0 : 0.05) + 0.1 * rng.normal();
            else
                v[i] = rng.uniform() * 10.0;
        }
        const int got = two_means_1d(v).h;
        const int want = oracle::exhaustive_two_means_h(v);
        INFO("instance " << inst << " m=" << m);
        REQUIRE(got == want);
    }
}

TEST_CASE("select_signals recovers a planted signal count") {
    Rng rng(72);
    const int iters = 40, p = 10, H = 3;
    Eigen::MatrixXd trace(iters, p);
    for (int t = 0; t < iters; ++t)
        for (int j = 0; j < p; ++j)
            trace(t, j) = (j < H ? 5.0 + 0.1 * rng.normal() : 0.01 + 0.005 * rng.normal());

    const auto res = select_signals(trace);
    REQUIRE(res.H == H);
    REQUIRE(res.selected == std::set<int>{0, 1, 2});
    REQUIRE(int(res.h_per_iteration.size()) == iters);
    for (int h : res.h_per_iteration) REQUIRE(h == H);
}

TEST_CASE("select_signals is invariant to column permutation and positive scaling") {
    Rng rng(73);
    const int iters = 30, p = 6;
    Eigen::MatrixXd trace(iters, p);
    for (int t = 0; t < iters; ++t)
        for (int j = 0; j < p; ++j)
            trace(t, j) = (j == 1 || j == 4 ? 3.0 + 0.1 * rng.normal() : 0.02 * rng.uniform());

    const auto base = select_signals(trace);
    REQUIRE(base.H == 2);
    REQUIRE(base.selected == std::set<int>{1, 4});

    const auto scaled = select_signals((trace.array() * 3.7).matrix());
    REQUIRE(scaled.H == base.H);
    REQUIRE(scaled.selected == base.selected);

    // swap columns 0 and 4
    Eigen::MatrixXd perm = trace;
    perm.col(0).swap(perm.col(4));
    const auto p2 = select_signals(perm);
    REQUIRE(p2.H == 2);
    REQUIRE(p2.selected == std::set<int>{0, 1});
}

TEST_CASE("select_signals with no spread selects nothing") {
    Eigen::MatrixXd trace = Eigen::MatrixXd::Constant(20, 5, 0.3);
    const auto res = select_signals(trace);
    REQUIRE(res.H == 0);
    REQUIRE(res.selected.empty());
}

TEST_CASE("inclusion probabilities count per-component votes") {
    // 2 of 5 components select variable 0; one selects variable 3 twice over
    std::vector<std::set<int>> per_component{{0}, {0, 3}, {}, {3}, {}};
    const auto incl = inclusion_probabilities(per_component, 4);
    REQUIRE(incl[0] == Catch::Approx(0.4));
    REQUIRE(incl[1] == 0.0);
    REQUIRE(incl[2] == 0.0);
    REQUIRE(incl[3] == Catch::Approx(0.4));

    const auto all = inclusion_probabilities({{2}, {2}, {2}}, 3);
    REQUIRE(all[2] == 1.0);
}

TEST_CASE("interaction probabilities over active functions") {
    // components 1 and 2 active; variables 0 and 1 co-selected only in component 1
    std::vector<std::set<int>> per_component{{9}, {0, 1}, {0}};
    const auto inter = interaction_probabilities(per_component, {1, 2}, 10);
    REQUIRE(inter.rows() == 10);
    REQUIRE(inter(0, 1) == Catch::Approx(0.5));
    REQUIRE(inter(1, 0) == Catch::Approx(0.5));
    REQUIRE(inter(0, 9) == 0.0);   // 9 selected only by an inactive component
    REQUIRE(inter(3, 4) == 0.0);
    for (int i = 0; i < 10; ++i) REQUIRE(inter(i, i) == 1.0);
    REQUIRE((inter - inter.transpose()).cwiseAbs().maxCoeff() == 0.0);

    const auto empty = interaction_probabilities(per_component, {}, 10);
    REQUIRE(empty.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fpr and fnr from selected vs truth") {
    const auto r = fpr_fnr({1, 2, 4}, {1, 2, 3}, 10);
    REQUIRE_FALSE(r.truth_empty);
    REQUIRE(r.fpr == Catch::Approx(1.0 / 7.0));
    REQUIRE(r.fnr == Catch::Approx(1.0 / 3.0));

    const auto perfect = fpr_fnr({1, 2, 3}, {1, 2, 3}, 10);
    REQUIRE(perfect.fpr == 0.0);
    REQUIRE(perfect.fnr == 0.0);

    const auto none = fpr_fnr({}, {1, 2, 3}, 10);
    REQUIRE(none.fpr == 0.0);
    REQUIRE(none.fnr == 1.0);

    const auto empty_truth = fpr_fnr({1}, {}, 10);
    REQUIRE(empty_truth.truth_empty);
}
