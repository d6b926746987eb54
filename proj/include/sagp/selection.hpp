#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include <Eigen/Dense>

namespace sagp {

struct TwoMeansResult {
    int h = 0;        // size of the smaller cluster (0 when separation is degenerate)
    int split = 0;    // size of the low-centroid cluster in sorted order
};

// Exact 1-D 2-means: scan all m-1 split points of the sorted values and minimize
// within-cluster sum of squares via prefix sums. Values are magnitudes (>= 0).
inline TwoMeansResult two_means_1d(const std::vector<double>& values) {
    const int m = int(values.size());
    if (m < 2) return {0, 0};
    std::vector<double> v(values);
    std::sort(v.begin(), v.end());

    std::vector<double> pre(m + 1, 0.0), pre2(m + 1, 0.0);
    for (int i = 0; i < m; ++i) {
        pre[i + 1] = pre[i] + v[i];
        pre2[i + 1] = pre2[i] + v[i] * v[i];
    }
    int best_s = 1;
    double best_w = std::numeric_limits<double>::infinity();
    for (int s = 1; s < m; ++s) {
        const double wl = pre2[s] - pre[s] * pre[s] / s;
        const double wr = (pre2[m] - pre2[s]) - (pre[m] - pre[s]) * (pre[m] - pre[s]) / (m - s);
        const double w = wl + wr;
        if (w < best_w) { best_w = w; best_s = s; }
    }
    const double c_lo = pre[best_s] / best_s;
    const double c_hi = (pre[m] - pre[best_s]) / (m - best_s);
    if (std::abs(c_hi - c_lo) < 1e-8 * (v[m - 1] + 1e-12)) return {0, best_s};
    return {std::min(best_s, m - best_s), best_s};
}

struct SelectionResult {
    int H = 0;
    std::set<int> selected;
    std::vector<int> h_per_iteration;
};

// Ranking statistic for the final coordinate ordering. The source material
// names both; the median is the default, the mean kept as a config knob.
enum class Ranking { median, mean };

// Post-hoc signal detection over a trace (rows = retained iterations, columns =
// parameter magnitudes): per-iteration 2-means cluster sizes, mode H (ties favor
// the smaller, sparser count), then the H largest column-wise medians.
inline SelectionResult select_signals(const Eigen::MatrixXd& trace,
                                      Ranking ranking = Ranking::median) {
    const int T = int(trace.rows()), p = int(trace.cols());
    SelectionResult res;
    res.h_per_iteration.reserve(T);
    std::map<int, int> counts;
    std::vector<double> row(p);
    for (int t = 0; t < T; ++t) {
        for (int j = 0; j < p; ++j) row[j] = std::abs(trace(t, j));
        const int h = two_means_1d(row).h;
        res.h_per_iteration.push_back(h);
        ++counts[h];
    }
    int H = 0, best_count = -1;
    for (const auto& [h, c] : counts)
        if (c > best_count) { best_count = c; H = h; }  // map order => smaller h wins ties
    res.H = H;
    if (H == 0) return res;

    std::vector<double> med(p);
    std::vector<double> col(T);
    for (int j = 0; j < p; ++j) {
        for (int t = 0; t < T; ++t) col[t] = std::abs(trace(t, j));
        if (ranking == Ranking::mean) {
            med[j] = std::accumulate(col.begin(), col.end(), 0.0) / T;
        } else {
            std::sort(col.begin(), col.end());
            med[j] = (T % 2 == 1) ? col[T / 2] : 0.5 * (col[T / 2 - 1] + col[T / 2]);
        }
    }
    std::vector<int> order(p);
    for (int j = 0; j < p; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return med[a] > med[b]; });  // value ties -> lower index
    for (int i = 0; i < std::min(H, p); ++i) res.selected.insert(order[i]);
    return res;
}

// Fraction of the k components whose selected variable set contains each variable.
inline std::vector<double> inclusion_probabilities(const std::vector<std::set<int>>& per_component,
                                                   int p) {
    const int k = int(per_component.size());
    std::vector<double> incl(p, 0.0);
    for (const auto& s : per_component)
        for (int j : s)
            if (j >= 0 && j < p) incl[j] += 1.0;
    for (auto& v : incl) v /= double(k);
    return incl;
}

// Pairwise co-selection fraction within the active components A_f. Diagonal is
// reported as 1. Empty A_f yields an all-zero matrix (caller warns).
inline Eigen::MatrixXd interaction_probabilities(const std::vector<std::set<int>>& per_component,
                                                 const std::set<int>& active_functions, int p) {
    Eigen::MatrixXd inter = Eigen::MatrixXd::Zero(p, p);
    if (active_functions.empty()) return inter;
    for (int l : active_functions) {
        const auto& s = per_component.at(std::size_t(l));
        for (int i : s)
            for (int j : s)
                if (i != j) inter(i, j) += 1.0;
    }
    inter /= double(active_functions.size());
    inter.diagonal().setOnes();
    return inter;
}

struct FprFnr {
    double fpr = 0.0;
    double fnr = 0.0;
    bool truth_empty = false;
};

inline FprFnr fpr_fnr(const std::set<int>& selected, const std::set<int>& truth, int p) {
    FprFnr out;
    int false_pos = 0;
    for (int j : selected)
        if (!truth.count(j)) ++false_pos;
    int missed = 0;
    for (int j : truth)
        if (!selected.count(j)) ++missed;
    const int noise = p - int(truth.size());
    out.fpr = noise > 0 ? double(false_pos) / noise : 0.0;
    if (truth.empty()) {
        out.truth_empty = true;
        out.fnr = 0.0;
    } else {
        out.fnr = double(missed) / double(truth.size());
    }
    return out;
}

}  // namespace sagp
