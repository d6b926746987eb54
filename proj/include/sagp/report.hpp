#pragma once

#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sagp/selection.hpp"
#include "sagp/trace.hpp"

namespace sagp {

struct ReportResult {
    std::vector<std::set<int>> per_component;  // selected variables per component
    std::set<int> active_functions;            // A_f from the weight trace
    std::vector<double> inclusion;             // per variable
    Eigen::MatrixXd interaction;               // p x p
    std::set<int> selected_variables;          // inclusion > threshold
    bool af_empty_warning = false;
};

// Post-hoc selection over retained iterations: per-component signal sets from
// the kappa traces, active functions from the weight trace, then inclusion and
// interaction probabilities.
inline ReportResult build_report(const std::vector<TraceIteration>& iterations, int burn_in,
                                 double inclusion_threshold = 0.1,
                                 Ranking ranking = Ranking::median) {
    if (iterations.empty()) throw std::invalid_argument("report: empty trace");
    const int total = int(iterations.size());
    if (burn_in >= total) throw std::invalid_argument("report: burn_in >= iterations");
    const int T = total - burn_in;
    const int k = int(iterations.front().kappa.rows());
    const int p = int(iterations.front().kappa.cols());

    ReportResult res;
    Eigen::MatrixXd trace(T, p);
    for (int l = 0; l < k; ++l) {
        for (int t = 0; t < T; ++t)
            trace.row(t) = iterations[std::size_t(burn_in + t)].kappa.row(l);
        res.per_component.push_back(select_signals(trace, ranking).selected);
    }

    Eigen::MatrixXd wtrace(T, k);
    for (int t = 0; t < T; ++t)
        wtrace.row(t) = iterations[std::size_t(burn_in + t)].weight.transpose();
    res.active_functions = select_signals(wtrace, ranking).selected;
    res.af_empty_warning = res.active_functions.empty();

    res.inclusion = inclusion_probabilities(res.per_component, p);
    res.interaction = interaction_probabilities(res.per_component, res.active_functions, p);
    for (int j = 0; j < p; ++j)
        if (res.inclusion[std::size_t(j)] > inclusion_threshold) res.selected_variables.insert(j);
    return res;
}

}  // namespace sagp
