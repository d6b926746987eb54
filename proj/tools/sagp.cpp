// sagp: simulate | fit | report | predict
//
// Exit codes: 0 success, 2 argument/config error, 1 runtime or numerical error.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sagp/dataset.hpp"
#include "sagp/report.hpp"
#include "sagp/sampler.hpp"
#include "sagp/simulate.hpp"
#include "sagp/svg.hpp"
#include "sagp/trace.hpp"

namespace {

struct SimulateArgs {
    int dataset = 0;
    bool interaction = false;
    int n = -1, p = -1;
    double sigma2 = 0.02;
    std::uint64_t seed = 0;
    std::string out;
};

struct FitArgs {
    std::string data;
    std::string run_dir;
    std::string response = "y";
    int k = 10;
    int iterations = 5000;
    int burn_in = 2000;
    double sigma2 = 0.02;
    std::string sigma2_mode = "fixed";
    int cv_every = 25;
    std::uint64_t seed = 0;
    int threads = 1;
    double inclusion_threshold = 0.1;
    double interaction_threshold = 0.5;
    std::string ranking = "median";
    double split = -1.0;  // fraction held out; negative = no split
};

struct ReportArgs {
    std::string trace_dir;
    std::string data;
    std::string response = "y";
    std::string truth;
    std::string out_dir;
    double inclusion_threshold = -1.0;    // negative = take from the run manifest
    double interaction_threshold = -1.0;
    std::string ranking;
};

struct PredictArgs {
    std::string trace_dir;
    std::string train;
    std::string new_data;
    std::string out = "predictions.csv";
    std::string response = "y";
};

int run_simulate(const SimulateArgs& a) {
    sagp::SimSpec spec;
    spec.dataset_id = a.dataset;
    spec.interaction = a.interaction;
    spec.p = a.p > 0 ? a.p : sagp::SimSpec::default_p(a.dataset);
    spec.n = a.n > 0 ? a.n : 100;
    spec.sigma2 = a.sigma2;
    spec.seed = a.seed;

    const sagp::SimData sim = sagp::generate(spec);
    std::string prefix = a.out;
    if (prefix.empty()) {
        prefix = "dataset" + std::to_string(a.dataset);
        if (a.interaction) prefix += "_int";
    }
    const std::string data_path = prefix + ".csv";
    const std::string truth_path = prefix + ".truth.json";
    sagp::write_dataset(data_path, sim.X, sim.y);
    sagp::write_truth(truth_path, sim.truth_vars, sim.truth_pairs);
    std::cout << data_path << "\n" << truth_path << "\n";
    return 0;
}

sagp::Ranking parse_ranking(const std::string& s) {
    if (s == "median") return sagp::Ranking::median;
    if (s == "mean") return sagp::Ranking::mean;
    throw std::invalid_argument("ranking must be 'median' or 'mean'");
}

int run_fit(const FitArgs& a) {
    if (a.inclusion_threshold < 0.0 || a.inclusion_threshold > 1.0 ||
        a.interaction_threshold < 0.0 || a.interaction_threshold > 1.0)
        throw std::invalid_argument("thresholds must lie in [0, 1]");
    parse_ranking(a.ranking);
    if (a.sigma2_mode != "fixed" && a.sigma2_mode != "empirical")
        throw std::invalid_argument("sigma2-mode must be 'fixed' or 'empirical'");

    sagp::Dataset ds = sagp::load_dataset(a.data, a.response);

    // optional hold-out split: deterministic shuffle on a stream separate
    // from the sampler so the fit consumes the same random sequence either way
    if (a.split > 0.0) {
        if (a.split >= 1.0) throw std::invalid_argument("--split must be in (0, 1)");
        const int n = int(ds.X.rows());
        int n_test = int(std::llround(a.split * n));
        n_test = std::max(1, std::min(n - 1, n_test));
        std::vector<int> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);
        sagp::Rng srng(a.seed, 7777);
        for (int i = n - 1; i > 0; --i)
            std::swap(idx[std::size_t(i)], idx[srng.below(std::uint64_t(i) + 1)]);
        const int n_train = n - n_test;
        Eigen::MatrixXd Xtr(n_train, ds.X.cols()), Xte(n_test, ds.X.cols());
        Eigen::VectorXd ytr(n_train), yte(n_test);
        for (int i = 0; i < n_train; ++i) {
            Xtr.row(i) = ds.X.row(idx[std::size_t(i)]);
            ytr[i] = ds.y[idx[std::size_t(i)]];
        }
        for (int i = 0; i < n_test; ++i) {
            Xte.row(i) = ds.X.row(idx[std::size_t(n_train + i)]);
            yte[i] = ds.y[idx[std::size_t(n_train + i)]];
        }
        std::filesystem::create_directories(a.run_dir);
        sagp::write_dataset(a.run_dir + "/train.csv", Xtr, ytr, ds.var_names, a.response);
        sagp::write_dataset(a.run_dir + "/holdout.csv", Xte, yte, ds.var_names, a.response);
        ds.X = std::move(Xtr);
        ds.y = std::move(ytr);
    }

    sagp::FitConfig cfg;
    cfg.k = a.k;
    cfg.iterations = a.iterations;
    cfg.burn_in = a.burn_in;
    cfg.sigma2 = a.sigma2;
    cfg.sigma2_empirical = (a.sigma2_mode == "empirical");
    cfg.cv_every = a.cv_every;
    cfg.seed = a.seed;
    cfg.thread_count = a.threads;

    const int n = int(ds.X.rows()), p = int(ds.X.cols());
    const double y_mean = ds.y.mean();
    const double ysd = std::sqrt((ds.y.array() - y_mean).square().mean());
    const double y_scale = ysd > 0.0 ? ysd : 1.0;

    sagp::RunManifest man;
    man.set("k", cfg.k);
    man.set("iterations", cfg.iterations);
    man.set("burn_in", cfg.burn_in);
    man.set("sigma2", cfg.sigma2);
    man.set("sigma2_mode", a.sigma2_mode);
    man.set("cv_every", cfg.cv_every);
    man.set_u64("seed", cfg.seed);
    man.set("thread_count", cfg.thread_count);
    man.set("inclusion_threshold", a.inclusion_threshold);
    man.set("interaction_threshold", a.interaction_threshold);
    man.set("ranking_statistic", a.ranking);
    man.set("n", n);
    man.set("p", p);
    man.set("response", a.response);
    man.set("y_mean", y_mean);
    man.set("y_scale", y_scale);
    man.set("data", a.data);
    if (a.split > 0.0) man.set("split", a.split);

    sagp::TraceWriter writer(a.run_dir, man);
    const sagp::FitResult res = sagp::fit(
        ds.X, ds.y, cfg,
        [&](int t, const sagp::TraceIteration& it) { writer.append(t, it); });

    std::ostringstream sum;
    sum << "run directory: " << a.run_dir << "\n";
    sum << "n=" << n << " p=" << p << " k=" << cfg.k << " iterations=" << cfg.iterations
        << " burn_in=" << cfg.burn_in << "\n";
    sum << "sigma2 (scaled response units): " << sagp::fmt_double(res.model.sigma2) << "\n";
    sum << "lasso lambda (last): " << sagp::fmt_double(res.lambda_last) << "\n";
    const double acc_mean = res.accept_rate_kappa.mean();
    int in_band = 0;
    for (int l = 0; l < cfg.k; ++l)
        for (int j = 0; j < p; ++j) {
            const double r = res.accept_rate_kappa(l, j);
            if (r >= 0.15 && r <= 0.45) ++in_band;
        }
    sum << "kappa acceptance: mean " << sagp::fmt_double(acc_mean) << ", " << in_band << "/"
        << cfg.k * p << " parameters in [0.15, 0.45]\n";
    sum << "numerical incidents: " << res.numerical_incidents << "\n";
    sum << "final component weights (sign*sqrt(phi)):";
    for (const auto& c : res.model.components)
        sum << " " << sagp::fmt_double(c.sign * c.weight);
    sum << "\n";
    std::cout << sum.str();
    std::ofstream sf(a.run_dir + "/summary.txt");
    sf << sum.str();
    return 0;
}

int run_report(const ReportArgs& a) {
    const sagp::TraceData trace = sagp::read_trace(a.trace_dir);
    const sagp::Dataset ds =
        sagp::load_dataset(a.data, trace.manifest.values.count("response")
                                       ? trace.manifest.at("response")
                                       : a.response);
    const int p = trace.p();
    if (int(ds.X.cols()) != p)
        throw std::invalid_argument("report: data has " + std::to_string(ds.X.cols()) +
                                    " predictors but the trace was fit with " + std::to_string(p));

    const double incl_thr = a.inclusion_threshold >= 0.0
                                ? a.inclusion_threshold
                                : trace.manifest.num("inclusion_threshold");
    const double inter_thr = a.interaction_threshold >= 0.0
                                 ? a.interaction_threshold
                                 : trace.manifest.num("interaction_threshold");
    const sagp::Ranking ranking = parse_ranking(
        !a.ranking.empty() ? a.ranking : trace.manifest.at("ranking_statistic"));

    const sagp::ReportResult rep =
        sagp::build_report(trace.iterations, trace.burn_in(), incl_thr, ranking);

    const std::string out_dir = a.out_dir.empty() ? a.trace_dir : a.out_dir;
    std::filesystem::create_directories(out_dir);

    {
        sagp::CsvWriter w(out_dir + "/inclusion.csv");
        w.row({"variable", "probability", "selected"});
        for (int j = 0; j < p; ++j)
            w.row({ds.var_names[std::size_t(j)], sagp::fmt_double(rep.inclusion[std::size_t(j)]),
                   rep.selected_variables.count(j) ? "1" : "0"});
    }
    {
        std::ofstream f(out_dir + "/interaction.csv");
        for (int j = 0; j < p; ++j) f << ',' << ds.var_names[std::size_t(j)];
        f << '\n';
        for (int i = 0; i < p; ++i) {
            f << ds.var_names[std::size_t(i)];
            for (int j = 0; j < p; ++j) f << ',' << sagp::fmt_double(rep.interaction(i, j));
            f << '\n';
        }
    }
    {
        sagp::CsvWriter w(out_dir + "/pairs.csv");
        w.row({"var_i", "var_j", "probability", "selected"});
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j)
                // >= so a zero threshold marks everything and >1 marks nothing
                w.row({ds.var_names[std::size_t(i)], ds.var_names[std::size_t(j)],
                       sagp::fmt_double(rep.interaction(i, j)),
                       rep.interaction(i, j) >= inter_thr ? "1" : "0"});
    }
    sagp::write_heatmap_svg(out_dir + "/heatmap.svg", rep.interaction, ds.var_names);

    std::cout << "selected variables:";
    for (int j : rep.selected_variables) std::cout << " " << ds.var_names[std::size_t(j)];
    std::cout << "\nactive components: " << rep.active_functions.size() << " of " << trace.k()
              << "\n";
    if (rep.af_empty_warning)
        std::cout << "warning: no active components; interaction probabilities are all zero\n";

    if (!a.truth.empty()) {
        const std::set<int> truth = sagp::read_truth_vars(a.truth);
        const auto roc = sagp::fpr_fnr(rep.selected_variables, truth, p);
        std::cout << "FPR=" << sagp::fmt_double(roc.fpr) << " FNR=" << sagp::fmt_double(roc.fnr)
                  << "\n";
    }
    return 0;
}

int run_predict(const PredictArgs& a) {
    const sagp::TraceData trace = sagp::read_trace(a.trace_dir);
    const std::string response = trace.manifest.values.count("response")
                                     ? trace.manifest.at("response")
                                     : a.response;
    const sagp::Dataset train = sagp::load_dataset(a.train, response);
    const int p = trace.p();
    if (int(train.X.cols()) != p || int(train.X.rows()) != trace.n())
        throw std::invalid_argument("predict: training data does not match the trace dimensions");

    // new data: same predictors, response column optional (ignored when present)
    const sagp::CsvTable table = sagp::read_csv(a.new_data);
    const int resp = table.column(response);
    const int cols = int(table.header.size()) - (resp >= 0 ? 1 : 0);
    if (cols != p)
        throw std::invalid_argument("predict: new data has " + std::to_string(cols) +
                                    " predictor columns, expected " + std::to_string(p));
    const int m = int(table.rows.size());
    Eigen::MatrixXd X_new(m, p);
    for (int i = 0; i < m; ++i) {
        int jx = 0;
        for (std::size_t c = 0; c < table.header.size(); ++c)
            if (int(c) != resp) X_new(i, jx++) = table.rows[std::size_t(i)][c];
    }

    Eigen::VectorXd pred(0);
    if (m > 0)
        pred = sagp::predict_from_trace(trace.iterations, trace.burn_in(), train.X, train.y,
                                        X_new, trace.manifest.num("y_mean"),
                                        trace.manifest.num("y_scale"));
    sagp::CsvWriter w(a.out);
    w.row({"row", "prediction"});
    for (int i = 0; i < m; ++i)
        w.row({std::to_string(i + 1), sagp::fmt_double(pred[i])});
    std::cout << a.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse additive Gaussian process with per-dimension shrinkage"};
    app.require_subcommand(1);

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "generate a benchmark dataset");
    sim->add_option("--dataset", sa.dataset, "dataset id (1-4)")->required();
    sim->add_option("--interaction", sa.interaction, "include interaction terms");
    sim->add_option("--n", sa.n, "rows (default 100)");
    sim->add_option("--p", sa.p, "predictors (default per dataset)");
    sim->add_option("--sigma2", sa.sigma2, "noise variance (default 0.02)");
    sim->add_option("--seed", sa.seed, "seed");
    sim->add_option("--out", sa.out, "output prefix");

    FitArgs fa;
    auto* fit = app.add_subcommand("fit", "run the hybrid sampler on a dataset");
    fit->add_option("data", fa.data, "training CSV")->required();
    fit->add_option("--run-dir", fa.run_dir, "trace output directory")->required();
    fit->add_option("--response", fa.response, "response column name (default y)");
    fit->add_option("--k", fa.k, "additive components (default 10)");
    fit->add_option("--iterations", fa.iterations, "sweeps (default 5000)");
    fit->add_option("--burn-in", fa.burn_in, "burn-in sweeps (default 2000)");
    fit->add_option("--sigma2", fa.sigma2, "noise variance (default 0.02)");
    fit->add_option("--sigma2-mode", fa.sigma2_mode, "fixed | empirical");
    fit->add_option("--cv-every", fa.cv_every, "sweeps between lambda CV (default 25)");
    fit->add_option("--seed", fa.seed, "seed");
    fit->add_option("--threads", fa.threads, "worker threads (recorded; sampling is sequential)");
    fit->add_option("--inclusion-threshold", fa.inclusion_threshold, "default 0.1");
    fit->add_option("--interaction-threshold", fa.interaction_threshold, "default 0.5");
    fit->add_option("--ranking", fa.ranking, "median | mean");
    fit->add_option("--split", fa.split, "hold out this fraction to <run-dir>/holdout.csv");

    ReportArgs ra;
    auto* rep = app.add_subcommand("report", "selection report from a fit trace");
    rep->add_option("trace", ra.trace_dir, "run directory from fit")->required();
    rep->add_option("data", ra.data, "the fitted dataset CSV")->required();
    rep->add_option("--response", ra.response, "response column if absent from manifest");
    rep->add_option("--truth", ra.truth, "truth sidecar for FPR/FNR");
    rep->add_option("--out-dir", ra.out_dir, "output directory (default: trace dir)");
    rep->add_option("--inclusion-threshold", ra.inclusion_threshold, "override manifest value");
    rep->add_option("--interaction-threshold", ra.interaction_threshold, "override manifest value");
    rep->add_option("--ranking", ra.ranking, "override manifest value");

    PredictArgs pa;
    auto* prd = app.add_subcommand("predict", "posterior-mean predictions at new points");
    prd->add_option("trace", pa.trace_dir, "run directory from fit")->required();
    prd->add_option("train", pa.train, "the CSV the fit ran on")->required();
    prd->add_option("new_data", pa.new_data, "points to predict at")->required();
    prd->add_option("--out", pa.out, "output CSV (default predictions.csv)");
    prd->add_option("--response", pa.response, "response column if absent from manifest");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return run_simulate(sa);
        if (fit->parsed()) return run_fit(fa);
        if (rep->parsed()) return run_report(ra);
        if (prd->parsed()) return run_predict(pa);
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const sagp::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
