// Acceptance gate: one pass/fail line per criterion, exit 1 on any failure.
//
// Selection benchmarks run the full pipeline on the simulated dataset
// families; the property block re-checks the numerical kernels against
// independent oracles at full instance counts.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "sagp/report.hpp"
#include "sagp/sampler.hpp"
#include "sagp/simulate.hpp"
#include "sagp/trace.hpp"

using namespace sagp;

namespace {

bool all_ok = true;

void line(const std::string& name, bool pass, const std::string& detail) {
    if (!pass) all_ok = false;
    std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

// benchmark sampler settings; sigma2 is in raw response units.  The benches
// assume more noise than the generators inject (0.10 vs 0.02): the extra
// smoothing evens out the fitted bandwidths across signal dimensions of
// different strength, which keeps the cluster split from landing inside the
// signal group when strong and weak dimensions coexist.
FitConfig bench_config(std::uint64_t seed, int k, int iterations, int burn_in) {
    FitConfig cfg;
    cfg.k = k;
    cfg.iterations = iterations;
    cfg.burn_in = burn_in;
    cfg.sigma2 = 0.10;
    cfg.seed = seed;
    return cfg;
}

struct SelectionBench {
    double mean_fpr = 0.0;
    double mean_fnr = 0.0;
    double max_rep_seconds = 0.0;
    int inclusion_example_hits = 0;   // reps where exactly the truth clears 0.1
    Eigen::MatrixXd accept_first;     // kappa acceptance rates of the first rep
};

SelectionBench run_selection(int dataset, int reps, int k, int iterations, int burn_in,
                             std::uint64_t data_seed0, std::uint64_t fit_seed0) {
    SelectionBench out;
    std::vector<TraceIteration> trace;
    for (int rep = 0; rep < reps; ++rep) {
        SimSpec spec;
        spec.dataset_id = dataset;
        spec.p = SimSpec::default_p(dataset);
        spec.seed = data_seed0 + std::uint64_t(rep);
        const auto d = generate(spec);

        const auto t0 = std::chrono::steady_clock::now();
        const auto res =
            fit_collect(d.X, d.y, bench_config(fit_seed0 + std::uint64_t(rep), k, iterations, burn_in), trace);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.max_rep_seconds = std::max(out.max_rep_seconds, secs);
        if (rep == 0) out.accept_first = res.accept_rate_kappa;

        const auto rep_res = build_report(trace, burn_in);
        const auto roc = fpr_fnr(rep_res.selected_variables, d.truth_vars, spec.p);
        out.mean_fpr += roc.fpr;
        out.mean_fnr += roc.fnr;

        bool example = true;
        for (int j = 0; j < spec.p; ++j) {
            const bool truth = d.truth_vars.count(j) > 0;
            const bool above = rep_res.inclusion[std::size_t(j)] > 0.1;
            if (truth != above) example = false;
        }
        if (example) ++out.inclusion_example_hits;
    }
    out.mean_fpr /= reps;
    out.mean_fnr /= reps;
    return out;
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::ArrayXd ac = a.array() - a.mean();
    const Eigen::ArrayXd bc = b.array() - b.mean();
    return (ac * bc).sum() / std::sqrt(ac.square().sum() * bc.square().sum());
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

double phi_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

int main() {
    // ---- criterion 1: variable selection, dataset 1 ----
    {
        const auto b = run_selection(1, 10, 10, 1500, 500, 100, 1000);
        line("criterion 1 (dataset 1 selection)",
             b.mean_fpr <= 0.05 && b.mean_fnr <= 0.05 && b.max_rep_seconds <= 900.0,
             "mean FPR=" + fmt(b.mean_fpr) + " (<=0.05), mean FNR=" + fmt(b.mean_fnr) +
                 " (<=0.05), max rep " + fmt(b.max_rep_seconds) + "s (<=900)");

        line("report example (dataset 1 inclusion at 0.1)", b.inclusion_example_hits >= 9,
             std::to_string(b.inclusion_example_hits) + "/10 replicates separate truth from noise (>=9)");

        int in_band = 0;
        const int total = int(b.accept_first.size());
        for (int l = 0; l < b.accept_first.rows(); ++l)
            for (int j = 0; j < b.accept_first.cols(); ++j) {
                const double r = b.accept_first(l, j);
                if (r >= 0.15 && r <= 0.45) ++in_band;
            }
        line("criterion 6f (kappa acceptance band)", in_band * 10 >= total * 9,
             std::to_string(in_band) + "/" + std::to_string(total) +
                 " kappa parameters in [0.15, 0.45] (>=90%)");
    }

    // ---- criterion 2: variable selection, dataset 3 ----
    {
        const auto b = run_selection(3, 10, 10, 1500, 500, 120, 1200);
        line("criterion 2 (dataset 3 selection)", b.mean_fpr <= 0.05 && b.mean_fnr <= 0.10,
             "mean FPR=" + fmt(b.mean_fpr) + " (<=0.05), mean FNR=" + fmt(b.mean_fnr) +
                 " (<=0.10), max rep " + fmt(b.max_rep_seconds) + "s");
    }

    // ---- criterion 3: high-dimension run, dataset 2 ----
    {
        const auto b = run_selection(2, 5, 5, 800, 300, 140, 1400);
        line("criterion 3 (dataset 2, p=100)",
             b.mean_fpr <= 0.05 && b.mean_fnr <= 0.10 && b.max_rep_seconds <= 3600.0,
             "mean FPR=" + fmt(b.mean_fpr) + " (<=0.05), mean FNR=" + fmt(b.mean_fnr) +
                 " (<=0.10), max rep " + fmt(b.max_rep_seconds) + "s (<=3600)");
    }

    // ---- criterion 4: interaction recovery, dataset 1 with interactions ----
    {
        int hits = 0;
        std::vector<TraceIteration> trace;
        for (int rep = 0; rep < 10; ++rep) {
            SimSpec spec;
            spec.dataset_id = 1;
            spec.interaction = true;
            spec.seed = 160 + std::uint64_t(rep);
            const auto d = generate(spec);
            fit_collect(d.X, d.y, bench_config(1600 + std::uint64_t(rep), 10, 1500, 500), trace);
            const auto rep_res = build_report(trace, 500);

            bool ok = true;
            for (const auto& [i, j] : d.truth_pairs)
                if (!(rep_res.interaction(i, j) > 0.5)) ok = false;
            for (int i = 0; i < spec.p && ok; ++i)
                for (int j = i + 1; j < spec.p; ++j) {
                    const bool noise_pair = !d.truth_vars.count(i) || !d.truth_vars.count(j);
                    if (noise_pair && rep_res.interaction(i, j) > 0.5) { ok = false; break; }
                }
            if (ok) ++hits;
        }
        line("criterion 4 (interaction recovery)", hits >= 8,
             std::to_string(hits) + "/10 replicates recover the pair network (>=8)");
    }

    // ---- criterion 5: held-out prediction on a 50/50 split ----
    {
        int hits = 0;
        double worst = 1.0;
        std::vector<TraceIteration> trace;
        for (int rep = 0; rep < 10; ++rep) {
            SimSpec spec;
            spec.dataset_id = 1;
            spec.seed = 180 + std::uint64_t(rep);
            const auto d = generate(spec);

            const int n = int(d.X.rows()), n_test = n / 2, n_train = n - n_test;
            std::vector<int> idx(static_cast<std::size_t>(n));
            std::iota(idx.begin(), idx.end(), 0);
            Rng srng(spec.seed, 7777);
            for (int i = n - 1; i > 0; --i)
                std::swap(idx[std::size_t(i)], idx[srng.below(std::uint64_t(i) + 1)]);
            Eigen::MatrixXd Xtr(n_train, d.X.cols()), Xte(n_test, d.X.cols());
            Eigen::VectorXd ytr(n_train), yte(n_test);
            for (int i = 0; i < n_train; ++i) {
                Xtr.row(i) = d.X.row(idx[std::size_t(i)]);
                ytr[i] = d.y[idx[std::size_t(i)]];
            }
            for (int i = 0; i < n_test; ++i) {
                Xte.row(i) = d.X.row(idx[std::size_t(n_train + i)]);
                yte[i] = d.y[idx[std::size_t(n_train + i)]];
            }

            const auto res =
                fit_collect(Xtr, ytr, bench_config(1800 + std::uint64_t(rep), 10, 1500, 500), trace);
            const Eigen::VectorXd pred =
                predict_from_trace(trace, 500, Xtr, ytr, Xte, res.y_mean, res.y_scale);
            const double r = pearson(pred, yte);
            worst = std::min(worst, r);
            if (r >= 0.9) ++hits;
        }
        line("criterion 5 (held-out prediction)", hits >= 8,
             std::to_string(hits) + "/10 replicates with Pearson r >= 0.9 (worst r=" + fmt(worst) +
                 ")");
    }

    // ---- criterion 6: property suite ----
    {
        Rng rng(60001);
        double worst = 0.0;
        for (int inst = 0; inst < 200; ++inst) {
            const int n = 2 + int(rng.below(9));
            Eigen::MatrixXd X(n, 3);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < 3; ++j) X(i, j) = rng.uniform();
            Eigen::VectorXd kappa(3);
            for (int j = 0; j < 3; ++j) kappa[j] = rng.uniform_pos() * 3.0;
            Eigen::VectorXd r(n);
            for (int i = 0; i < n; ++i) r[i] = rng.normal();
            const double sigma2 = 0.05 + rng.uniform();

            const Eigen::MatrixXd K = ard_kernel(X, kappa);
            const double got = log_marginal(r, K, sigma2, "acceptance");
            worst = std::max(worst, std::abs(got - oracle::dense_log_marginal(r, K, sigma2)));

            Eigen::MatrixXd Xs(2, 3);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 3; ++j) Xs(i, j) = rng.uniform();
            const Eigen::MatrixXd K_star = ard_kernel(Xs, X, kappa);
            const Eigen::MatrixXd K_ss = ard_kernel(Xs, kappa);
            const auto mom = predictive_moments(r, K, K_star, K_ss, sigma2);
            const auto dm = oracle::dense_predictive(r, K, K_star, K_ss, sigma2);
            worst = std::max(worst, (mom.mean - dm.mean).cwiseAbs().maxCoeff());
            worst = std::max(worst, (mom.cov - dm.cov).cwiseAbs().maxCoeff());
        }
        line("criterion 6a (dense-inversion oracles)", worst <= 1e-8,
             "max |deviation| = " + fmt(worst * 1e9) + "e-9 over 200 instances (<=1e-8)");
    }
    {
        Rng rng(60002);
        int mismatches = 0;
        for (int inst = 0; inst < 500; ++inst) {
            const int m = 2 + int(rng.below(11));
            std::vector<double> v(m);
            for (int i = 0; i < m; ++i)
                v[i] = inst % 2 == 0 ? (rng.uniform() < 0.4 ? 4.0 : 0.05) + 0.1 * rng.normal()
                                     : rng.uniform() * 10.0;
            if (two_means_1d(v).h != oracle::exhaustive_two_means_h(v)) ++mismatches;
        }
        line("criterion 6b (1-D 2-means vs enumeration)", mismatches == 0,
             std::to_string(mismatches) + " mismatches over 500 instances m<=12");
    }
    {
        Rng rng(60003);
        double worst = 0.0;
        for (int inst = 0; inst < 60; ++inst) {
            const int n = 30 + int(rng.below(40)), k = 2 + int(rng.below(7));
            Eigen::MatrixXd Z(n, k);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < k; ++j) Z(i, j) = rng.normal();
            const auto design = ComponentDesign::build(Z);
            Eigen::VectorXd y = design.Zs.col(0) * 1.5;
            for (int i = 0; i < n; ++i) y[i] += 0.4 * rng.normal();

            const double lambda = cv_select(design, y, rng);
            const Eigen::VectorXd beta = coef_at(lars_path(design.Zs, y), lambda);
            const Eigen::VectorXd resid = y - design.Zs * beta;
            for (int j = 0; j < k; ++j) {
                const double c = design.Zs.col(j).dot(resid) / n;
                worst = std::max(worst, std::abs(c) - lambda);          // <= 0 required
                if (beta[j] != 0.0)
                    worst = std::max(worst, std::abs(c - lambda * (beta[j] > 0 ? 1 : -1)));
            }
        }
        line("criterion 6c (lasso KKT at CV solutions)", worst <= 1e-6,
             "max KKT violation = " + fmt(worst * 1e7) + "e-7 over 60 instances (<=1e-6)");
    }
    {
        // the coded half-normal density integrates to 1 over kappa
        double worst_hn = 0.0;
        for (auto [psi, tau] : {std::pair{0.25, 1.0}, {1.0, 1.0}, {2.0, 2.0}}) {
            const double v = psi * tau;
            const double mass = oracle::simpson(
                [&, p = psi, t = tau](double kappa) { return std::exp(log_prior_kappa(kappa, p, t)); },
                0.0, 12.0 * std::sqrt(v), 20000);
            worst_hn = std::max(worst_hn, std::abs(mass - 1.0));
        }
        // the coded transformed half-Cauchy integrates to 1: substitute s = u^2
        // on [0,1] and s = 1/w^2 for the far tail so both pieces are smooth
        const double inner = oracle::simpson(
            [](double u) { return std::exp(log_prior_scale(u * u)) * 2.0 * u; }, 1e-9, 1.0, 20000);
        const double outer = oracle::simpson(
            [](double w) { return std::exp(log_prior_scale(1.0 / (w * w))) * 2.0 / (w * w * w); },
            1e-9, 1.0, 20000);
        const double worst_hc = std::abs(inner + outer - 1.0);
        line("criterion 6d (prior quadrature)", worst_hn <= 1e-6 && worst_hc <= 1e-4,
             "half-normal residual " + fmt(worst_hn * 1e7) + "e-7 (<=1e-6), half-Cauchy residual " +
                 fmt(worst_hc * 1e5) + "e-5 (<=1e-4)");
    }
    {
        // log-uniform target truncated to [e^-1, e^2]: density 1/x cancels the
        // proposal Jacobian, so a single step from x0 accepts iff the proposal
        // lands inside, with probability Phi(2 - ln x0) - Phi(-1 - ln x0)
        Rng rng(60004);
        auto target = [](double x) {
            if (x < std::exp(-1.0) || x > std::exp(2.0))
                return -std::numeric_limits<double>::infinity();
            return -std::log(x);
        };
        double worst = 0.0;
        for (double lx0 : {0.0, 1.5}) {
            int acc = 0;
            const int trials = 10000;
            for (int i = 0; i < trials; ++i) {
                double x = std::exp(lx0);
                ProposalTuner tuner{1.0, 0, 0};  // unit sd on the log scale
                if (mh_log_normal_step(x, target, tuner, rng)) ++acc;
            }
            const double analytic = phi_cdf(2.0 - lx0) - phi_cdf(-1.0 - lx0);
            worst = std::max(worst, std::abs(double(acc) / trials - analytic));
        }
        line("criterion 6e (MH acceptance frequency)", worst <= 0.02,
             "max |empirical - analytic| = " + fmt(worst) + " over 10000 trials (<=0.02)");
    }
    {
        // byte-identical traces for a fixed (seed, thread_count)
        SimSpec spec;
        spec.dataset_id = 1;
        spec.n = 30;
        spec.p = 4;
        spec.seed = 61;
        const auto d = generate(spec);
        FitConfig cfg = bench_config(62, 3, 30, 10);
        RunManifest man;
        man.set("iterations", cfg.iterations);
        man.set("burn_in", cfg.burn_in);
        man.set("k", cfg.k);
        man.set("p", 4);
        man.set("n", 30);
        const auto base = std::filesystem::temp_directory_path() / "sagp_acceptance";
        auto run_into = [&](const std::string& dir) {
            std::filesystem::remove_all(dir);
            TraceWriter w(dir, man);
            fit(d.X, d.y, cfg, [&](int t, const TraceIteration& it) { w.append(t, it); });
        };
        run_into((base / "a").string());
        run_into((base / "b").string());
        bool same = true;
        for (const char* f : {"kappa.csv", "tau.csv", "psi.csv", "phi.csv", "selected.csv",
                              "fvals.csv", "iterinfo.csv"})
            if (slurp((base / "a" / f).string()) != slurp((base / "b" / f).string())) same = false;

        // incremental kernel cache vs full rebuild after 100 updates
        Rng rng(60005);
        Eigen::MatrixXd X(25, 4);
        for (int i = 0; i < 25; ++i)
            for (int j = 0; j < 4; ++j) X(i, j) = rng.uniform();
        const DistanceCache dc(X);
        Eigen::VectorXd kappa = Eigen::VectorXd::Constant(4, 0.25);
        KernelCache cache, scratch;
        cache.rebuild(dc, kappa);
        double drift = 0.0;
        for (int step = 0; step < 100; ++step) {
            const int j = int(rng.below(4));
            const double nk = rng.uniform_pos() * 3.0;
            scratch.shift_from(cache, dc, j, nk - kappa[j]);
            cache.swap(scratch);
            kappa[j] = nk;
            KernelCache fresh;
            fresh.rebuild(dc, kappa);
            drift = std::max(drift, (cache.K() - fresh.K()).cwiseAbs().maxCoeff());
        }
        line("criterion 6g (determinism and cache)", same && drift <= 1e-12,
             std::string(same ? "traces byte-identical" : "trace files differ") +
                 ", cache drift " + fmt(drift * 1e13) + "e-13 after 100 updates (<=1e-12)");
    }

    std::printf("%s\n", all_ok ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED");
    return all_ok ? 0 : 1;
}
