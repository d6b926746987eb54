#pragma once

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sagp/csv.hpp"

namespace sagp {

// Flat key-value manifest (config.json) for a fit run. Values are stored as
// strings; numeric accessors parse on demand.
struct RunManifest {
    std::map<std::string, std::string> values;

    void set(const std::string& key, const std::string& v) { values[key] = v; }
    void set(const std::string& key, double v) { values[key] = fmt_double(v); }
    void set(const std::string& key, int v) { values[key] = std::to_string(v); }
    void set_u64(const std::string& key, std::uint64_t v) { values[key] = std::to_string(v); }

    const std::string& at(const std::string& key) const {
        auto it = values.find(key);
        if (it == values.end()) throw std::runtime_error("manifest key missing: " + key);
        return it->second;
    }
    double num(const std::string& key) const { return std::strtod(at(key).c_str(), nullptr); }
    int integer(const std::string& key) const { return int(std::strtol(at(key).c_str(), nullptr, 10)); }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << "{\n";
        bool first = true;
        for (const auto& [k, v] : values) {
            if (!first) out << ",\n";
            first = false;
            bool numeric = !v.empty();
            for (char c : v)
                if (!(std::isdigit((unsigned char)c) || c == '-' || c == '+' || c == '.' ||
                      c == 'e' || c == 'E'))
                    numeric = false;
            out << "  \"" << k << "\": ";
            if (numeric) out << v;
            else out << '"' << v << '"';
        }
        out << "\n}\n";
    }
    static RunManifest load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open " + path);
        RunManifest m;
        std::string line;
        while (std::getline(in, line)) {
            const auto q1 = line.find('"');
            if (q1 == std::string::npos) continue;
            const auto q2 = line.find('"', q1 + 1);
            if (q2 == std::string::npos) continue;
            const std::string key = line.substr(q1 + 1, q2 - q1 - 1);
            auto colon = line.find(':', q2);
            if (colon == std::string::npos) continue;
            std::string rest = line.substr(colon + 1);
            while (!rest.empty() && (rest.back() == ',' || rest.back() == '\r' || rest.back() == ' '))
                rest.pop_back();
            while (!rest.empty() && rest.front() == ' ') rest.erase(rest.begin());
            if (!rest.empty() && rest.front() == '"') rest = rest.substr(1, rest.size() - 2);
            m.values[key] = rest;
        }
        return m;
    }
};

// One iteration's state, as persisted: everything needed to reproduce the
// report and post-hoc predictions.
struct TraceIteration {
    Eigen::MatrixXd kappa;   // k x p
    Eigen::VectorXd tau;     // k
    Eigen::MatrixXd psi;     // k x p
    Eigen::VectorXd weight;  // k (sqrt(phi), >= 0)
    Eigen::VectorXd sign;    // k (+-1)
    Eigen::MatrixXd fvals;   // k x n (sampled component values at train points)
    std::vector<std::set<int>> selected;  // per-component 2-means signal set
    double sigma2 = 0.0;
    double lambda = 0.0;
};

// Append-only on-disk trace: one CSV per parameter group under a run directory,
// plus the config manifest. Chosen over a binary format for diffability.
class TraceWriter {
public:
    TraceWriter(const std::string& run_dir, const RunManifest& manifest) : dir_(run_dir) {
        std::filesystem::create_directories(dir_);
        manifest.save(dir_ + "/config.json");
        open(kappa_, "kappa.csv", "iter,l,j,value");
        open(tau_, "tau.csv", "iter,l,value");
        open(psi_, "psi.csv", "iter,l,j,value");
        open(phi_, "phi.csv", "iter,l,weight,sign");
        open(sel_, "selected.csv", "iter,l,h,vars");
        open(fvals_, "fvals.csv", "iter,l,i,value");
        open(info_, "iterinfo.csv", "iter,sigma2,lambda");
    }

    void append(int iter, const TraceIteration& it) {
        const int k = int(it.kappa.rows()), p = int(it.kappa.cols()), n = int(it.fvals.cols());
        for (int l = 0; l < k; ++l) {
            for (int j = 0; j < p; ++j)
                kappa_ << iter << ',' << l << ',' << j << ',' << fmt_double(it.kappa(l, j)) << '\n';
            tau_ << iter << ',' << l << ',' << fmt_double(it.tau[l]) << '\n';
            for (int j = 0; j < p; ++j)
                psi_ << iter << ',' << l << ',' << j << ',' << fmt_double(it.psi(l, j)) << '\n';
            phi_ << iter << ',' << l << ',' << fmt_double(it.weight[l]) << ','
                 << (it.sign[l] < 0 ? "-1" : "1") << '\n';
            sel_ << iter << ',' << l << ',' << it.selected[l].size() << ',';
            bool first = true;
            for (int j : it.selected[l]) {
                if (!first) sel_ << ';';
                sel_ << j;
                first = false;
            }
            sel_ << '\n';
            for (int i = 0; i < n; ++i)
                fvals_ << iter << ',' << l << ',' << i << ',' << fmt_double(it.fvals(l, i)) << '\n';
        }
        info_ << iter << ',' << fmt_double(it.sigma2) << ',' << fmt_double(it.lambda) << '\n';
    }

private:
    void open(std::ofstream& f, const std::string& name, const std::string& header) {
        f.open(dir_ + "/" + name);
        if (!f) throw std::runtime_error("cannot write " + dir_ + "/" + name);
        f << header << '\n';
    }
    std::string dir_;
    std::ofstream kappa_, tau_, psi_, phi_, sel_, fvals_, info_;
};

struct TraceData {
    RunManifest manifest;
    std::vector<TraceIteration> iterations;

    int k() const { return manifest.integer("k"); }
    int p() const { return manifest.integer("p"); }
    int n() const { return manifest.integer("n"); }
    int burn_in() const { return manifest.integer("burn_in"); }
};

inline TraceData read_trace(const std::string& run_dir) {
    TraceData td;
    td.manifest = RunManifest::load(run_dir + "/config.json");
    const int iters = td.manifest.integer("iterations");
    const int k = td.k(), p = td.p(), n = td.n();
    td.iterations.resize(std::size_t(iters));
    for (auto& it : td.iterations) {
        it.kappa.setZero(k, p);
        it.tau.setZero(k);
        it.psi.setZero(k, p);
        it.weight.setZero(k);
        it.sign.setOnes(k);
        it.fvals.setZero(k, n);
        it.selected.assign(std::size_t(k), {});
        it.sigma2 = 0.0;
        it.lambda = 0.0;
    }
    auto iter_of = [&](const std::vector<double>& row) {
        const int t = int(row[0]);
        if (t < 0 || t >= iters) throw std::runtime_error(run_dir + ": iteration index out of range");
        return t;
    };
    for (const auto& row : read_csv(run_dir + "/kappa.csv").rows)
        td.iterations[iter_of(row)].kappa(int(row[1]), int(row[2])) = row[3];
    for (const auto& row : read_csv(run_dir + "/tau.csv").rows)
        td.iterations[iter_of(row)].tau[int(row[1])] = row[2];
    for (const auto& row : read_csv(run_dir + "/psi.csv").rows)
        td.iterations[iter_of(row)].psi(int(row[1]), int(row[2])) = row[3];
    for (const auto& row : read_csv(run_dir + "/phi.csv").rows) {
        auto& it = td.iterations[iter_of(row)];
        it.weight[int(row[1])] = row[2];
        it.sign[int(row[1])] = row[3] < 0 ? -1.0 : 1.0;
    }
    for (const auto& row : read_csv(run_dir + "/fvals.csv").rows)
        td.iterations[iter_of(row)].fvals(int(row[1]), int(row[2])) = row[3];
    for (const auto& row : read_csv(run_dir + "/iterinfo.csv").rows) {
        auto& it = td.iterations[iter_of(row)];
        it.sigma2 = row[1];
        it.lambda = row[2];
    }
    // selected.csv holds a string list column; re-derive cheaply from kappa instead
    // would lose the persisted record, so parse it manually.
    {
        std::ifstream in(run_dir + "/selected.csv");
        if (!in) throw std::runtime_error("cannot open " + run_dir + "/selected.csv");
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto cells = detail::split_csv_line(line);
            if (cells.size() < 3) continue;
            const int t = int(std::strtol(cells[0].c_str(), nullptr, 10));
            const int l = int(std::strtol(cells[1].c_str(), nullptr, 10));
            if (t < 0 || t >= iters || l < 0 || l >= k) continue;
            auto& set = td.iterations[std::size_t(t)].selected[std::size_t(l)];
            if (cells.size() >= 4 && !cells[3].empty()) {
                std::string cur;
                for (char c : cells[3] + ";") {
                    if (c == ';') {
                        if (!cur.empty()) set.insert(int(std::strtol(cur.c_str(), nullptr, 10)));
                        cur.clear();
                    } else {
                        cur.push_back(c);
                    }
                }
            }
        }
    }
    return td;
}

}  // namespace sagp
