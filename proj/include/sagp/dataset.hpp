#pragma once

#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sagp/csv.hpp"

namespace sagp {

// Design matrix plus response, as loaded from a CSV with a header row. The
// response column is picked by name; every other column is a predictor.
struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<std::string> var_names;
    std::string response_name;
};

inline Dataset load_dataset(const std::string& path, const std::string& response = "y") {
    const CsvTable table = read_csv(path);
    const int resp = table.column(response);
    if (resp < 0)
        throw std::runtime_error(path + ": response column '" + response + "' not found");
    const int n = int(table.rows.size());
    const int p = int(table.header.size()) - 1;
    if (n == 0) throw std::runtime_error(path + ": no data rows");
    if (p == 0) throw std::runtime_error(path + ": no predictor columns");

    Dataset ds;
    ds.response_name = response;
    ds.X.resize(n, p);
    ds.y.resize(n);
    for (std::size_t c = 0; c < table.header.size(); ++c)
        if (int(c) != resp) ds.var_names.push_back(table.header[c]);
    for (int i = 0; i < n; ++i) {
        int jx = 0;
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            if (int(c) == resp) ds.y[i] = table.rows[i][c];
            else ds.X(i, jx++) = table.rows[i][c];
        }
    }
    return ds;
}

inline void write_dataset(const std::string& path, const Eigen::MatrixXd& X,
                          const Eigen::VectorXd& y,
                          const std::vector<std::string>& var_names = {},
                          const std::string& response_name = "y") {
    CsvWriter w(path);
    std::vector<std::string> header;
    for (int j = 0; j < X.cols(); ++j)
        header.push_back(j < int(var_names.size()) ? var_names[std::size_t(j)]
                                                   : "x" + std::to_string(j + 1));
    header.push_back(response_name);
    w.row(header);
    for (int i = 0; i < X.rows(); ++i) {
        std::vector<std::string> cells;
        cells.reserve(std::size_t(X.cols()) + 1);
        for (int j = 0; j < X.cols(); ++j) cells.push_back(fmt_double(X(i, j)));
        cells.push_back(fmt_double(y[i]));
        w.row(cells);
    }
}

// Truth sidecar: flat JSON-style listing of signal variables (1-based names)
// and interacting pairs, written next to simulated datasets.
inline void write_truth(const std::string& path, const std::set<int>& truth_vars,
                        const std::set<std::pair<int, int>>& truth_pairs) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "{\n  \"variables\": [";
    bool first = true;
    for (int j : truth_vars) {
        if (!first) out << ", ";
        out << (j + 1);
        first = false;
    }
    out << "],\n  \"pairs\": [";
    first = true;
    for (const auto& [i, j] : truth_pairs) {
        if (!first) out << ", ";
        out << "[" << (i + 1) << ", " << (j + 1) << "]";
        first = false;
    }
    out << "]\n}\n";
}

inline std::set<int> read_truth_vars(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto vpos = text.find("\"variables\"");
    if (vpos == std::string::npos) throw std::runtime_error(path + ": no \"variables\" key");
    const auto lb = text.find('[', vpos), rb = text.find(']', vpos);
    if (lb == std::string::npos || rb == std::string::npos || rb < lb)
        throw std::runtime_error(path + ": malformed variables list");
    std::set<int> vars;
    std::string cur;
    for (auto i = lb + 1; i < rb; ++i) {
        const char c = text[i];
        if (c >= '0' && c <= '9') cur.push_back(c);
        else if (!cur.empty()) { vars.insert(std::stoi(cur) - 1); cur.clear(); }
    }
    if (!cur.empty()) vars.insert(std::stoi(cur) - 1);
    return vars;
}

}  // namespace sagp
