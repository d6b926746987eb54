#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sagp {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return int(i);
        return -1;
    }
};

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}
}  // namespace detail

// Reads a numeric CSV with a header row. Parse failures name the offending
// row and column (1-based, header = row 1).
inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    table.header = detail::split_csv_line(line);
    int row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != table.header.size())
            throw std::runtime_error(path + ": row " + std::to_string(row_no) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(table.header.size()));
        std::vector<double> row(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const char* s = cells[c].c_str();
            char* end = nullptr;
            row[c] = std::strtod(s, &end);
            if (end == s || *end != '\0')
                throw std::runtime_error(path + ": row " + std::to_string(row_no) +
                                         ", column " + std::to_string(c + 1) + " ('" +
                                         table.header[c] + "'): not numeric: '" + cells[c] + "'");
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

// Shortest round-trip formatting for doubles (17 significant digits).
inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw std::runtime_error("cannot write " + path);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }
    std::ofstream& stream() { return out_; }

private:
    std::ofstream out_;
};

}  // namespace sagp
