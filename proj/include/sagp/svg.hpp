#pragma once

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sagp/csv.hpp"

namespace sagp {

// Probability heat map as a standalone SVG: one square per matrix cell on a
// 10-step grayscale ramp (dark = high), with variable labels and a min/max
// legend strip.
inline void write_heatmap_svg(const std::string& path, const Eigen::MatrixXd& m,
                              const std::vector<std::string>& labels) {
    const int p = int(m.rows());
    if (m.cols() != p) throw std::invalid_argument("heatmap: matrix must be square");
    const double lo = m.minCoeff(), hi = m.maxCoeff();
    const double span = hi > lo ? hi - lo : 1.0;
    const int cell = 24, margin = 70, legend_h = 46;
    const int size = margin + p * cell;

    auto shade = [&](double v) {
        int step = int(((v - lo) / span) * 10.0);
        step = std::clamp(step, 0, 9);
        const int g = 240 - step * 24;  // 240 (light) .. 24 (dark)
        return std::to_string(g);
    };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 10 << "\" height=\""
        << size + legend_h << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (int i = 0; i < p; ++i) {
        const std::string& lab =
            i < int(labels.size()) ? labels[std::size_t(i)] : "v" + std::to_string(i + 1);
        out << "<text x=\"" << margin - 6 << "\" y=\"" << margin + i * cell + cell / 2 + 3
            << "\" text-anchor=\"end\">" << lab << "</text>\n";
        out << "<text x=\"" << margin + i * cell + cell / 2 << "\" y=\"" << margin - 6
            << "\" text-anchor=\"middle\" transform=\"rotate(-45 " << margin + i * cell + cell / 2
            << " " << margin - 6 << ")\">" << lab << "</text>\n";
    }
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            const std::string g = shade(m(i, j));
            out << "<rect x=\"" << margin + j * cell << "\" y=\"" << margin + i * cell
                << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << g << ","
                << g << "," << g << ")\" stroke=\"white\" stroke-width=\"1\"/>\n";
        }
    // legend: the 10 ramp steps with the min and max values at the ends
    const int ly = size + 8;
    for (int s = 0; s < 10; ++s) {
        const int g = 240 - s * 24;
        out << "<rect x=\"" << margin + s * 20 << "\" y=\"" << ly
            << "\" width=\"20\" height=\"12\" fill=\"rgb(" << g << "," << g << "," << g
            << ")\" stroke=\"gray\" stroke-width=\"0.5\"/>\n";
    }
    out << "<text x=\"" << margin << "\" y=\"" << ly + 26 << "\" text-anchor=\"middle\">"
        << fmt_double(lo) << "</text>\n";
    out << "<text x=\"" << margin + 200 << "\" y=\"" << ly + 26 << "\" text-anchor=\"middle\">"
        << fmt_double(hi) << "</text>\n";
    out << "</svg>\n";
}

}  // namespace sagp
