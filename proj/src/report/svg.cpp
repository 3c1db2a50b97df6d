#include "forkent/report/svg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "forkent/errors.hpp"

namespace forkent::report {

namespace {

constexpr double kWidth = 900, kHeight = 320;
constexpr double kLeft = 60, kRight = 880, kTop = 20, kBottom = 270;

struct Series {
    analysis::Col col;
    const char* label;
    const char* color;
    bool normalize;  // scale by the series max instead of the [0,1] axis
};

constexpr Series kSeries[] = {
    {analysis::Col::fork_entropy, "fork_entropy", "#1f77b4", false},
    {analysis::Col::fork_entropy_pr_variant, "fork_entropy_pr", "#17becf", false},
    {analysis::Col::external_productivity, "external_productivity", "#2ca02c", true},
    {analysis::Col::acceptance_rate, "acceptance_rate", "#ff7f0e", false},
    {analysis::Col::bug_reports, "bug_reports", "#d62728", true},
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

std::string sanitize(const std::string& name) {
    std::string out;
    for (char c : name) {
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.'
                          ? c
                          : '_');
    }
    return out.empty() ? std::string("project") : out;
}

}  // namespace

std::string render_entropy_chart(const std::vector<analysis::TableRow>& rows) {
    std::vector<analysis::TableRow> sorted = rows;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return a.month < b.month;
    });

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << int(kWidth) << "\" height=\""
        << int(kHeight) << "\" viewBox=\"0 0 " << int(kWidth) << ' ' << int(kHeight) << "\">\n";
    svg << "<rect width=\"" << int(kWidth) << "\" height=\"" << int(kHeight)
        << "\" fill=\"white\"/>\n";

    std::string title = sorted.empty() ? "(no data)" : sorted.front().project_id;
    svg << "<text x=\"" << fmt(kLeft) << "\" y=\"14\" font-family=\"monospace\" font-size=\"12\">"
        << title << " - fork entropy and outcomes by month</text>\n";

    // y axis (0..1) with gridlines
    for (int tick = 0; tick <= 4; ++tick) {
        double frac = tick / 4.0;
        double y = kBottom - frac * (kBottom - kTop);
        svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(kRight)
            << "\" y2=\"" << fmt(y) << "\" stroke=\"#dddddd\"/>\n";
        svg << "<text x=\"8\" y=\"" << fmt(y + 4)
            << "\" font-family=\"monospace\" font-size=\"10\">" << fmt(frac) << "</text>\n";
    }

    if (!sorted.empty()) {
        const std::size_t n = sorted.size();
        auto x_at = [&](std::size_t i) {
            return n == 1 ? (kLeft + kRight) / 2.0
                          : kLeft + double(i) * (kRight - kLeft) / double(n - 1);
        };

        // month labels, thinned to at most 12
        std::size_t step = std::max<std::size_t>(1, (n + 11) / 12);
        for (std::size_t i = 0; i < n; i += step) {
            svg << "<text x=\"" << fmt(x_at(i) - 20) << "\" y=\"" << fmt(kBottom + 16)
                << "\" font-family=\"monospace\" font-size=\"10\">" << sorted[i].month
                << "</text>\n";
        }

        double legend_y = kBottom + 34;
        double legend_x = kLeft;
        for (const Series& series : kSeries) {
            double max_value = 0.0;
            for (const auto& row : sorted) {
                if (auto v = row.cell(series.col)) {
                    max_value = std::max(max_value, *v);
                }
            }
            double scale = series.normalize ? (max_value > 0.0 ? max_value : 1.0) : 1.0;

            // undefined months break the polyline
            std::string points;
            for (std::size_t i = 0; i < n; ++i) {
                const auto& v = sorted[i].cell(series.col);
                if (!v) {
                    if (!points.empty()) {
                        svg << "<polyline fill=\"none\" stroke=\"" << series.color
                            << "\" stroke-width=\"1.5\" points=\"" << points << "\"/>\n";
                        points.clear();
                    }
                    continue;
                }
                double y = kBottom - std::clamp(*v / scale, 0.0, 1.0) * (kBottom - kTop);
                points += fmt(x_at(i)) + "," + fmt(y) + " ";
                svg << "<circle cx=\"" << fmt(x_at(i)) << "\" cy=\"" << fmt(y)
                    << "\" r=\"2\" fill=\"" << series.color << "\"/>\n";
            }
            if (!points.empty()) {
                svg << "<polyline fill=\"none\" stroke=\"" << series.color
                    << "\" stroke-width=\"1.5\" points=\"" << points << "\"/>\n";
            }

            std::string label = series.label;
            if (series.normalize) {
                label += " (max " + analysis::format_value(max_value) + ")";
            }
            svg << "<rect x=\"" << fmt(legend_x) << "\" y=\"" << fmt(legend_y - 9)
                << "\" width=\"10\" height=\"10\" fill=\"" << series.color << "\"/>\n";
            svg << "<text x=\"" << fmt(legend_x + 14) << "\" y=\"" << fmt(legend_y)
                << "\" font-family=\"monospace\" font-size=\"10\">" << label << "</text>\n";
            legend_x += 14.0 + 7.0 * double(label.size()) + 16.0;
        }
    }

    svg << "</svg>\n";
    return svg.str();
}

std::vector<std::filesystem::path> write_project_charts(const analysis::RegressionTable& table,
                                                        const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::map<std::string, std::vector<analysis::TableRow>> by_project;
    for (const auto& row : table.rows) {
        by_project[row.project_id].push_back(row);
    }
    std::vector<std::filesystem::path> written;
    for (const auto& [project, rows] : by_project) {
        std::filesystem::path path = dir / (sanitize(project) + ".svg");
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoFailure("cannot open " + path.string() + " for writing");
        }
        out << render_entropy_chart(rows);
        written.push_back(path);
    }
    return written;
}

}  // namespace forkent::report
