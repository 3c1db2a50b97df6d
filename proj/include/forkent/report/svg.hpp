#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "forkent/analysis/table.hpp"

namespace forkent::report {

// Static line chart for one project: fork entropy on the [0, 1] axis plus
// the outcome series scaled to their maxima. Rows must belong to a single
// project; months are plotted in sorted order.
std::string render_entropy_chart(const std::vector<analysis::TableRow>& rows);

// One `<sanitized project>.svg` per project in the table. Returns written paths.
std::vector<std::filesystem::path> write_project_charts(const analysis::RegressionTable& table,
                                                        const std::filesystem::path& dir);

}  // namespace forkent::report
