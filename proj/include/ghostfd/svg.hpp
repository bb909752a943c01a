#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ghostfd {

struct SvgSeries {
    std::string label;
    std::string color;
    std::vector<std::pair<double, double>> points;  // (N, value), value > 0
};

/// Minimal log-log line chart with markers and reference-slope guide lines
/// (drawn for slopes -2 and -4 in h, i.e. N^-2 and N^-4).
void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::vector<SvgSeries>& series,
                      const std::vector<double>& reference_slopes);

}  // namespace ghostfd
