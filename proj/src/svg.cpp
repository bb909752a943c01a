#include "ghostfd/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace ghostfd {

void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::vector<SvgSeries>& series,
                      const std::vector<double>& reference_slopes) {
    const int W = 640, H = 480;
    const int ml = 70, mr = 160, mt = 40, mb = 50;

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (auto [n, v] : s.points) {
            if (!(n > 0.0 && v > 0.0)) continue;
            xmin = std::min(xmin, std::log10(n));
            xmax = std::max(xmax, std::log10(n));
            ymin = std::min(ymin, std::log10(v));
            ymax = std::max(ymax, std::log10(v));
        }
    if (xmin > xmax) throw std::runtime_error("write_loglog_svg: no positive data");
    if (xmax - xmin < 1e-9) xmax = xmin + 1.0;
    ymin -= 0.3;
    ymax += 0.3;

    auto px = [&](double lx) { return ml + (lx - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double ly) { return H - mb - (ly - ymin) / (ymax - ymin) * (H - mt - mb); };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_loglog_svg: cannot open " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << W / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title
        << "</text>\n";
    out << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr << "' y2='" << H - mb
        << "' stroke='black'/>\n";
    out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << H - mb
        << "' stroke='black'/>\n";

    // decade ticks
    for (int e = static_cast<int>(std::ceil(ymin)); e <= static_cast<int>(std::floor(ymax)); ++e) {
        const double y = py(e);
        out << "<line x1='" << ml - 4 << "' y1='" << y << "' x2='" << W - mr << "' y2='" << y
            << "' stroke='#dddddd'/>\n";
        out << "<text x='" << ml - 8 << "' y='" << y + 4
            << "' text-anchor='end' font-size='11'>1e" << e << "</text>\n";
    }
    for (const auto& s : series)
        for (auto [n, v] : s.points) {
            (void)v;
            const double x = px(std::log10(n));
            out << "<line x1='" << x << "' y1='" << H - mb << "' x2='" << x << "' y2='"
                << H - mb + 4 << "' stroke='black'/>\n";
            out << "<text x='" << x << "' y='" << H - mb + 18
                << "' text-anchor='middle' font-size='11'>" << static_cast<int>(n) << "</text>\n";
        }
    out << "<text x='" << (ml + W - mr) / 2 << "' y='" << H - 12
        << "' text-anchor='middle' font-size='12'>N</text>\n";

    // reference slope guides anchored at the first series' last point
    if (!series.empty() && !series.front().points.empty()) {
        const auto [n1, v1] = series.front().points.back();
        for (double slope : reference_slopes) {
            const double lx1 = std::log10(n1), ly1 = std::log10(v1);
            const double lx0 = xmin, ly0 = ly1 + slope * (lx1 - lx0);  // value ~ N^-slope
            out << "<line x1='" << px(lx0) << "' y1='" << py(ly0) << "' x2='" << px(lx1)
                << "' y2='" << py(ly1)
                << "' stroke='#888888' stroke-dasharray='5,4'/>\n";
            out << "<text x='" << px(lx0) + 4 << "' y='" << py(ly0) - 4
                << "' font-size='10' fill='#888888'>slope " << slope << "</text>\n";
        }
    }

    int legend_y = mt + 10;
    for (const auto& s : series) {
        std::string pts;
        for (auto [n, v] : s.points) {
            if (!(v > 0.0)) continue;
            pts += std::to_string(px(std::log10(n))) + "," + std::to_string(py(std::log10(v))) + " ";
        }
        out << "<polyline points='" << pts << "' fill='none' stroke='" << s.color
            << "' stroke-width='1.5'/>\n";
        for (auto [n, v] : s.points)
            if (v > 0.0)
                out << "<circle cx='" << px(std::log10(n)) << "' cy='" << py(std::log10(v))
                    << "' r='3' fill='" << s.color << "'/>\n";
        out << "<line x1='" << W - mr + 10 << "' y1='" << legend_y << "' x2='" << W - mr + 30
            << "' y2='" << legend_y << "' stroke='" << s.color << "' stroke-width='2'/>\n";
        out << "<text x='" << W - mr + 36 << "' y='" << legend_y + 4 << "' font-size='11'>"
            << s.label << "</text>\n";
        legend_y += 18;
    }
    out << "</svg>\n";
}

}  // namespace ghostfd
