#include "subbg/svgplot.hh"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace subbg {

namespace {
double tx(double v, bool log) { return log ? std::log10(v) : v; }
}

void SvgPlot::write(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    const double ml = 70, mr = 20, mt = 36, mb = 52;
    double x_lo = std::numeric_limits<double>::max(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double xv = s.x[i], yv = s.y[i];
            if (logx && xv <= 0.0) continue;
            if (logy && yv <= 0.0) continue;
            x_lo = std::min(x_lo, tx(xv, logx));
            x_hi = std::max(x_hi, tx(xv, logx));
            y_lo = std::min(y_lo, tx(yv, logy));
            y_hi = std::max(y_hi, tx(yv, logy));
        }
    if (x_lo >= x_hi) {
        x_lo -= 1;
        x_hi += 1;
    }
    if (y_lo >= y_hi) {
        y_lo -= 1;
        y_hi += 1;
    }
    double px = (width - ml - mr) / (x_hi - x_lo);
    double py = (height - mt - mb) / (y_hi - y_lo);
    auto X = [&](double v) { return ml + (tx(v, logx) - x_lo) * px; };
    auto Y = [&](double v) { return height - mb - (tx(v, logy) - y_lo) * py; };

    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
       << "' height='" << height << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    char buf[256];
    // frame and axis labels
    std::snprintf(buf, sizeof buf,
                  "<rect x='%.1f' y='%.1f' width='%.1f' height='%.1f' "
                  "fill='none' stroke='black'/>\n",
                  ml, mt, width - ml - mr, height - mt - mb);
    os << buf;
    os << "<text x='" << width / 2 << "' y='20' text-anchor='middle' "
       << "font-size='15'>" << title << "</text>\n";
    os << "<text x='" << width / 2 << "' y='" << height - 12
       << "' text-anchor='middle' font-size='13'>" << xlabel << "</text>\n";
    os << "<text x='16' y='" << height / 2
       << "' text-anchor='middle' font-size='13' transform='rotate(-90 16 "
       << height / 2 << ")'>" << ylabel << "</text>\n";
    // simple decade/step ticks
    int n_ticks = 6;
    for (int t = 0; t <= n_ticks; ++t) {
        double fx = x_lo + (x_hi - x_lo) * t / n_ticks;
        double vx = logx ? std::pow(10.0, fx) : fx;
        std::snprintf(buf, sizeof buf,
                      "<text x='%.1f' y='%.1f' text-anchor='middle' "
                      "font-size='11'>%.3g</text>\n",
                      ml + (fx - x_lo) * px, height - mb + 16, vx);
        os << buf;
        double fy = y_lo + (y_hi - y_lo) * t / n_ticks;
        double vy = logy ? std::pow(10.0, fy) : fy;
        std::snprintf(buf, sizeof buf,
                      "<text x='%.1f' y='%.1f' text-anchor='end' "
                      "font-size='11'>%.3g</text>\n",
                      ml - 6, height - mb - (fy - y_lo) * py + 4, vy);
        os << buf;
    }
    int li = 0;
    for (const auto& s : series) {
        os << "<polyline fill='none' stroke='" << s.color
           << "' stroke-width='1.4' points='";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((logx && s.x[i] <= 0) || (logy && s.y[i] <= 0)) continue;
            std::snprintf(buf, sizeof buf, "%.1f,%.1f ", X(s.x[i]), Y(s.y[i]));
            os << buf;
        }
        os << "'/>\n";
        if (!s.label.empty()) {
            std::snprintf(
                buf, sizeof buf,
                "<text x='%.1f' y='%.1f' font-size='12' fill='%s'>%s</text>\n",
                width - mr - 170.0, mt + 18.0 + 16.0 * li, s.color.c_str(),
                s.label.c_str());
            os << buf;
            ++li;
        }
    }
    os << "</svg>\n";
}

}  // namespace subbg
