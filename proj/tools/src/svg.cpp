#include "qpicli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <set>

#include "qpi/errors.hpp"
#include "qpi/io.hpp"

namespace qpicli {
namespace {

constexpr double kWidth = 720, kHeight = 540;
constexpr double kLeft = 70, kRight = 560, kTop = 48, kBottom = 480;

const char* kPalette[] = {"#4477aa", "#ee6677", "#228833",
                          "#ccbb44", "#66ccee", "#aa3377"};

std::string num(double v) { return qpi::io::format_g9(v); }

// Round tick bounds outward to a "nice" step so labels stay short.
std::vector<double> ticks(double lo, double hi) {
    if (!(hi > lo)) hi = lo + 1.0;
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-12 * step; t += step)
        out.push_back(std::fabs(t) < step * 1e-9 ? 0.0 : t);
    return out;
}

} // namespace

void write_scatter_svg(const std::filesystem::path& path,
                       const std::vector<ScatterPoint>& points, const ScatterStyle& style) {
    double xlo = 0.0, xhi = 1.0, ylo = 0.0, yhi = 1.0;
    if (!points.empty()) {
        xlo = xhi = points[0].x;
        ylo = yhi = points[0].y;
        for (const auto& p : points) {
            xlo = std::min(xlo, p.x);
            xhi = std::max(xhi, p.x);
            ylo = std::min(ylo, p.y);
            yhi = std::max(yhi, p.y);
        }
    }
    const double xpad = std::max(1e-9, 0.06 * (xhi - xlo));
    const double ypad = std::max(1e-9, 0.06 * (yhi - ylo));
    xlo -= xpad;
    xhi += xpad;
    ylo -= ypad;
    yhi += ypad;

    auto sx = [&](double v) { return kLeft + (v - xlo) / (xhi - xlo) * (kRight - kLeft); };
    auto sy = [&](double v) { return kBottom - (v - ylo) / (yhi - ylo) * (kBottom - kTop); };

    std::map<std::string, std::string> colors;
    {
        std::set<std::string> labels;
        for (const auto& p : points) labels.insert(p.label);
        int i = 0;
        for (const auto& l : labels)
            colors[l] = kPalette[i++ % (sizeof(kPalette) / sizeof(kPalette[0]))];
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw qpi::InvalidInputError("svg: cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kWidth << " "
        << kHeight << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
    if (style.timestamp) {
        char stamp[32] = {0};
        const std::time_t now = std::time(nullptr);
        std::tm tm_utc{};
        gmtime_r(&now, &tm_utc);
        std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
        out << "<!-- generated " << stamp << " -->\n";
    }
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-size=\"16\">" << style.title << "</text>\n";

    // Frame and grid.
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kRight - kLeft
        << "\" height=\"" << kBottom - kTop << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (double t : ticks(xlo, xhi)) {
        const double x = sx(t);
        out << "<line x1=\"" << num(x) << "\" y1=\"" << kTop << "\" x2=\"" << num(x)
            << "\" y2=\"" << kBottom << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << num(x) << "\" y=\"" << kBottom + 18
            << "\" text-anchor=\"middle\">" << num(t) << "</text>\n";
    }
    for (double t : ticks(ylo, yhi)) {
        const double y = sy(t);
        out << "<line x1=\"" << kLeft << "\" y1=\"" << num(y) << "\" x2=\"" << kRight
            << "\" y2=\"" << num(y) << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(y + 4)
            << "\" text-anchor=\"end\">" << num(t) << "</text>\n";
    }
    out << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kBottom + 42
        << "\" text-anchor=\"middle\">" << style.x_axis << "</text>\n";
    out << "<text x=\"20\" y=\"" << (kTop + kBottom) / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << (kTop + kBottom) / 2
        << ")\">" << style.y_axis << "</text>\n";

    for (const auto& p : points)
        out << "<circle cx=\"" << num(sx(p.x)) << "\" cy=\"" << num(sy(p.y))
            << "\" r=\"4\" fill=\"" << colors[p.label]
            << "\" fill-opacity=\"0.75\"><title>" << p.id << "</title></circle>\n";

    double ly = kTop + 10;
    for (const auto& [label, color] : colors) {
        out << "<circle cx=\"" << kRight + 16 << "\" cy=\"" << num(ly) << "\" r=\"5\" fill=\""
            << color << "\"/>\n";
        out << "<text x=\"" << kRight + 28 << "\" y=\"" << num(ly + 4) << "\">" << label
            << "</text>\n";
        ly += 22;
    }
    out << "</svg>\n";
}

} // namespace qpicli
