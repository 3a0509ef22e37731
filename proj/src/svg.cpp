#include "critwave/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace critwave {

namespace {
constexpr double kW = 720.0, kH = 480.0;
constexpr double kL = 80.0, kR = 24.0, kT = 40.0, kB = 56.0;
const char* kColors[] = {"#1f5fae", "#c23b22", "#2e8b57", "#8860b8", "#b8860b", "#444444"};

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}
}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label, bool log_x, bool log_y)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)),
      log_x_(log_x), log_y_(log_y) {}

void SvgPlot::add_series(const std::string& name, const std::vector<double>& x,
                         const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("SvgPlot: mismatched series");
    Series s;
    s.name = name;
    for (size_t i = 0; i < x.size(); ++i) {
        double xv = x[i], yv = y[i];
        if (log_x_) {
            if (!(xv > 0.0)) continue;
            xv = std::log10(xv);
        }
        if (log_y_) {
            if (!(yv > 0.0)) continue;
            yv = std::log10(yv);
        }
        if (!std::isfinite(xv) || !std::isfinite(yv)) continue;
        s.x.push_back(xv);
        s.y.push_back(yv);
    }
    series_.push_back(std::move(s));
}

void SvgPlot::add_line(const std::string& name, double a, double b) {
    (void)name;
    lines_.push_back({a, b});
}

std::string SvgPlot::render() const {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
    double y0 = x0, y1 = -x0;
    for (const auto& s : series_)
        for (size_t i = 0; i < s.x.size(); ++i) {
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    if (!(x0 < x1)) {
        x0 -= 1.0;
        x1 += 1.0;
    }
    if (!(y0 < y1)) {
        y0 -= 1.0;
        y1 += 1.0;
    }
    const double px = 0.03 * (x1 - x0), py = 0.05 * (y1 - y0);
    x0 -= px;
    x1 += px;
    y0 -= py;
    y1 += py;

    auto X = [&](double x) {
        const double t = (x - x0) / (x1 - x0);
        return std::clamp(kL + t * (kW - kL - kR), 0.0, kW);
    };
    auto Y = [&](double y) {
        const double t = (y - y0) / (y1 - y0);
        return std::clamp(kH - kB - t * (kH - kT - kB), 0.0, kH);
    };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + num(kW) + " " + num(kH) +
           "\" font-family=\"monospace\" font-size=\"13\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + num(kW) + "\" height=\"" + num(kH) +
           "\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(kW / 2) + "\" y=\"22\" text-anchor=\"middle\">" + title_ + "</text>\n";
    // axes
    out += "<line x1=\"" + num(kL) + "\" y1=\"" + num(kH - kB) + "\" x2=\"" + num(kW - kR) +
           "\" y2=\"" + num(kH - kB) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + num(kL) + "\" y1=\"" + num(kT) + "\" x2=\"" + num(kL) + "\" y2=\"" +
           num(kH - kB) + "\" stroke=\"black\"/>\n";
    // ticks: 5 per axis
    for (int i = 0; i <= 4; ++i) {
        const double xv = x0 + (x1 - x0) * i / 4.0;
        const double yv = y0 + (y1 - y0) * i / 4.0;
        out += "<line x1=\"" + num(X(xv)) + "\" y1=\"" + num(kH - kB) + "\" x2=\"" + num(X(xv)) +
               "\" y2=\"" + num(kH - kB + 5) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + num(X(xv)) + "\" y=\"" + num(kH - kB + 20) +
               "\" text-anchor=\"middle\">" + (log_x_ ? "1e" + num(xv) : num(xv)) + "</text>\n";
        out += "<line x1=\"" + num(kL - 5) + "\" y1=\"" + num(Y(yv)) + "\" x2=\"" + num(kL) +
               "\" y2=\"" + num(Y(yv)) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + num(kL - 8) + "\" y=\"" + num(Y(yv) + 4) +
               "\" text-anchor=\"end\">" + (log_y_ ? "1e" + num(yv) : num(yv)) + "</text>\n";
    }
    out += "<text x=\"" + num((kL + kW - kR) / 2) + "\" y=\"" + num(kH - 12) +
           "\" text-anchor=\"middle\">" + x_label_ + "</text>\n";
    out += "<text x=\"18\" y=\"" + num((kT + kH - kB) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           num((kT + kH - kB) / 2) + ")\">" + y_label_ + "</text>\n";

    int ci = 0;
    for (const auto& s : series_) {
        const char* color = kColors[ci % 6];
        std::string pts;
        for (size_t i = 0; i < s.x.size(); ++i) {
            pts += num(X(s.x[i])) + "," + num(Y(s.y[i])) + " ";
        }
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" points=\"" + pts +
               "\"/>\n";
        out += "<text x=\"" + num(kW - kR - 6) + "\" y=\"" + num(kT + 16 + 16 * ci) +
               "\" text-anchor=\"end\" fill=\"" + color + "\">" + s.name + "</text>\n";
        ++ci;
    }
    for (const auto& ab : lines_) {
        const double ya = ab[0] + ab[1] * x0, yb = ab[0] + ab[1] * x1;
        out += "<line x1=\"" + num(X(x0)) + "\" y1=\"" + num(Y(ya)) + "\" x2=\"" + num(X(x1)) +
               "\" y2=\"" + num(Y(yb)) + "\" stroke=\"#999999\" stroke-dasharray=\"5,4\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

void SvgPlot::write(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << render();
}

}  // namespace critwave
