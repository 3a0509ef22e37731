#pragma once

#include <array>
#include <string>
#include <vector>

namespace critwave {

// Minimal deterministic line-plot writer: pure text SVG, fixed viewBox,
// coordinates clamped inside it. Log axes take log10 of the data upfront.
class SvgPlot {
  public:
    SvgPlot(std::string title, std::string x_label, std::string y_label,
            bool log_x = false, bool log_y = false);

    void add_series(const std::string& name, const std::vector<double>& x,
                    const std::vector<double>& y);
    // straight reference line y = a + b*x in (possibly log-transformed) axes
    void add_line(const std::string& name, double a, double b);

    std::string render() const;
    void write(const std::string& path) const;

  private:
    struct Series {
        std::string name;
        std::vector<double> x, y;
    };
    std::string title_, x_label_, y_label_;
    bool log_x_, log_y_;
    std::vector<Series> series_;
    std::vector<std::array<double, 2>> lines_;
};

}  // namespace critwave
