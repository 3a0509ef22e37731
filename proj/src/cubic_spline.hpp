#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace critwave::detail {

// Cubic spline on the uniform nodes x_i = i*h, clamped to slope 0 at the
// left end (even radial profiles), natural at the right end.
class CubicSpline {
  public:
    CubicSpline() = default;

    CubicSpline(double h, const std::vector<double>& y) : h_(h), y_(y) {
        const size_t n = y.size();
        if (n < 4) throw std::invalid_argument("CubicSpline: need at least 4 nodes");
        m_.assign(n, 0.0);
        // tridiagonal system for second derivatives m_i
        std::vector<double> diag(n), rhs(n), sub(n), sup(n);
        diag[0] = 2.0 * h;
        sup[0] = h;
        rhs[0] = 6.0 * ((y[1] - y[0]) / h - 0.0);  // clamped: f'(0) = 0
        for (size_t i = 1; i + 1 < n; ++i) {
            sub[i] = h;
            diag[i] = 4.0 * h;
            sup[i] = h;
            rhs[i] = 6.0 * ((y[i + 1] - 2.0 * y[i] + y[i - 1]) / h);
        }
        sub[n - 1] = 0.0;
        diag[n - 1] = 1.0;
        rhs[n - 1] = 0.0;  // natural right end
        for (size_t i = 1; i < n; ++i) {
            const double w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        m_[n - 1] = rhs[n - 1] / diag[n - 1];
        for (size_t i = n - 1; i-- > 0;) m_[i] = (rhs[i] - sup[i] * m_[i + 1]) / diag[i];
    }

    // Evaluate at x; 0 beyond the right end, even reflection for x < 0.
    double operator()(double x) const {
        if (x < 0.0) x = -x;
        const size_t n = y_.size();
        if (x >= h_ * static_cast<double>(n - 1)) return 0.0;
        size_t i = static_cast<size_t>(x / h_);
        if (i >= n - 1) i = n - 2;
        const double a = (h_ * static_cast<double>(i + 1) - x) / h_;
        const double b = 1.0 - a;
        return a * y_[i] + b * y_[i + 1] +
               ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h_ * h_ / 6.0;
    }

  private:
    double h_ = 1.0;
    std::vector<double> y_;
    std::vector<double> m_;
};

}  // namespace critwave::detail
