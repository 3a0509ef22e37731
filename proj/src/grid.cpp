#include "critwave/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace critwave {

RadialGrid::RadialGrid(int n_points_, double dr_) : n_points(n_points_), dr(dr_) {
    if (n_points < 16) throw std::invalid_argument("RadialGrid: n_points must be >= 16");
    if (!(dr > 0.0) || !std::isfinite(dr)) throw std::invalid_argument("RadialGrid: dr must be positive");
}

int RadialGrid::index_at(double radius) const {
    int i = static_cast<int>(std::lround(radius / dr));
    return std::clamp(i, 0, n_points - 1);
}

bool RadialField::all_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

namespace {

void require_same_grid(const RadialField& f, const RadialField& g) {
    if (!(f.grid == g.grid)) throw std::invalid_argument("radial fields live on different grids");
}

// Composite Simpson weight for node i of n (n odd); trapezoid fallback.
inline double quad_weight(int i, int n, double dr) {
    if (n % 2 == 1) {
        if (i == 0 || i == n - 1) return dr / 3.0;
        return (i % 2 == 1) ? 4.0 * dr / 3.0 : 2.0 * dr / 3.0;
    }
    return (i == 0 || i == n - 1) ? 0.5 * dr : dr;
}

}  // namespace

double integrate_radial(const RadialField& f) {
    if (!f.all_finite()) throw std::invalid_argument("integrate_radial: non-finite field value");
    const int n = f.grid.n_points;
    const double dr = f.grid.dr;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = i * dr;
        acc += quad_weight(i, n, dr) * f[i] * r * r;
    }
    return 4.0 * M_PI * acc;
}

double inner(const RadialField& f, const RadialField& g) {
    require_same_grid(f, g);
    const int n = f.grid.n_points;
    const double dr = f.grid.dr;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = i * dr;
        acc += quad_weight(i, n, dr) * f[i] * g[i] * r * r;
    }
    const double out = 4.0 * M_PI * acc;
    if (!std::isfinite(out)) throw std::invalid_argument("inner: non-finite field value");
    return out;
}

RadialField derivative(const RadialField& f, int order) {
    if (order != 1 && order != 2) throw std::invalid_argument("derivative: order must be 1 or 2");
    const int n = f.grid.n_points;
    const double dr = f.grid.dr;
    RadialField out(f.grid);
    out.even_origin = !f.even_origin;  // parity flips under one derivative
    if (order == 2) out.even_origin = f.even_origin;

    // virtual node f(-dr) from the parity extension
    const double fm1 = f.even_origin ? f[1] : -f[1];
    if (order == 1) {
        out[0] = (f[1] - fm1) / (2.0 * dr);
        for (int i = 1; i < n - 1; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * dr);
        out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dr);
    } else {
        out[0] = (f[1] - 2.0 * f[0] + fm1) / (dr * dr);
        for (int i = 1; i < n - 1; ++i) out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (dr * dr);
        out[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / (dr * dr);
    }
    return out;
}

RadialField radial_laplacian(const RadialField& f) {
    const RadialField d1 = derivative(f, 1);
    const RadialField d2 = derivative(f, 2);
    const int n = f.grid.n_points;
    RadialField out(f.grid);
    out[0] = 3.0 * d2[0];  // limit of f'' + (2/r) f' for even f
    for (int i = 1; i < n; ++i) out[i] = d2[i] + 2.0 / (i * f.grid.dr) * d1[i];
    return out;
}

FieldNorms norms(const RadialField& f) {
    if (!f.all_finite()) throw std::invalid_argument("norms: non-finite field value");
    FieldNorms out;
    out.l2 = std::sqrt(std::max(0.0, inner(f, f)));
    const RadialField d1 = derivative(f, 1);
    out.h1_seminorm = std::sqrt(std::max(0.0, inner(d1, d1)));
    const RadialField lap = radial_laplacian(f);
    out.h2 = std::sqrt(std::max(0.0, inner(lap, lap)));
    out.sup = 0.0;
    for (double v : f.values) out.sup = std::max(out.sup, std::fabs(v));
    return out;
}

void write_field_csv(const std::string& path, const RadialField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << "r,value\n";
    char buf[64];
    for (int i = 0; i < f.grid.n_points; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", f.grid.r(i), f[i]);
        os << buf;
    }
}

RadialField operator+(const RadialField& a, const RadialField& b) {
    require_same_grid(a, b);
    RadialField out = a;
    for (int i = 0; i < out.size(); ++i) out[i] += b[i];
    out.even_origin = a.even_origin && b.even_origin;
    return out;
}

RadialField operator-(const RadialField& a, const RadialField& b) {
    require_same_grid(a, b);
    RadialField out = a;
    for (int i = 0; i < out.size(); ++i) out[i] -= b[i];
    out.even_origin = a.even_origin && b.even_origin;
    return out;
}

RadialField operator*(double c, const RadialField& a) {
    RadialField out = a;
    for (double& v : out.values) v *= c;
    return out;
}

}  // namespace critwave
