#pragma once

#include <array>
#include <string>
#include <vector>

namespace critwave {

// Uniform radial mesh r_i = i*dr, i = 0 .. n_points-1. Small value type,
// cheap to copy; fields compare grids for compatibility.
struct RadialGrid {
    int n_points = 0;
    double dr = 0.0;

    RadialGrid() = default;
    RadialGrid(int n_points_, double dr_);

    double r(int i) const { return i * dr; }
    double r_max() const { return (n_points - 1) * dr; }
    // nearest node index for a radius, clamped to the mesh
    int index_at(double radius) const;

    bool operator==(const RadialGrid&) const = default;
};

// Samples f(r_i) of a radial profile. even_origin marks fields with the
// even-extension regularity f'(0) = 0 across r = 0; the solver's odd
// auxiliary w = r*u is handled internally and never surfaces here.
struct RadialField {
    RadialGrid grid;
    std::vector<double> values;
    bool even_origin = true;

    RadialField() = default;
    explicit RadialField(const RadialGrid& g, double fill = 0.0)
        : grid(g), values(static_cast<size_t>(g.n_points), fill) {}

    int size() const { return static_cast<int>(values.size()); }
    double& operator[](int i) { return values[static_cast<size_t>(i)]; }
    double operator[](int i) const { return values[static_cast<size_t>(i)]; }
    bool all_finite() const;
};

// A pair (u, u_t) at time t; the solver's unit of evolution.
struct WaveState {
    RadialField u;
    RadialField ut;
    double t = 0.0;
};

struct FieldNorms {
    double l2 = 0.0;
    double h1_seminorm = 0.0;
    double h2 = 0.0;  // L2 norm of the discrete radial Laplacian f'' + (2/r) f'
    double sup = 0.0;
};

// 4*pi * sum w_i f_i r_i^2, composite Simpson weights (trapezoid fallback
// when n_points is even). Exact for cubics on each Simpson panel.
double integrate_radial(const RadialField& f);

// <f,g> = integrate_radial(f*g); realizes all R^3 pairings used here.
double inner(const RadialField& f, const RadialField& g);

FieldNorms norms(const RadialField& f);

// Centered second-order stencils; even extension across r = 0 (or odd when
// even_origin is false), one-sided second-order stencil at r_max.
RadialField derivative(const RadialField& f, int order);

// Discrete radial Laplacian f'' + (2/r) f' with the r=0 limit 3 f''(0).
RadialField radial_laplacian(const RadialField& f);

// "r,value" CSV, one node per row, 17 significant digits.
void write_field_csv(const std::string& path, const RadialField& f);

// Pointwise helpers (shared grid enforced).
RadialField operator+(const RadialField& a, const RadialField& b);
RadialField operator-(const RadialField& a, const RadialField& b);
RadialField operator*(double c, const RadialField& a);

}  // namespace critwave
