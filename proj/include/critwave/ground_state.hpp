#pragma once

#include "critwave/grid.hpp"

namespace critwave {

// Dilation parameter of the soliton curve W_lambda(r) = sqrt(lambda) W(lambda r).
struct SolitonParams {
    double lambda = 1.0;
};

// W(r) = (1 + r^2/3)^(-1/2) and friends, pointwise.
double ground_state_value(double r, double lambda = 1.0);
double ground_state_dlambda_value(double r, double lambda = 1.0);
// Lambda W = r W' + W/2; also the zero-energy resonance profile (~ -sqrt(3)/(2r) tail).
double lambda_W_value(double r);

RadialField eval_W(const SolitonParams& p, const RadialGrid& grid);

// Analytic d/dlambda W_lambda; at lambda = 1 equals apply_Lambda(eval_W(1)).
RadialField eval_dlambda_W(const SolitonParams& p, const RadialGrid& grid);

// Lambda = r d/dr + 1/2 (scaling generator).
RadialField apply_Lambda(const RadialField& f);

// Adjoint in the R^3 pairing: Lambda^* = -r d/dr - 5/2.
RadialField adjoint_Lambda(const RadialField& f);

// V_lambda = -5 W_lambda^4.
RadialField potential_V(const SolitonParams& p, const RadialGrid& grid);

// Analytic d/dlambda V_lambda = -20 W_lambda^3 dW_lambda/dlambda.
RadialField eval_dlambda_V(const SolitonParams& p, const RadialGrid& grid);

// N(v, W_a) = (v+W_a)^5 - W_a^5 - 5 W_a^4 v; quadratic and higher in v.
RadialField nonlinear_remainder(const RadialField& v, const SolitonParams& p);

// Conserved energy 4*pi*int (u_t^2/2 + u_r^2/2 - u^6/6) r^2 dr. The gradient
// term is accumulated in the w = r*u frame (trapezoid), which is exact for
// the continuum integral under w(0)=0 and absorbs the w(r_max)^2/r_max
// boundary flux of slowly decaying profiles; this is the same discrete
// functional the time stepper conserves.
double energy(const WaveState& s);

}  // namespace critwave
