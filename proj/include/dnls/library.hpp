#pragma once

// Built-in model library: the systems used throughout the tests and
// shipped as model files under models/.

#include "dnls/model.hpp"

namespace dnls {

// i u_t + (1/2m) u_xx = lambda |u|^2 u.
CubicSystem single_nls(cplx lambda, double m = 1.0);

// Single equation with derivative coupling,
//   F = -i |u|^2 u - i |u_x|^2 u,
// whose symbol is -i (1 + xi^2) |Y|^2 Y.
CubicSystem dnls_single(double m = 1.0);

// Two-component model
//   L_{m1} u1 = lambda1 |u1|^2 u1 + nu1 conj(u1)^2 u2,
//   L_{m2} u2 = lambda2 |u2|^2 u2 + nu2 u1^3.
CubicSystem two_component(double m1, double m2, cplx lambda1, cplx lambda2,
                          cplx nu1, cplx nu2);

// Two-component derivative model
//   L_m  u1 = l1 |u1|^2 u1 + l2 conj(u1) (u1_x)^2 + i u2 d/dx(conj(u1)^2),
//   L_3m u2 = l3 |u2|^2 u2_x - i (|u2|^2 + |u2_x|^2) u2 - i d/dx(u1^3),
// with symbol
//   p1 = (l1 - l2 m^2 xi^2) |Y1|^2 Y1 + 2 m xi conj(Y1)^2 Y2,
//   p2 = i (3 l3 m xi - 1 - 9 m^2 xi^2) |Y2|^2 Y2 + 3 m xi Y1^3.
CubicSystem coupled_derivative(double m, cplx lambda1, cplx lambda2,
                               cplx lambda3);

// Three-component null-structure model
//   L_m  u1 = u2 d/dx(conj(u1) u2),
//   L_m  u2 = conj(u1) conj(u2) u3_x + 3 conj(u1) u3 conj(u2)_x,
//   L_3m u3 = 2 u1^2 u2_x - u2 d/dx(u1^2),
// whose symbol vanishes identically.
CubicSystem null_structure_three(double m);

}  // namespace dnls
