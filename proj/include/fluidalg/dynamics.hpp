#pragma once

// Vector fields and diagnostics derived from a fluid algebra:
//   Euler flow          (dX/dt, Z) = {X, DX, Z}
//   vorticity flow      (dY/dt, Z) = {D'Y, Y, DZ}
//   transport           (T(X,Z), W) = {X, Z, DW}
//   induced bracket     <[X,Y], Z>  = {X, Y, Z}
//
// Every vector is returned in velocity coordinates. Residual norms use the
// metric: sqrt(v^T G v) for vectors, sqrt(r^T G^-1 r) for covectors.

#include "fluidalg/core_algebra.hpp"

#include <initializer_list>

namespace fluidalg {

struct RhsStats {
    int contractions = 0;
    int metric_solves = 0;
    int linking_solves = 0;
};

struct RhsEvaluation {
    Vec value;
    RhsStats stats;
};

RhsEvaluation evaluate_euler_rhs(const FluidAlgebra& alg, const VecRef& x);

/// V with (V, Z) = {X, DX, Z}; V = G^-1 c, c_m = sum T[i][j][m] X_i (DX)_j.
Vec euler_rhs(const FluidAlgebra& alg, const VecRef& x);

/// W with (W, Z) = {D'Y, Y, DZ}.
Vec vorticity_rhs(const FluidAlgebra& alg, const VecRef& y);

/// T(X, Z) = G^-1 D^T b, b_k = sum T[i][j][k] X_i Z_j.
Vec transport(const FluidAlgebra& alg, const VecRef& x, const VecRef& z);

/// [X, Y] = L^-1 b, b_k = sum T[i][j][k] X_i Y_j.
Vec induced_bracket(const FluidAlgebra& alg, const VecRef& x, const VecRef& y);

/// [[X,Y],Z] + [[Y,Z],X] + [[Z,X],Y].
Vec jacobiator(const FluidAlgebra& alg, const VecRef& x, const VecRef& y, const VecRef& z);

/// Coordinates of the covector Z -> (F, DZ) - {X, DX, DZ}, i.e.
/// D^T (G F - c). Vanishes iff F = euler_rhs(X).
Vec circulation_defect(const FluidAlgebra& alg, const VecRef& f, const VecRef& x);

/// max|T| times the product of the metric norms of `vs`.
double tensor_scale(const FluidAlgebra& alg, std::initializer_list<VecRef> vs);
/// max|T|^2 times the product of the metric norms; the Jacobiator is
/// quadratic in T.
double jacobi_scale(const FluidAlgebra& alg, const VecRef& x, const VecRef& y, const VecRef& z);
/// max|L| times the product of the metric norms, for identities that do not
/// involve the triple form.
double linking_scale(const FluidAlgebra& alg, const VecRef& x, const VecRef& y);
/// ||a - b||_G / max(||a||_G, ||b||_G); zero when both vanish.
double relative_difference(const FluidAlgebra& alg, const VecRef& a, const VecRef& b);

}  // namespace fluidalg
