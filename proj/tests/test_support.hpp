#pragma once

// Independent oracles shared by the test suites. Nothing here calls the
// evaluation paths it is used to check.

#include "fluidalg/core_algebra.hpp"
#include "fluidalg/rng.hpp"

#include <array>
#include <cmath>

namespace fluidalg::testing {

inline Vec normal_vector(Xoshiro256StarStar& rng, int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
}

/// Random vector of unit metric norm, normalized with the raw matrix.
inline Vec unit_vector(const FluidAlgebra& alg, Xoshiro256StarStar& rng) {
    Vec v = normal_vector(rng, alg.dim());
    return v / std::sqrt(v.dot(alg.metric_matrix() * v));
}

/// {X,Y,Z} by explicit expansion over all six orderings of each canonical
/// entry, with signs of the permutation.
inline double permutation_sum_triple(const FluidAlgebra& alg, const Vec& x, const Vec& y, const Vec& z) {
    static const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}}};
    static const std::array<double, 6> signs{1, 1, 1, -1, -1, -1};
    double sum = 0.0;
    for (const auto& e : alg.triple_entries()) {
        const std::array<int, 3> idx{e.i, e.j, e.k};
        for (int p = 0; p < 6; ++p) {
            sum += signs[p] * e.value * x[idx[perms[p][0]]] * y[idx[perms[p][1]]] * z[idx[perms[p][2]]];
        }
    }
    return sum;
}

/// |T| max times product of metric norms, computed from the raw matrices.
inline double oracle_scale(const FluidAlgebra& alg, std::initializer_list<Vec> vs) {
    double s = 0.0;
    for (const auto& e : alg.triple_entries()) s = std::max(s, std::abs(e.value));
    for (const auto& v : vs) s *= std::sqrt(v.dot(alg.metric_matrix() * v));
    return s;
}

inline double cross_component(const Vec& a, const Vec& b, int m) {
    const int i = (m + 1) % 3, j = (m + 2) % 3;
    return a[i] * b[j] - a[j] * b[i];
}

inline Vec cross(const Vec& a, const Vec& b) {
    Vec c(3);
    for (int m = 0; m < 3; ++m) c[m] = cross_component(a, b, m);
    return c;
}

inline Vec vec3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

}  // namespace fluidalg::testing
