#pragma once

#include "fluidalg/core_algebra.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace fluidalg {

/// A Lie algebra with [e_i, e_j] = sum_k c[i][j][k] e_k, an invariant
/// symmetric nondegenerate pairing P and a free choice of metric.
struct LieAlgebraInput {
    int dim = 0;
    DenseTriple structure_constants;
    Mat pairing;
    Mat metric;
};

/// Throws ValidationError naming the worst basis triple when c is not
/// antisymmetric in (i,j) or P is not invariant, beyond 1e-10 * max|c| * max|P|.
void validate_lie_input(const LieAlgebraInput& input);

/// {X,Y,Z} = <[X,Y],Z>: T[i][j][k] = sum_m c[i][j][m] P[m][k], linking = P.
FluidAlgebra from_lie_algebra(const LieAlgebraInput& input);

/// so(3) with the cross product, P = I and the given metric (I if empty).
LieAlgebraInput so3_input(const Mat& metric = Mat());

/// so(3) + so(3) in a seeded random basis, with a seeded (possibly
/// indefinite) invariant pairing and a seeded metric.
LieAlgebraInput so3_pair_input(std::uint64_t seed);

/// so(3) with G = diag(I1, I2, I3): the free rigid body. Throws
/// ValidationError unless all moments are positive.
FluidAlgebra rigid_body(double i1, double i2, double i3);

/// Zero triple form with the given linking form and metric.
FluidAlgebra abelian(const Mat& linking, const Mat& metric);

enum class Phase { cosine, sine };

/// One real basis field sqrt(2) * phase(2 pi k.x) * e_a(k) on the unit torus.
struct TorusMode {
    std::array<int, 3> k{};
    int polarization = 1;  // 1 or 2
    Phase phase = Phase::cosine;
};

struct TorusBasis {
    int cutoff = 0;
    /// Half-lattice wavevectors in lexicographic order.
    std::vector<std::array<int, 3>> wavevectors;
    /// Frames e1(k), e2(k) per wavevector.
    std::vector<std::array<std::array<double, 3>, 2>> frames;
    /// Coordinate p = 4*w + 2*(polarization-1) + (phase == sine).
    std::vector<TorusMode> modes;

    int dim() const { return static_cast<int>(modes.size()); }
    int wave_index(int p) const { return p / 4; }
    const std::array<double, 3>& frame(int p) const;
};

inline constexpr int kDefaultTorusMaxDim = 512;

struct TorusAlgebra {
    FluidAlgebra algebra;
    TorusBasis basis;
};

/// Lexicographically positive wavevectors with 0 < |k|_inf <= cutoff.
std::vector<std::array<int, 3>> half_lattice(int cutoff);

/// Polarization frame for wavevector k: e1 = unit(k x u) with u the first
/// standard basis vector not parallel to k, e2 = (k/|k|) x e1.
std::array<std::array<double, 3>, 2> polarization_frame(const std::array<int, 3>& k);

/// Galerkin truncation of the divergence-free, zero-mean fields on the unit
/// flat torus to |k|_inf <= cutoff. metric = I, linking = <u, curl v>,
/// triple = integral of det(u, v, w), assembled from closed-form trig
/// integrals. Throws SizeError if 4 * |half lattice| > max_dim.
TorusAlgebra build_torus_algebra(int cutoff, int max_dim = kDefaultTorusMaxDim);

/// Unit-norm curl eigenfield on the shell |k|^2 = shell_norm_sq with
/// eigenvalue sign * 2 pi |k|; equal weight on every wavevector in the shell.
/// Throws ConfigError if the shell is empty.
Vec torus_beltrami_state(const TorusBasis& basis, int shell_norm_sq = 1, int sign = +1);

/// Seeded algebra satisfying every invariant: T is the antisymmetrization of
/// a normal array, G = A^T A + n I, L = (B + B^T)/2 resampled until
/// min |eig L| >= 0.1 (at most 16 tries). Draw order from
/// Xoshiro256StarStar(seed): n^3 entries of T row-major, then A row-major.
/// Attempt r of L draws B from Xoshiro256StarStar(derive_seed(seed, r)).
FluidAlgebra random_algebra(std::uint64_t seed, int n);

inline constexpr int kRandomLinkingRetries = 16;
inline constexpr double kRandomLinkingMinEigen = 0.1;

}  // namespace fluidalg
