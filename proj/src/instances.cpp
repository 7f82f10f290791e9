#include "fluidalg/instances.hpp"

#include "fluidalg/errors.hpp"
#include "fluidalg/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <tuple>

namespace fluidalg {

namespace {

double levi_civita(int i, int j, int k) {
    return static_cast<double>((i - j) * (j - k) * (k - i)) / 2.0;
}

Mat normal_matrix(Xoshiro256StarStar& rng, int rows, int cols) {
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = rng.normal();
    return m;
}

}  // namespace

void validate_lie_input(const LieAlgebraInput& input) {
    const int n = input.dim;
    if (n <= 0) throw StructuralError("Lie algebra dim must be positive");
    if (input.structure_constants.dim() != n) throw StructuralError("structure constants must be n x n x n");
    if (input.pairing.rows() != n || input.pairing.cols() != n) throw StructuralError("pairing must be n x n");
    if (input.metric.rows() != n || input.metric.cols() != n) throw StructuralError("metric must be n x n");
    const DenseTriple& c = input.structure_constants;
    for (double v : c.data())
        if (!std::isfinite(v)) throw DataError("structure constants contain non-finite entries");
    if (!input.pairing.allFinite()) throw DataError("pairing contains non-finite entries");

    double c_max = 0.0;
    for (double v : c.data()) c_max = std::max(c_max, std::abs(v));
    const double p_max = input.pairing.cwiseAbs().maxCoeff();
    const double threshold = 1e-10 * std::max(c_max * p_max, std::numeric_limits<double>::min());

    double worst = 0.0;
    std::array<int, 3> where{};
    std::string what;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const double skew = std::abs(c(i, j, k) + c(j, i, k)) * p_max;
                if (skew > worst) {
                    worst = skew;
                    where = {i, j, k};
                    what = "bracket antisymmetry";
                }
                // P([e_i, e_j], e_k) + P(e_j, [e_i, e_k])
                double inv = 0.0;
                for (int m = 0; m < n; ++m) {
                    inv += c(i, j, m) * input.pairing(m, k) + c(i, k, m) * input.pairing(j, m);
                }
                if (std::abs(inv) > worst) {
                    worst = std::abs(inv);
                    where = {i, j, k};
                    what = "pairing invariance";
                }
            }
    if (worst > threshold) {
        std::ostringstream os;
        os << "Lie input rejected: " << what << " violated by " << worst << " (threshold " << threshold
           << ") at basis triple (" << where[0] << ", " << where[1] << ", " << where[2] << ")";
        throw ValidationError(os.str());
    }
}

FluidAlgebra from_lie_algebra(const LieAlgebraInput& input) {
    validate_lie_input(input);
    const int n = input.dim;
    DenseTriple t(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double v = 0.0;
                for (int m = 0; m < n; ++m) v += input.structure_constants(i, j, m) * input.pairing(m, k);
                t(i, j, k) = v;
            }
    // Full antisymmetry follows from invariance; create() re-validates it.
    return FluidAlgebra::create(AlgebraArrays{n, std::move(t), input.pairing, input.metric}, 1e-10);
}

LieAlgebraInput so3_input(const Mat& metric) {
    LieAlgebraInput in;
    in.dim = 3;
    in.structure_constants = DenseTriple(3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) in.structure_constants(i, j, k) = levi_civita(i, j, k);
    in.pairing = Mat::Identity(3, 3);
    in.metric = metric.size() == 0 ? Mat(Mat::Identity(3, 3)) : metric;
    return in;
}

LieAlgebraInput so3_pair_input(std::uint64_t seed) {
    constexpr int n = 6;
    Xoshiro256StarStar rng(seed);

    DenseTriple c(n);
    Mat p = Mat::Zero(n, n);
    for (int block = 0; block < 2; ++block) {
        const int o = 3 * block;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) c(o + i, o + j, o + k) = levi_civita(i, j, k);
        const double magnitude = 0.5 + rng.uniform();
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        p.block(o, o, 3, 3) = sign * magnitude * Mat::Identity(3, 3);
    }

    // New basis f_i = sum_a A(a,i) e_a.
    const Mat a = Mat::Identity(n, n) + 0.3 * normal_matrix(rng, n, n);
    const Mat a_inv = a.inverse();
    LieAlgebraInput in;
    in.dim = n;
    in.structure_constants = DenseTriple(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Vec bracket = Vec::Zero(n);  // [f_i, f_j] in the e basis
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y) {
                    const double w = a(x, i) * a(y, j);
                    if (w == 0.0) continue;
                    for (int m = 0; m < n; ++m) bracket[m] += w * c(x, y, m);
                }
            const Vec in_f = a_inv * bracket;
            for (int k = 0; k < n; ++k) in.structure_constants(i, j, k) = in_f[k];
        }
    in.pairing = a.transpose() * p * a;
    in.pairing = 0.5 * (in.pairing + in.pairing.transpose()).eval();
    const Mat m = normal_matrix(rng, n, n);
    in.metric = m.transpose() * m + n * Mat::Identity(n, n);
    return in;
}

FluidAlgebra rigid_body(double i1, double i2, double i3) {
    if (!(i1 > 0.0 && i2 > 0.0 && i3 > 0.0)) {
        throw ValidationError("rigid body moments of inertia must be positive");
    }
    return from_lie_algebra(so3_input(Eigen::Vector3d(i1, i2, i3).asDiagonal().toDenseMatrix()));
}

FluidAlgebra abelian(const Mat& linking, const Mat& metric) {
    const int n = static_cast<int>(linking.rows());
    return FluidAlgebra::create(AlgebraArrays{n, std::vector<TripleEntry>{}, linking, metric});
}

// ---------------------------------------------------------------------------
// Flat torus

const std::array<double, 3>& TorusBasis::frame(int p) const {
    return frames[wave_index(p)][modes[p].polarization - 1];
}

std::vector<std::array<int, 3>> half_lattice(int cutoff) {
    std::vector<std::array<int, 3>> out;
    for (int x = -cutoff; x <= cutoff; ++x)
        for (int y = -cutoff; y <= cutoff; ++y)
            for (int z = -cutoff; z <= cutoff; ++z) {
                const bool positive = x > 0 || (x == 0 && (y > 0 || (y == 0 && z > 0)));
                if (positive) out.push_back({x, y, z});
            }
    return out;
}

std::array<std::array<double, 3>, 2> polarization_frame(const std::array<int, 3>& k) {
    const Eigen::Vector3d kv(k[0], k[1], k[2]);
    Eigen::Vector3d u = Eigen::Vector3d::Zero();
    for (int axis = 0; axis < 3; ++axis) {
        Eigen::Vector3d cand = Eigen::Vector3d::Unit(axis);
        if (kv.cross(cand).squaredNorm() > 0.0) {
            u = cand;
            break;
        }
    }
    const Eigen::Vector3d e1 = kv.cross(u).normalized();
    const Eigen::Vector3d e2 = kv.normalized().cross(e1);
    return {{{e1[0], e1[1], e1[2]}, {e2[0], e2[1], e2[2]}}};
}

namespace {

using Wave = std::array<int, 3>;

Wave canonical(Wave k) {
    const bool positive = k[0] > 0 || (k[0] == 0 && (k[1] > 0 || (k[1] == 0 && k[2] > 0)));
    if (!positive) k = {-k[0], -k[1], -k[2]};
    return k;
}

// Integral over the unit torus of phase_p(2 pi k_p.x) phase_q(...) phase_r(...).
// Expanding each factor into exponentials leaves only sign patterns with
// s_p k_p + s_q k_q + s_r k_r = 0.
double trig_triple_integral(const std::array<const TorusMode*, 3>& modes) {
    std::complex<double> total = 0.0;
    for (int mask = 0; mask < 8; ++mask) {
        std::array<int, 3> s{};
        for (int a = 0; a < 3; ++a) s[a] = (mask >> a) & 1 ? -1 : 1;
        bool resonant = true;
        for (int d = 0; d < 3 && resonant; ++d) {
            resonant = s[0] * modes[0]->k[d] + s[1] * modes[1]->k[d] + s[2] * modes[2]->k[d] == 0;
        }
        if (!resonant) continue;
        std::complex<double> term = 1.0;
        for (int a = 0; a < 3; ++a) {
            // cos = (e^{i} + e^{-i})/2, sin = (e^{i} - e^{-i})/(2i)
            term *= modes[a]->phase == Phase::cosine ? std::complex<double>(0.5, 0.0)
                                                     : std::complex<double>(0.0, -0.5 * s[a]);
        }
        total += term;
    }
    return total.real();
}

double frame_det(const std::array<double, 3>& a, const std::array<double, 3>& b, const std::array<double, 3>& c) {
    return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
           a[2] * (b[0] * c[1] - b[1] * c[0]);
}

}  // namespace

TorusAlgebra build_torus_algebra(int cutoff, int max_dim) {
    if (cutoff < 1) throw ConfigError("torus cutoff K must be >= 1");
    TorusBasis basis;
    basis.cutoff = cutoff;
    basis.wavevectors = half_lattice(cutoff);
    const int n = 4 * static_cast<int>(basis.wavevectors.size());
    if (n > max_dim) {
        throw SizeError("torus algebra with K=" + std::to_string(cutoff) + " has dimension " + std::to_string(n) +
                        ", above the cap of " + std::to_string(max_dim));
    }
    std::map<Wave, int> wave_index;
    for (std::size_t w = 0; w < basis.wavevectors.size(); ++w) {
        const Wave& k = basis.wavevectors[w];
        wave_index[k] = static_cast<int>(w);
        basis.frames.push_back(polarization_frame(k));
        for (int a = 1; a <= 2; ++a) {
            basis.modes.push_back({k, a, Phase::cosine});
            basis.modes.push_back({k, a, Phase::sine});
        }
    }

    // curl(sqrt2 cos e1) = -kappa sqrt2 sin e2, curl(sqrt2 cos e2) = kappa sqrt2 sin e1,
    // curl(sqrt2 sin e1) = kappa sqrt2 cos e2, curl(sqrt2 sin e2) = -kappa sqrt2 cos e1.
    Mat linking = Mat::Zero(n, n);
    for (std::size_t w = 0; w < basis.wavevectors.size(); ++w) {
        const Wave& k = basis.wavevectors[w];
        const double kappa =
            2.0 * std::numbers::pi * std::sqrt(static_cast<double>(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]));
        const int cos1 = 4 * static_cast<int>(w), sin1 = cos1 + 1, cos2 = cos1 + 2, sin2 = cos1 + 3;
        linking(sin2, cos1) = linking(cos1, sin2) = -kappa;
        linking(sin1, cos2) = linking(cos2, sin1) = kappa;
    }

    // Resonant wavevector triples (unordered, possibly with repeats).
    std::set<std::array<int, 3>> wave_triples;
    const int n_waves = static_cast<int>(basis.wavevectors.size());
    for (int i = 0; i < n_waves; ++i)
        for (int j = i; j < n_waves; ++j)
            for (int s : {1, -1}) {
                const Wave& a = basis.wavevectors[i];
                const Wave& b = basis.wavevectors[j];
                const Wave third{a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]};
                if (third == Wave{0, 0, 0}) continue;
                const auto it = wave_index.find(canonical(third));
                if (it == wave_index.end()) continue;
                std::array<int, 3> tri{i, j, it->second};
                std::sort(tri.begin(), tri.end());
                wave_triples.insert(tri);
            }

    std::set<std::array<int, 3>> mode_triples;
    for (const auto& tri : wave_triples)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c) {
                    std::array<int, 3> m{4 * tri[0] + a, 4 * tri[1] + b, 4 * tri[2] + c};
                    std::sort(m.begin(), m.end());
                    if (m[0] == m[1] || m[1] == m[2]) continue;
                    mode_triples.insert(m);
                }

    std::vector<TripleEntry> entries;
    const double amplitude = 2.0 * std::numbers::sqrt2;  // (sqrt 2)^3
    for (const auto& m : mode_triples) {
        const double integral =
            trig_triple_integral({&basis.modes[m[0]], &basis.modes[m[1]], &basis.modes[m[2]]});
        if (integral == 0.0) continue;
        const double value = amplitude * integral * frame_det(basis.frame(m[0]), basis.frame(m[1]), basis.frame(m[2]));
        if (std::abs(value) > 1e-14) entries.push_back({m[0], m[1], m[2], value});
    }

    return TorusAlgebra{FluidAlgebra::create(AlgebraArrays{n, std::move(entries), linking, Mat::Identity(n, n)}),
                        std::move(basis)};
}

Vec torus_beltrami_state(const TorusBasis& basis, int shell_norm_sq, int sign) {
    // For each k: cos e2 + sin e1 has curl eigenvalue +kappa, cos e2 - sin e1 has -kappa.
    Vec x = Vec::Zero(basis.dim());
    bool any = false;
    for (std::size_t w = 0; w < basis.wavevectors.size(); ++w) {
        const Wave& k = basis.wavevectors[w];
        if (k[0] * k[0] + k[1] * k[1] + k[2] * k[2] != shell_norm_sq) continue;
        const int cos1 = 4 * static_cast<int>(w);
        x[cos1 + 2] = 1.0;
        x[cos1 + 1] = sign > 0 ? 1.0 : -1.0;
        any = true;
    }
    if (!any) throw ConfigError("no torus modes on shell |k|^2 = " + std::to_string(shell_norm_sq));
    return x / x.norm();
}

// ---------------------------------------------------------------------------

FluidAlgebra random_algebra(std::uint64_t seed, int n) {
    if (n < 1) throw ConfigError("random algebra dimension must be >= 1");
    Xoshiro256StarStar rng(seed);
    DenseTriple raw(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) raw(i, j, k) = rng.normal();
    std::vector<TripleEntry> entries;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                const double v = (raw(i, j, k) + raw(j, k, i) + raw(k, i, j) - raw(j, i, k) - raw(i, k, j) -
                                  raw(k, j, i)) /
                                 6.0;
                entries.push_back({i, j, k, v});
            }
    const Mat a = normal_matrix(rng, n, n);
    const Mat metric = a.transpose() * a + n * Mat::Identity(n, n);

    for (int attempt = 0; attempt < kRandomLinkingRetries; ++attempt) {
        Xoshiro256StarStar lrng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
        const Mat b = normal_matrix(lrng, n, n);
        const Mat linking = 0.5 * (b + b.transpose());
        Eigen::SelfAdjointEigenSolver<Mat> eig(linking, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().cwiseAbs().minCoeff() >= kRandomLinkingMinEigen) {
            return FluidAlgebra::create(AlgebraArrays{n, std::move(entries), linking, metric});
        }
    }
    throw GenerationError("random_algebra(seed=" + std::to_string(seed) + ", n=" + std::to_string(n) +
                          "): no admissible linking form after " + std::to_string(kRandomLinkingRetries) +
                          " attempts");
}

}  // namespace fluidalg
