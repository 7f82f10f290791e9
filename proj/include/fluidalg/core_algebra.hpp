#pragma once

// Finite-dimensional fluid algebra: a real vector space V = R^n carrying
//   {X,Y,Z} = sum T[i][j][k] X_i Y_j Z_k   alternating trilinear form
//   <X,Y>   = X^T L Y                      symmetric nondegenerate (linking)
//   (X,Y)   = X^T G Y                      positive definite (metric)
// and the curl operator D = G^-1 L defined by (DX,Y) = <X,Y>.

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/LU>

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace fluidalg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using VecRef = Eigen::Ref<const Eigen::VectorXd>;

/// One canonical sparse entry of the triple form. Requires i < j < k; the
/// other five orderings follow from full antisymmetry.
struct TripleEntry {
    int i = 0;
    int j = 0;
    int k = 0;
    double value = 0.0;

    friend bool operator==(const TripleEntry&, const TripleEntry&) = default;
};

/// Row-major n*n*n array with no symmetry assumed. Used for unvalidated input
/// and as the dense evaluation backend.
class DenseTriple {
public:
    DenseTriple() = default;
    explicit DenseTriple(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n, 0.0) {}

    int dim() const { return n_; }
    double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
    double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }
    std::span<const double> data() const { return data_; }

    /// Fills all six orderings of every canonical entry.
    static DenseTriple from_entries(int n, std::span<const TripleEntry> entries);

private:
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
    }

    int n_ = 0;
    std::vector<double> data_;
};

using TripleData = std::variant<DenseTriple, std::vector<TripleEntry>>;

/// Raw, unvalidated arrays of an algebra.
struct AlgebraArrays {
    int dim = 0;
    TripleData triple;
    Mat linking;
    Mat metric;
};

struct ValidationCheck {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

/// Outcome of validate(): one check per defining invariant, plus the raw
/// spectral quantities behind them.
struct ValidationReport {
    std::vector<ValidationCheck> checks;
    double antisymmetry_defect = 0.0;
    double linking_asymmetry = 0.0;
    double metric_asymmetry = 0.0;
    double metric_min_eigenvalue = 0.0;
    double metric_max_eigenvalue = 0.0;
    double linking_min_singular = 0.0;
    double linking_max_singular = 0.0;

    bool passed() const;
    std::string summary() const;
};

/// Relative thresholds for nondegeneracy of L and positivity of G.
inline constexpr double kLinkingSingularRatio = 1e-8;
inline constexpr double kMetricEigenRatio = 1e-10;
/// Above this size triple forms are kept sparse only.
inline constexpr int kDenseMaxDim = 64;
/// cond(L) above which inverse-curl results are flagged.
inline constexpr double kLinkingConditionWarning = 1e6;

/// Checks the three defining invariants. Throws StructuralError on shape
/// mismatch and DataError on non-finite entries; otherwise reports.
/// `tol` bounds the antisymmetry defect of T and the asymmetry of L and G,
/// each relative to max(1, max |entry|).
ValidationReport validate(const AlgebraArrays& arrays, double tol);

enum class TripleStorage { automatic, dense, sparse };

struct Conditioning {
    double metric_condition = 1.0;
    double linking_condition = 1.0;
};

/// A validated, immutable fluid algebra. Copies share the underlying data, so
/// values can be passed around freely and read from several threads.
class FluidAlgebra {
public:
    /// Validates and factorizes. Throws ValidationError when validate() fails.
    static FluidAlgebra create(const AlgebraArrays& arrays, double tol = 1e-12,
                               TripleStorage storage = TripleStorage::automatic);

    int dim() const;
    TripleStorage storage() const;
    std::span<const TripleEntry> triple_entries() const;
    const DenseTriple* dense_triple() const;
    const Mat& linking_matrix() const;
    const Mat& metric_matrix() const;
    /// Explicit D = G^-1 L, formed once from the Cholesky factor.
    const Mat& curl_matrix() const;
    double max_abs_triple() const;
    double max_abs_linking() const;
    const Conditioning& conditioning() const;
    const std::vector<std::string>& warnings() const;

    /// Same algebra with the triple form evaluated through the other backend.
    FluidAlgebra with_storage(TripleStorage storage) const;

    /// Evaluates {X,Y,Z} with the active backend.
    double triple(const VecRef& x, const VecRef& y, const VecRef& z) const;
    double triple_sparse(const VecRef& x, const VecRef& y, const VecRef& z) const;
    /// Requires dense storage to be available (dim <= 64).
    double triple_dense(const VecRef& x, const VecRef& y, const VecRef& z) const;

    /// c_m = sum_{i,j} T[i][j][m] X_i Y_j, i.e. the coordinates of the
    /// functional Z -> {X,Y,Z}.
    Vec contract(const VecRef& x, const VecRef& y) const;

    /// G^-1 c through the cached Cholesky factor.
    Vec solve_metric(const VecRef& c) const;
    /// L^-1 c through the cached LU factor.
    Vec solve_linking(const VecRef& c) const;

    /// Canonical sparse arrays, suitable for writing to file.
    AlgebraArrays arrays() const;

private:
    struct Data;
    explicit FluidAlgebra(std::shared_ptr<const Data> data);
    void check_dim(const VecRef& v) const;

    std::shared_ptr<const Data> data_;
};

enum class StateRole { velocity, vorticity, probe };

/// An element of V tagged with how it is being used.
struct StateVector {
    Vec coords;
    StateRole role = StateRole::velocity;
};

/// Throws StructuralError on length mismatch, DataError on non-finite entries.
void check_state(const FluidAlgebra& alg, const VecRef& coords);

double triple(const FluidAlgebra& alg, const VecRef& x, const VecRef& y, const VecRef& z);
double linking(const FluidAlgebra& alg, const VecRef& x, const VecRef& y);
double metric_inner(const FluidAlgebra& alg, const VecRef& x, const VecRef& y);
double energy(const FluidAlgebra& alg, const VecRef& x);
/// (X, DX), evaluated as X^T L X.
double helicity(const FluidAlgebra& alg, const VecRef& x);
/// sqrt((X,X)).
double g_norm(const FluidAlgebra& alg, const VecRef& x);
/// sqrt(r^T G^-1 r) for a covector r.
double g_dual_norm(const FluidAlgebra& alg, const VecRef& r);

/// D X = G^-1 L X.
Vec curl(const FluidAlgebra& alg, const VecRef& x);
/// D' Y = L^-1 G Y.
Vec inverse_curl(const FluidAlgebra& alg, const VecRef& y);

}  // namespace fluidalg
