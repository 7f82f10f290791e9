#include "fluidalg/core_algebra.hpp"

#include "fluidalg/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fluidalg {

DenseTriple DenseTriple::from_entries(int n, std::span<const TripleEntry> entries) {
    DenseTriple t(n);
    for (const auto& e : entries) {
        t(e.i, e.j, e.k) = e.value;
        t(e.j, e.k, e.i) = e.value;
        t(e.k, e.i, e.j) = e.value;
        t(e.j, e.i, e.k) = -e.value;
        t(e.i, e.k, e.j) = -e.value;
        t(e.k, e.j, e.i) = -e.value;
    }
    return t;
}

bool ValidationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << (c.pass ? "ok   " : "FAIL ") << c.name << ": measured " << c.measured << ", threshold "
           << c.threshold << '\n';
    }
    return os.str();
}

namespace {

void require_finite(const Mat& m, const char* what) {
    if (!m.allFinite()) throw DataError(std::string(what) + " contains non-finite entries");
}

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

struct TripleScan {
    double defect = 0.0;
    double max_abs = 0.0;
    bool canonical = true;
};

TripleScan scan_triple(int n, const DenseTriple& t) {
    TripleScan s;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            for (int c = 0; c < n; ++c) {
                const double v = t(a, b, c);
                if (!std::isfinite(v)) throw DataError("triple form contains non-finite entries");
                s.max_abs = std::max(s.max_abs, std::abs(v));
                if (a == b || b == c || a == c) {
                    s.defect = std::max(s.defect, std::abs(v));
                } else {
                    s.defect = std::max({s.defect, std::abs(v + t(b, a, c)), std::abs(v + t(a, c, b)),
                                         std::abs(v + t(c, b, a))});
                }
            }
        }
    }
    return s;
}

TripleScan scan_triple(int n, const std::vector<TripleEntry>& entries) {
    TripleScan s;
    const TripleEntry* prev = nullptr;
    for (const auto& e : entries) {
        if (std::min({e.i, e.j, e.k}) < 0 || std::max({e.i, e.j, e.k}) >= n) {
            throw StructuralError("triple entry index out of range for dim " + std::to_string(n));
        }
        if (!std::isfinite(e.value)) throw DataError("triple form contains non-finite entries");
        if (!(e.i < e.j && e.j < e.k)) s.canonical = false;
        if (prev && std::tie(prev->i, prev->j, prev->k) >= std::tie(e.i, e.j, e.k)) s.canonical = false;
        s.max_abs = std::max(s.max_abs, std::abs(e.value));
        prev = &e;
    }
    return s;
}

}  // namespace

ValidationReport validate(const AlgebraArrays& arrays, double tol) {
    const int n = arrays.dim;
    if (n <= 0) throw StructuralError("dim must be positive");
    if (arrays.linking.rows() != n || arrays.linking.cols() != n) {
        throw StructuralError("linking matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    }
    if (arrays.metric.rows() != n || arrays.metric.cols() != n) {
        throw StructuralError("metric matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    }
    require_finite(arrays.linking, "linking matrix");
    require_finite(arrays.metric, "metric matrix");

    ValidationReport r;
    TripleScan scan;
    if (const auto* dense = std::get_if<DenseTriple>(&arrays.triple)) {
        if (dense->dim() != n) throw StructuralError("triple array dimension does not match dim");
        scan = scan_triple(n, *dense);
    } else {
        scan = scan_triple(n, std::get<std::vector<TripleEntry>>(arrays.triple));
        r.checks.push_back({"triple canonical order (i<j<k, sorted, unique)", scan.canonical ? 0.0 : 1.0,
                            0.0, scan.canonical});
    }
    r.antisymmetry_defect = scan.defect;
    r.checks.push_back({"triple antisymmetry", scan.defect, tol * std::max(1.0, scan.max_abs),
                        scan.defect <= tol * std::max(1.0, scan.max_abs)});

    const Mat& L = arrays.linking;
    const Mat& G = arrays.metric;
    r.linking_asymmetry = max_abs(L - L.transpose());
    r.metric_asymmetry = max_abs(G - G.transpose());
    const double l_tol = tol * std::max(1.0, max_abs(L));
    const double g_tol = tol * std::max(1.0, max_abs(G));
    r.checks.push_back({"linking symmetry", r.linking_asymmetry, l_tol, r.linking_asymmetry <= l_tol});
    r.checks.push_back({"metric symmetry", r.metric_asymmetry, g_tol, r.metric_asymmetry <= g_tol});

    const Mat l_sym = 0.5 * (L + L.transpose());
    const Mat g_sym = 0.5 * (G + G.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> l_eig(l_sym, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Mat> g_eig(g_sym, Eigen::EigenvaluesOnly);
    const Vec l_abs = l_eig.eigenvalues().cwiseAbs();
    r.linking_min_singular = l_abs.minCoeff();
    r.linking_max_singular = l_abs.maxCoeff();
    r.metric_min_eigenvalue = g_eig.eigenvalues().minCoeff();
    r.metric_max_eigenvalue = g_eig.eigenvalues().maxCoeff();

    const double l_floor = kLinkingSingularRatio * r.linking_max_singular;
    r.checks.push_back({"linking nondegenerate (min singular value)", r.linking_min_singular, l_floor,
                        r.linking_max_singular > 0.0 && r.linking_min_singular >= l_floor});
    const double g_floor = kMetricEigenRatio * std::abs(r.metric_max_eigenvalue);
    r.checks.push_back({"metric positive definite (min eigenvalue)", r.metric_min_eigenvalue, g_floor,
                        r.metric_max_eigenvalue > 0.0 && r.metric_min_eigenvalue > g_floor});
    return r;
}

struct FluidAlgebra::Data {
    int dim = 0;
    TripleStorage storage = TripleStorage::sparse;
    std::vector<TripleEntry> entries;
    std::shared_ptr<const DenseTriple> dense;
    Mat linking;
    Mat metric;
    Mat curl;
    Eigen::LLT<Mat> metric_factor;
    Eigen::PartialPivLU<Mat> linking_factor;
    double max_abs_triple = 0.0;
    double max_abs_linking = 0.0;
    Conditioning conditioning;
    std::vector<std::string> warnings;
};

FluidAlgebra::FluidAlgebra(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

FluidAlgebra FluidAlgebra::create(const AlgebraArrays& arrays, double tol, TripleStorage storage) {
    const ValidationReport report = validate(arrays, tol);
    if (!report.passed()) throw ValidationError("algebra failed validation:\n" + report.summary());

    auto d = std::make_shared<Data>();
    const int n = arrays.dim;
    d->dim = n;
    if (const auto* dense = std::get_if<DenseTriple>(&arrays.triple)) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                for (int k = j + 1; k < n; ++k)
                    if ((*dense)(i, j, k) != 0.0) d->entries.push_back({i, j, k, (*dense)(i, j, k)});
    } else {
        for (const auto& e : std::get<std::vector<TripleEntry>>(arrays.triple))
            if (e.value != 0.0) d->entries.push_back(e);
    }
    for (const auto& e : d->entries) d->max_abs_triple = std::max(d->max_abs_triple, std::abs(e.value));

    if (storage == TripleStorage::automatic) {
        storage = n <= kDenseMaxDim ? TripleStorage::dense : TripleStorage::sparse;
    }
    d->storage = storage;
    if (n <= kDenseMaxDim || storage == TripleStorage::dense) {
        d->dense = std::make_shared<const DenseTriple>(DenseTriple::from_entries(n, d->entries));
    }

    // Exact symmetry, so that (X,Y) and <X,Y> are symmetric to the last bit.
    d->linking = 0.5 * (arrays.linking + arrays.linking.transpose());
    d->metric = 0.5 * (arrays.metric + arrays.metric.transpose());
    d->max_abs_linking = max_abs(d->linking);
    d->metric_factor.compute(d->metric);
    d->linking_factor.compute(d->linking);
    d->curl = d->metric_factor.solve(d->linking);
    d->conditioning.metric_condition = report.metric_max_eigenvalue / report.metric_min_eigenvalue;
    d->conditioning.linking_condition = report.linking_max_singular / report.linking_min_singular;
    if (d->conditioning.linking_condition > kLinkingConditionWarning) {
        std::ostringstream os;
        os << "linking form is ill-conditioned (cond " << d->conditioning.linking_condition
           << "); inverse curl and induced bracket may lose accuracy";
        d->warnings.push_back(os.str());
    }
    return FluidAlgebra(std::move(d));
}

FluidAlgebra FluidAlgebra::with_storage(TripleStorage storage) const {
    auto d = std::make_shared<Data>(*data_);
    if (storage == TripleStorage::automatic) {
        storage = d->dim <= kDenseMaxDim ? TripleStorage::dense : TripleStorage::sparse;
    }
    if (storage == TripleStorage::dense && !d->dense) {
        d->dense = std::make_shared<const DenseTriple>(DenseTriple::from_entries(d->dim, d->entries));
    }
    d->storage = storage;
    return FluidAlgebra(std::move(d));
}

int FluidAlgebra::dim() const { return data_->dim; }
TripleStorage FluidAlgebra::storage() const { return data_->storage; }
std::span<const TripleEntry> FluidAlgebra::triple_entries() const { return data_->entries; }
const DenseTriple* FluidAlgebra::dense_triple() const { return data_->dense.get(); }
const Mat& FluidAlgebra::linking_matrix() const { return data_->linking; }
const Mat& FluidAlgebra::metric_matrix() const { return data_->metric; }
const Mat& FluidAlgebra::curl_matrix() const { return data_->curl; }
double FluidAlgebra::max_abs_triple() const { return data_->max_abs_triple; }
double FluidAlgebra::max_abs_linking() const { return data_->max_abs_linking; }
const Conditioning& FluidAlgebra::conditioning() const { return data_->conditioning; }
const std::vector<std::string>& FluidAlgebra::warnings() const { return data_->warnings; }

void FluidAlgebra::check_dim(const VecRef& v) const {
    if (v.size() != data_->dim) {
        throw StructuralError("vector of length " + std::to_string(v.size()) + " used with algebra of dim " +
                              std::to_string(data_->dim));
    }
}

double FluidAlgebra::triple(const VecRef& x, const VecRef& y, const VecRef& z) const {
    return data_->storage == TripleStorage::dense ? triple_dense(x, y, z) : triple_sparse(x, y, z);
}

namespace {

double sorted_product(double a, double b, double c) {
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    return (a * b) * c;
}

double sorted_sum(double a, double b, double c) {
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    return (a + b) + c;
}

// Determinant of the 3x3 minor on rows (i, j, k). Each product is formed
// from its sorted factors and each signed half is summed in sorted order, so
// two equal arguments give exactly zero.
double exact_det3(const VecRef& x, const VecRef& y, const VecRef& z, int i, int j, int k) {
    const double even = sorted_sum(sorted_product(x[i], y[j], z[k]), sorted_product(x[j], y[k], z[i]),
                                   sorted_product(x[k], y[i], z[j]));
    const double odd = sorted_sum(sorted_product(x[j], y[i], z[k]), sorted_product(x[i], y[k], z[j]),
                                  sorted_product(x[k], y[j], z[i]));
    return even - odd;
}

}  // namespace

double FluidAlgebra::triple_sparse(const VecRef& x, const VecRef& y, const VecRef& z) const {
    check_dim(x);
    check_dim(y);
    check_dim(z);
    double sum = 0.0;
    for (const auto& e : data_->entries) {
        sum += e.value * exact_det3(x, y, z, e.i, e.j, e.k);
    }
    return sum;
}

double FluidAlgebra::triple_dense(const VecRef& x, const VecRef& y, const VecRef& z) const {
    check_dim(x);
    check_dim(y);
    check_dim(z);
    if (!data_->dense) throw StructuralError("dense triple storage is not available for this algebra");
    const DenseTriple& t = *data_->dense;
    const int n = data_->dim;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double inner = 0.0;
            for (int k = 0; k < n; ++k) inner += t(i, j, k) * z[k];
            sum += x[i] * y[j] * inner;
        }
    }
    return sum;
}

Vec FluidAlgebra::contract(const VecRef& x, const VecRef& y) const {
    check_dim(x);
    check_dim(y);
    const int n = data_->dim;
    Vec c = Vec::Zero(n);
    if (data_->storage == TripleStorage::dense) {
        const DenseTriple& t = *data_->dense;
        const auto flat = t.data();
        for (int i = 0; i < n; ++i) {
            if (x[i] == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                const double w = x[i] * y[j];
                if (w == 0.0) continue;
                const double* row = flat.data() + (static_cast<std::size_t>(i) * n + j) * n;
                for (int m = 0; m < n; ++m) c[m] += row[m] * w;
            }
        }
        return c;
    }
    for (const auto& e : data_->entries) {
        const int i = e.i, j = e.j, k = e.k;
        c[k] += e.value * (x[i] * y[j] - x[j] * y[i]);
        c[j] -= e.value * (x[i] * y[k] - x[k] * y[i]);
        c[i] += e.value * (x[j] * y[k] - x[k] * y[j]);
    }
    return c;
}

Vec FluidAlgebra::solve_metric(const VecRef& c) const {
    check_dim(c);
    return data_->metric_factor.solve(c);
}

Vec FluidAlgebra::solve_linking(const VecRef& c) const {
    check_dim(c);
    return data_->linking_factor.solve(c);
}

AlgebraArrays FluidAlgebra::arrays() const {
    return AlgebraArrays{data_->dim, data_->entries, data_->linking, data_->metric};
}

void check_state(const FluidAlgebra& alg, const VecRef& coords) {
    if (coords.size() != alg.dim()) {
        throw StructuralError("state of length " + std::to_string(coords.size()) + " used with algebra of dim " +
                              std::to_string(alg.dim()));
    }
    if (!coords.allFinite()) throw DataError("state contains non-finite entries");
}

double triple(const FluidAlgebra& alg, const VecRef& x, const VecRef& y, const VecRef& z) {
    return alg.triple(x, y, z);
}

double linking(const FluidAlgebra& alg, const VecRef& x, const VecRef& y) {
    check_state(alg, x);
    check_state(alg, y);
    return x.dot(alg.linking_matrix() * y);
}

double metric_inner(const FluidAlgebra& alg, const VecRef& x, const VecRef& y) {
    check_state(alg, x);
    check_state(alg, y);
    return x.dot(alg.metric_matrix() * y);
}

double energy(const FluidAlgebra& alg, const VecRef& x) { return metric_inner(alg, x, x); }

double helicity(const FluidAlgebra& alg, const VecRef& x) { return linking(alg, x, x); }

double g_norm(const FluidAlgebra& alg, const VecRef& x) { return std::sqrt(std::max(0.0, energy(alg, x))); }

double g_dual_norm(const FluidAlgebra& alg, const VecRef& r) {
    return std::sqrt(std::max(0.0, r.dot(alg.solve_metric(r))));
}

Vec curl(const FluidAlgebra& alg, const VecRef& x) {
    check_state(alg, x);
    return alg.solve_metric(alg.linking_matrix() * x);
}

Vec inverse_curl(const FluidAlgebra& alg, const VecRef& y) {
    check_state(alg, y);
    return alg.solve_linking(alg.metric_matrix() * y);
}

}  // namespace fluidalg
