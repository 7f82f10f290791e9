#include "fluidalg/dynamics.hpp"

#include "fluidalg/errors.hpp"

#include <algorithm>
#include <cmath>

namespace fluidalg {

namespace {

Vec checked(Vec v, const char* what) {
    if (!v.allFinite()) throw NumericalError(std::string(what) + " produced non-finite values");
    return v;
}

// G^-1 D^T b: the vector representing the covector W -> b^T D W.
Vec represent_through_curl(const FluidAlgebra& alg, const Vec& b) {
    return alg.solve_metric(alg.curl_matrix().transpose() * b);
}

}  // namespace

RhsEvaluation evaluate_euler_rhs(const FluidAlgebra& alg, const VecRef& x) {
    check_state(alg, x);
    RhsEvaluation out;
    const Vec dx = curl(alg, x);
    const Vec c = alg.contract(x, dx);
    out.value = checked(alg.solve_metric(c), "euler_rhs");
    out.stats = {1, 2, 0};
    return out;
}

Vec euler_rhs(const FluidAlgebra& alg, const VecRef& x) { return evaluate_euler_rhs(alg, x).value; }

Vec vorticity_rhs(const FluidAlgebra& alg, const VecRef& y) {
    check_state(alg, y);
    const Vec velocity = inverse_curl(alg, y);
    return checked(represent_through_curl(alg, alg.contract(velocity, y)), "vorticity_rhs");
}

Vec transport(const FluidAlgebra& alg, const VecRef& x, const VecRef& z) {
    check_state(alg, x);
    check_state(alg, z);
    return checked(represent_through_curl(alg, alg.contract(x, z)), "transport");
}

Vec induced_bracket(const FluidAlgebra& alg, const VecRef& x, const VecRef& y) {
    check_state(alg, x);
    check_state(alg, y);
    return checked(alg.solve_linking(alg.contract(x, y)), "induced_bracket");
}

Vec jacobiator(const FluidAlgebra& alg, const VecRef& x, const VecRef& y, const VecRef& z) {
    const Vec xy = induced_bracket(alg, x, y);
    const Vec yz = induced_bracket(alg, y, z);
    const Vec zx = induced_bracket(alg, z, x);
    return induced_bracket(alg, xy, z) + induced_bracket(alg, yz, x) + induced_bracket(alg, zx, y);
}

Vec circulation_defect(const FluidAlgebra& alg, const VecRef& f, const VecRef& x) {
    check_state(alg, f);
    check_state(alg, x);
    const Vec c = alg.contract(x, curl(alg, x));
    const Vec functional = alg.metric_matrix() * f - c;
    return checked(alg.curl_matrix().transpose() * functional, "circulation_defect");
}

double tensor_scale(const FluidAlgebra& alg, std::initializer_list<VecRef> vs) {
    double s = alg.max_abs_triple();
    for (const auto& v : vs) s *= g_norm(alg, v);
    return s;
}

double jacobi_scale(const FluidAlgebra& alg, const VecRef& x, const VecRef& y, const VecRef& z) {
    const double t = alg.max_abs_triple();
    return t * t * g_norm(alg, x) * g_norm(alg, y) * g_norm(alg, z);
}

double linking_scale(const FluidAlgebra& alg, const VecRef& x, const VecRef& y) {
    return alg.max_abs_linking() * g_norm(alg, x) * g_norm(alg, y);
}

double relative_difference(const FluidAlgebra& alg, const VecRef& a, const VecRef& b) {
    const double denom = std::max(g_norm(alg, a), g_norm(alg, b));
    if (denom == 0.0) return 0.0;
    const Vec diff = a - b;
    return g_norm(alg, diff) / denom;
}

}  // namespace fluidalg
