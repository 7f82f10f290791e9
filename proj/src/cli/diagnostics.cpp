#include "fluidalg/cli/diagnostics.hpp"

#include "fluidalg/dynamics.hpp"
#include "fluidalg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fluidalg::cli {

namespace {

enum Id {
    alternating,
    helicity_forms,
    curl_relation,
    curl_self_adjoint,
    curl_round_trip,
    energy_orthogonality,
    helicity_orthogonality,
    transport_vs_curl_euler,
    transport_vs_vorticity,
    transport_antisymmetry,
    bracket_antisymmetry,
    bracket_compatibility,
    circulation_identity,
    circulation_defect_zero,
    jacobiator_id,
    id_count
};

// Defect relative to a scale; a zero scale demands an exactly zero defect.
double ratio(double defect, double scale) {
    defect = std::abs(defect);
    if (scale > 0.0) return defect / scale;
    return defect == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

double antisymmetry_gap(const FluidAlgebra& alg, const Vec& a, const Vec& b) {
    const double denom = std::max(g_norm(alg, a), g_norm(alg, b));
    const Vec sum = a + b;
    return denom == 0.0 ? g_norm(alg, sum) : g_norm(alg, sum) / denom;
}

Vec unit_state(const FluidAlgebra& alg, Xoshiro256StarStar& rng) {
    Vec x(alg.dim());
    for (int i = 0; i < alg.dim(); ++i) x[i] = rng.normal();
    return x / g_norm(alg, x);
}

}  // namespace

const std::vector<std::string>& identity_names() {
    static const std::vector<std::string> names{
        "triple_alternating",
        "helicity_forms_agree",
        "curl_defining_relation",
        "curl_self_adjoint",
        "curl_inverse_round_trip",
        "euler_rhs_energy_orthogonality",
        "euler_rhs_helicity_orthogonality",
        "curl_euler_rhs_equals_transport",
        "transport_equals_vorticity_rhs",
        "transport_antisymmetry",
        "bracket_antisymmetry",
        "bracket_triple_compatibility",
        "circulation_differential_identity",
        "circulation_defect_zero_at_euler_rhs",
        "jacobiator",
    };
    return names;
}

bool DiagnosticsReport::passed() const {
    return std::all_of(identities.begin(), identities.end(),
                       [](const auto& r) { return !r.tolerance_bearing || r.pass; });
}

nlohmann::ordered_json DiagnosticsReport::to_json() const {
    nlohmann::ordered_json j;
    j["passed"] = passed();
    nlohmann::ordered_json algebra;
    algebra["dim"] = dim;
    algebra["metric_condition"] = metric_condition;
    algebra["linking_condition"] = linking_condition;
    algebra["jacobiator"] = {{"samples", jacobi.samples},
                             {"max", jacobi.max},
                             {"mean", jacobi.mean},
                             {"min", jacobi.min},
                             {"fraction_above_1e-3", jacobi.fraction_above_1e3}};
    j["algebra"] = std::move(algebra);
    nlohmann::ordered_json ids = nlohmann::ordered_json::array();
    for (const auto& r : identities) {
        nlohmann::ordered_json e;
        e["name"] = r.name;
        // JSON has no infinity; an unbounded defect is written as null.
        e["max_defect"] = std::isfinite(r.max_defect) ? nlohmann::ordered_json(r.max_defect) : nullptr;
        e["tolerance"] = r.tolerance_bearing ? nlohmann::ordered_json(r.tolerance) : nullptr;
        e["status"] = !r.tolerance_bearing ? "info" : (r.pass ? "pass" : "fail");
        ids.push_back(std::move(e));
    }
    j["identities"] = std::move(ids);
    j["warnings"] = warnings;
    return j;
}

DiagnosticsReport run_diagnostics(const FluidAlgebra& alg, bool lie, std::uint64_t seed, int samples) {
    samples = std::max(samples, 1);
    const bool invertible_enough = alg.conditioning().linking_condition <= kLinkingConditionWarning;

    DiagnosticsReport report;
    report.dim = alg.dim();
    report.metric_condition = alg.conditioning().metric_condition;
    report.linking_condition = alg.conditioning().linking_condition;
    report.warnings = alg.warnings();

    std::vector<double> worst(id_count, 0.0);
    std::vector<double> jac;
    Xoshiro256StarStar rng(derive_seed(seed, 7));
    auto bump = [&](Id id, double v) { worst[id] = std::max(worst[id], v); };

    for (int s = 0; s < samples; ++s) {
        const Vec x = unit_state(alg, rng);
        const Vec y = unit_state(alg, rng);
        const Vec z = unit_state(alg, rng);
        const Vec dx = curl(alg, x);
        const Vec dy = curl(alg, y);
        const Vec dz = curl(alg, z);

        const double t_xxz = tensor_scale(alg, {x, x, z});
        bump(alternating, ratio(triple(alg, x, x, z), t_xxz));
        bump(alternating, ratio(triple(alg, x, z, x), t_xxz));
        bump(alternating, ratio(triple(alg, z, x, x), t_xxz));

        bump(helicity_forms, ratio(metric_inner(alg, x, dx) - helicity(alg, x), linking_scale(alg, x, x)));
        bump(curl_relation, ratio(metric_inner(alg, dx, y) - linking(alg, x, y), linking_scale(alg, x, y)));
        bump(curl_self_adjoint, ratio(metric_inner(alg, dx, y) - metric_inner(alg, x, dy), linking_scale(alg, x, y)));
        bump(curl_round_trip, relative_difference(alg, inverse_curl(alg, dx), x));
        bump(curl_round_trip, relative_difference(alg, curl(alg, inverse_curl(alg, x)), x));

        const Vec rhs = euler_rhs(alg, x);
        bump(energy_orthogonality, ratio(metric_inner(alg, rhs, x), tensor_scale(alg, {x, dx, x})));
        bump(helicity_orthogonality, ratio(metric_inner(alg, rhs, dx), tensor_scale(alg, {x, dx, dx})));

        const Vec curl_rhs = curl(alg, rhs);
        const Vec tr = transport(alg, x, dx);
        bump(transport_vs_curl_euler, relative_difference(alg, curl_rhs, tr));
        bump(transport_vs_vorticity, relative_difference(alg, tr, vorticity_rhs(alg, dx)));

        bump(transport_antisymmetry, antisymmetry_gap(alg, transport(alg, x, z), transport(alg, z, x)));
        const Vec bxy = induced_bracket(alg, x, y);
        bump(bracket_antisymmetry, antisymmetry_gap(alg, bxy, induced_bracket(alg, y, x)));
        bump(bracket_compatibility, ratio(linking(alg, bxy, z) - triple(alg, x, y, z), tensor_scale(alg, {x, y, z})));

        // The two terms of the circulation argument, evaluated on the
        // canonical sparse entries where alternation is exact.
        bump(circulation_identity,
             ratio(alg.triple_sparse(x, dx, dz) + alg.triple_sparse(x, dz, dx), tensor_scale(alg, {x, dx, dz})));
        bump(circulation_defect_zero,
             ratio(g_dual_norm(alg, circulation_defect(alg, rhs, x)), tensor_scale(alg, {x, dx})));

        const double j = ratio(g_norm(alg, jacobiator(alg, x, y, z)), jacobi_scale(alg, x, y, z));
        jac.push_back(j);
        bump(jacobiator_id, j);
    }

    report.jacobi.samples = static_cast<int>(jac.size());
    report.jacobi.max = *std::max_element(jac.begin(), jac.end());
    report.jacobi.min = *std::min_element(jac.begin(), jac.end());
    double sum = 0.0;
    int above = 0;
    for (double v : jac) {
        sum += v;
        if (v > 1e-3) ++above;
    }
    report.jacobi.mean = sum / static_cast<double>(jac.size());
    report.jacobi.fraction_above_1e3 = static_cast<double>(above) / static_cast<double>(jac.size());

    struct Tol {
        double value;
        bool bearing;
    };
    const std::vector<Tol> tolerances{
        {1e-12, true},               // alternating
        {1e-11, true},               // helicity forms
        {1e-11, true},               // curl relation
        {1e-11, true},               // curl self-adjoint
        {1e-10, invertible_enough},  // curl round trip
        {1e-12, true},               // energy orthogonality
        {1e-12, true},               // helicity orthogonality
        {1e-10, true},               // curl(euler) vs transport
        {1e-10, true},               // transport vs vorticity rhs
        {1e-12, true},               // transport antisymmetry
        {1e-12, true},               // bracket antisymmetry
        {1e-11, true},               // bracket/triple compatibility
        {0.0, true},                 // circulation identity (exact)
        {1e-11, true},               // circulation defect
        {1e-11, lie},                // jacobiator
    };
    for (int id = 0; id < id_count; ++id) {
        IdentityResult r;
        r.name = identity_names()[id];
        r.max_defect = worst[id];
        r.tolerance = tolerances[id].value;
        r.tolerance_bearing = tolerances[id].bearing;
        r.pass = worst[id] <= r.tolerance;
        report.identities.push_back(std::move(r));
    }
    return report;
}

}  // namespace fluidalg::cli
