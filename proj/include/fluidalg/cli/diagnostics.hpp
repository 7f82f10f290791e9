#pragma once

#include "fluidalg/core_algebra.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace fluidalg::cli {

struct IdentityResult {
    std::string name;
    /// Max over the sample of |defect| / scale (or the relative gap).
    double max_defect = 0.0;
    double tolerance = 0.0;
    /// Informational results carry no pass/fail.
    bool tolerance_bearing = true;
    bool pass = true;
};

struct JacobiStats {
    double max = 0.0;
    double mean = 0.0;
    double min = 0.0;
    /// Fraction of sampled triples with defect > 1e-3 * scale.
    double fraction_above_1e3 = 0.0;
    int samples = 0;
};

struct DiagnosticsReport {
    std::vector<IdentityResult> identities;
    int dim = 0;
    double metric_condition = 0.0;
    double linking_condition = 0.0;
    JacobiStats jacobi;
    std::vector<std::string> warnings;

    bool passed() const;
    nlohmann::ordered_json to_json() const;
};

/// Names of the identities, in report order.
const std::vector<std::string>& identity_names();

/// Evaluates every algebraic identity on `samples` seeded triples of random
/// unit states. The Jacobiator is tolerance-bearing only when `lie` is set.
DiagnosticsReport run_diagnostics(const FluidAlgebra& alg, bool lie, std::uint64_t seed, int samples);

}  // namespace fluidalg::cli
