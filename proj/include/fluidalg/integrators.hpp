#pragma once

#include "fluidalg/core_algebra.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fluidalg {

enum class Method { rk4, rk4_projected };

std::string to_string(Method m);
/// Accepts "rk4" and "rk4-projected"; throws ConfigError otherwise.
Method parse_method(const std::string& name);

struct ProjectionSettings {
    int max_iter = 10;
    double tol = 1e-12;  // relative
};

struct IntegratorSpec {
    Method method = Method::rk4;
    double dt = 1e-3;
    double t_end = 1.0;
    int record_every = 1;
    ProjectionSettings projection;

    /// Throws ConfigError when dt <= 0, t_end < 0 or record_every < 1.
    void validate() const;
};

struct TraceRecord {
    double t = 0.0;
    Vec state;
    double energy = 0.0;
    double helicity = 0.0;
    std::optional<double> probe_linking;
};

struct ProjectionResult {
    Vec state;
    double alpha = 0.0;
    double beta = 0.0;
    int iterations = 0;
    /// True when DX was (numerically) parallel to X and only the energy was
    /// restored by radial rescaling.
    bool energy_only = false;
};

/// Condition number above which the 2x2 Newton system is treated as singular.
inline constexpr double kProjectionConditionLimit = 1e10;

/// One classical RK4 step of dX/dt = euler_rhs(X). `t` is only used to label
/// a NumericalError.
Vec rk4_step(const FluidAlgebra& alg, const VecRef& x, double dt, double t = 0.0);

/// One RK4 step of the joint system
///   dX/dt = euler_rhs(X),  dZ/dt = D' T(X, DZ)
/// with the probe evaluated at the stage values of X.
struct JointStep {
    Vec x;
    Vec z;
};
JointStep rk4_step_with_probe(const FluidAlgebra& alg, const VecRef& x, const VecRef& z, double dt,
                              double t = 0.0);

/// Probe part of rk4_step_with_probe.
Vec co_evolve_probe(const FluidAlgebra& alg, const VecRef& x, const VecRef& z, double dt, double t = 0.0);

/// Rate of the probe equation, D' T(X, DZ).
Vec probe_rhs(const FluidAlgebra& alg, const VecRef& x, const VecRef& z);

/// Moves X to X' = X + 2 alpha X + 2 beta DX so that energy(X') = E0 and
/// helicity(X') = H0, solving for (alpha, beta) by Newton's method from
/// (0, 0). Throws ProjectionFailure if the tolerances are not met within
/// settings.max_iter iterations.
ProjectionResult project_to_invariants(const FluidAlgebra& alg, const VecRef& x, double e0, double h0,
                                       const ProjectionSettings& settings = {});

struct IntegrationResult {
    std::vector<TraceRecord> records;
    long steps = 0;
    /// Steps where projection failed and the unprojected state was kept.
    long projection_failures = 0;
    bool failed = false;
    std::string failure_message;
    std::optional<double> failure_time;
};

/// Integrates from t = 0 to spec.t_end with fixed steps of spec.dt (the last
/// step is shortened to land on t_end). Records t = 0, every
/// spec.record_every steps, and the final time. Numerical failures end the
/// run early with the partial trace kept and `failed` set.
IntegrationResult integrate(const FluidAlgebra& alg, const VecRef& x0, const IntegratorSpec& spec,
                            const std::optional<Vec>& probe = std::nullopt);

}  // namespace fluidalg
