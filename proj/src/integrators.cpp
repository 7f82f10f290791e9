#include "fluidalg/integrators.hpp"

#include "fluidalg/dynamics.hpp"
#include "fluidalg/errors.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace fluidalg {

std::string to_string(Method m) { return m == Method::rk4 ? "rk4" : "rk4-projected"; }

Method parse_method(const std::string& name) {
    if (name == "rk4") return Method::rk4;
    if (name == "rk4-projected") return Method::rk4_projected;
    throw ConfigError("unknown integrator method '" + name + "' (expected rk4 or rk4-projected)");
}

void IntegratorSpec::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("integrator.dt must be > 0");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("integrator.t_end must be >= 0");
    if (record_every < 1) throw ConfigError("integrator.record_every must be >= 1");
    if (projection.max_iter < 1) throw ConfigError("integrator.projection.max_iter must be >= 1");
    if (!(projection.tol > 0.0)) throw ConfigError("integrator.projection.tol must be > 0");
}

namespace {

void require_finite(const Vec& v, const char* what, double t) {
    if (!v.allFinite()) throw NumericalError(std::string(what) + " produced non-finite values", t);
}

// Attaches the step time to numerical failures raised by the right-hand sides.
template <typename F>
auto at_time(double t, F&& body) {
    try {
        return body();
    } catch (const NumericalError& e) {
        if (e.time()) throw;
        throw NumericalError(e.what(), t);
    }
}

// The RK4 update dt/6 (k1 + 2 k2 + 2 k3 + k4), without adding it to x.
Vec rk4_increment_impl(const FluidAlgebra& alg, const VecRef& x, double dt, double t) {
    const Vec x0 = x;
    const Vec k1 = euler_rhs(alg, x0);
    require_finite(k1, "rk4 stage 1", t);
    const Vec k2 = euler_rhs(alg, x0 + 0.5 * dt * k1);
    require_finite(k2, "rk4 stage 2", t);
    const Vec k3 = euler_rhs(alg, x0 + 0.5 * dt * k2);
    require_finite(k3, "rk4 stage 3", t);
    const Vec k4 = euler_rhs(alg, x0 + dt * k3);
    require_finite(k4, "rk4 stage 4", t);
    Vec inc = (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    require_finite(inc, "rk4 step", t);
    return inc;
}

JointStep rk4_increment_with_probe_impl(const FluidAlgebra& alg, const VecRef& x, const VecRef& z, double dt, double t) {
    const Vec x0 = x;
    const Vec z0 = z;
    const Vec kx1 = euler_rhs(alg, x0);
    const Vec kz1 = probe_rhs(alg, x0, z0);
    const Vec x1 = x0 + 0.5 * dt * kx1;
    const Vec z1 = z0 + 0.5 * dt * kz1;
    const Vec kx2 = euler_rhs(alg, x1);
    const Vec kz2 = probe_rhs(alg, x1, z1);
    const Vec x2 = x0 + 0.5 * dt * kx2;
    const Vec z2 = z0 + 0.5 * dt * kz2;
    const Vec kx3 = euler_rhs(alg, x2);
    const Vec kz3 = probe_rhs(alg, x2, z2);
    const Vec x3 = x0 + dt * kx3;
    const Vec z3 = z0 + dt * kz3;
    const Vec kx4 = euler_rhs(alg, x3);
    const Vec kz4 = probe_rhs(alg, x3, z3);
    JointStep out{(dt / 6.0) * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4), (dt / 6.0) * (kz1 + 2.0 * kz2 + 2.0 * kz3 + kz4)};
    require_finite(out.x, "rk4 step", t);
    require_finite(out.z, "probe rk4 step", t);
    return out;
}

// State with a Kahan compensation term, so rounding of the many small step
// increments does not accumulate over long runs.
struct CompensatedState {
    Vec value;
    Vec carry;

    explicit CompensatedState(Vec v) : value(std::move(v)), carry(Vec::Zero(value.size())) {}

    void add(const Vec& inc) {
        const Vec y = inc - carry;
        Vec t = value + y;
        carry = (t - value) - y;
        value = std::move(t);
    }

    void reset(Vec v) {
        value = std::move(v);
        carry.setZero();
    }
};

}  // namespace

Vec rk4_step(const FluidAlgebra& alg, const VecRef& x, double dt, double t) {
    Vec out = x + at_time(t, [&] { return rk4_increment_impl(alg, x, dt, t); });
    require_finite(out, "rk4 step", t);
    return out;
}

JointStep rk4_step_with_probe(const FluidAlgebra& alg, const VecRef& x, const VecRef& z, double dt, double t) {
    JointStep inc = at_time(t, [&] { return rk4_increment_with_probe_impl(alg, x, z, dt, t); });
    JointStep out{x + inc.x, z + inc.z};
    require_finite(out.x, "rk4 step", t);
    require_finite(out.z, "probe rk4 step", t);
    return out;
}

Vec probe_rhs(const FluidAlgebra& alg, const VecRef& x, const VecRef& z) {
    return inverse_curl(alg, transport(alg, x, curl(alg, z)));
}

Vec co_evolve_probe(const FluidAlgebra& alg, const VecRef& x, const VecRef& z, double dt, double t) {
    return rk4_step_with_probe(alg, x, z, dt, t).z;
}

ProjectionResult project_to_invariants(const FluidAlgebra& alg, const VecRef& x, double e0, double h0,
                                       const ProjectionSettings& settings) {
    check_state(alg, x);
    const Vec x_in = x;
    const Vec dx = curl(alg, x_in);
    const Mat& G = alg.metric_matrix();
    const Mat& L = alg.linking_matrix();
    const double e_tol = settings.tol * e0;
    const double h_tol = settings.tol * std::max(std::abs(h0), e0);

    ProjectionResult out;
    out.state = x_in;
    auto converged = [&](const Vec& v) {
        return std::abs(energy(alg, v) - e0) <= e_tol && std::abs(helicity(alg, v) - h0) <= h_tol;
    };
    if (converged(out.state)) return out;

    // Correction directions are the metric gradients of energy and helicity.
    const Vec dir_a = 2.0 * x_in;
    const Vec dir_b = 2.0 * dx;
    const Vec g_dir_a = G * dir_a, g_dir_b = G * dir_b;
    const Vec l_dir_a = L * dir_a, l_dir_b = L * dir_b;

    for (int it = 1; it <= settings.max_iter; ++it) {
        const Vec& v = out.state;
        const Eigen::Vector2d residual(energy(alg, v) - e0, helicity(alg, v) - h0);
        Eigen::Matrix2d jac;
        jac << 2.0 * v.dot(g_dir_a), 2.0 * v.dot(g_dir_b), 2.0 * v.dot(l_dir_a), 2.0 * v.dot(l_dir_b);
        // Rows are scaled to unit length before the conditioning test so the
        // energy and helicity equations are compared on equal footing.
        Eigen::Matrix2d scaled = jac;
        for (int r = 0; r < 2; ++r) {
            const double norm = scaled.row(r).norm();
            if (norm > 0.0) scaled.row(r) /= norm;
        }
        Eigen::JacobiSVD<Eigen::Matrix2d> svd(scaled);
        const double smax = svd.singularValues()(0);
        const double smin = svd.singularValues()(1);
        if (!(smin > 0.0) || smax / smin > kProjectionConditionLimit) {
            const double e = energy(alg, v);
            if (!(e > 0.0)) throw ProjectionFailure("cannot rescale a zero state onto the energy sphere");
            out.state = v * std::sqrt(e0 / e);
            out.energy_only = true;
            out.iterations = it;
            return out;
        }
        const Eigen::Vector2d step = jac.partialPivLu().solve(-residual);
        out.alpha += step(0);
        out.beta += step(1);
        out.state = x_in + out.alpha * dir_a + out.beta * dir_b;
        out.iterations = it;
        if (!out.state.allFinite()) throw ProjectionFailure("projection produced non-finite values");
        if (converged(out.state)) return out;
    }
    throw ProjectionFailure("projection did not converge in " + std::to_string(settings.max_iter) +
                            " iterations");
}

IntegrationResult integrate(const FluidAlgebra& alg, const VecRef& x0, const IntegratorSpec& spec,
                            const std::optional<Vec>& probe) {
    spec.validate();
    check_state(alg, x0);
    if (probe) check_state(alg, *probe);

    IntegrationResult result;
    CompensatedState xs(x0);
    CompensatedState zs(probe ? *probe : Vec());
    const Vec& x = xs.value;
    const Vec& z = zs.value;
    const double e0 = energy(alg, x);
    const double h0 = helicity(alg, x);

    auto record = [&](double t) {
        TraceRecord r;
        r.t = t;
        r.state = x;
        r.energy = energy(alg, x);
        r.helicity = helicity(alg, x);
        if (probe) r.probe_linking = linking(alg, x, z);
        result.records.push_back(std::move(r));
    };
    record(0.0);

    long n_steps = 0;
    if (spec.t_end > 0.0) {
        n_steps = static_cast<long>(std::ceil(spec.t_end / spec.dt - 1e-9));
        n_steps = std::max(n_steps, 1L);
    }
    for (long step = 1; step <= n_steps; ++step) {
        const double t_prev = static_cast<double>(step - 1) * spec.dt;
        const bool last = step == n_steps;
        const double t_next = last ? spec.t_end : static_cast<double>(step) * spec.dt;
        const double h = t_next - t_prev;
        try {
            if (probe) {
                const JointStep inc = at_time(t_prev, [&] { return rk4_increment_with_probe_impl(alg, x, z, h, t_prev); });
                xs.add(inc.x);
                zs.add(inc.z);
                require_finite(z, "probe rk4 step", t_prev);
            } else {
                xs.add(at_time(t_prev, [&] { return rk4_increment_impl(alg, x, h, t_prev); }));
            }
            require_finite(x, "rk4 step", t_prev);
            if (spec.method == Method::rk4_projected) {
                try {
                    xs.reset(project_to_invariants(alg, x, e0, h0, spec.projection).state);
                } catch (const ProjectionFailure&) {
                    ++result.projection_failures;
                }
            }
        } catch (const NumericalError& err) {
            result.failed = true;
            result.failure_message = err.what();
            result.failure_time = err.time().value_or(t_prev);
            return result;
        }
        result.steps = step;
        if (step % spec.record_every == 0 || last) record(t_next);
    }
    return result;
}

}  // namespace fluidalg
