#pragma once

#include "koopreach/common.hpp"
#include "koopreach/regions.hpp"

#include <cmath>
#include <optional>
#include <utility>

namespace koopreach::dynamics {

struct SystemModel {
    int dimension = 0;
    std::string name;
    std::function<Vector(const Vector&)> vector_field;
    regions::Box working_domain;  // field is finite and sane here
};

struct SnapshotDataset {
    std::vector<std::pair<Vector, Vector>> pairs;
    double dt = 0;
    int dimension = 0;
    std::size_t dropped = 0;  // pairs discarded by the guard box
};

struct AnalyticEigenpair {
    Complex lambda;
    std::function<Complex(const Vector&)> psi;
};

// ── Integration ───────────────────────────────────────────────────────────

namespace detail {

inline Vector rk4_step(const std::function<Vector(const Vector&)>& f, const Vector& x, double h) {
    const Vector k1 = f(x);
    const Vector k2 = f(x + 0.5 * h * k1);
    const Vector k3 = f(x + 0.5 * h * k2);
    const Vector k4 = f(x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

// Classic fixed-step 4th-order integration of the flow map; a final partial
// step covers t not a multiple of step.
inline Vector integrate_flow(const SystemModel& system, const Vector& x0, double t, double step) {
    if (x0.size() != system.dimension) throw InputError("integrate_flow: dimension mismatch");
    if (t < 0) throw InputError("integrate_flow: t must be nonnegative");
    if (step <= 0) throw InputError("integrate_flow: step must be positive");
    Vector x = x0;
    double elapsed = 0.0;
    const auto advance = [&](double h) {
        x = detail::rk4_step(system.vector_field, x, h);
        elapsed += h;
        if (!x.allFinite()) throw DivergenceError(elapsed);
    };
    const long n_full = static_cast<long>(std::floor(t / step + 1e-12));
    for (long i = 0; i < n_full; ++i) advance(step);
    const double rem = t - static_cast<double>(n_full) * step;
    if (rem > 1e-12 * std::max(1.0, t)) advance(rem);
    return x;
}

// ── Snapshot generation ───────────────────────────────────────────────────

// n_traj·n_steps pairs (x_k, y_k = s_dt(x_k)) from uniformly sampled starts.
// A trajectory that leaves the guard box (default: working domain inflated
// by 2) is cut; its remaining pairs count as dropped. Deterministic given
// seed, independent of thread count.
inline SnapshotDataset generate_snapshots(const SystemModel& system, const regions::Box& domain, std::size_t n_traj,
                                          std::size_t n_steps, double dt, std::uint64_t seed,
                                          double integrator_step = 1e-3,
                                          std::optional<regions::Box> guard = std::nullopt) {
    if (domain.dimension() != system.dimension) throw InputError("generate_snapshots: domain dimension mismatch");
    if (dt <= 0) throw InputError("generate_snapshots: dt must be positive");
    const regions::Box guard_box = guard.value_or(system.working_domain.inflated(2.0));

    std::vector<std::vector<std::pair<Vector, Vector>>> per_traj(n_traj);
    parallel_chunks(n_traj, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t tr = begin; tr < end; ++tr) {
            Rng rng = Rng::substream(seed, tr);
            Vector x = rng.uniform_in_box(domain.lo, domain.hi);
            auto& pairs = per_traj[tr];
            pairs.reserve(n_steps);
            for (std::size_t s = 0; s < n_steps; ++s) {
                Vector y;
                try {
                    y = integrate_flow(system, x, dt, integrator_step);
                } catch (const DivergenceError&) {
                    break;
                }
                if (!guard_box.contains(y)) break;
                pairs.emplace_back(x, y);
                x = std::move(y);
            }
        }
    });

    SnapshotDataset ds;
    ds.dt = dt;
    ds.dimension = system.dimension;
    ds.pairs.reserve(n_traj * n_steps);
    for (auto& tp : per_traj)
        for (auto& p : tp) ds.pairs.push_back(std::move(p));
    ds.dropped = n_traj * n_steps - ds.pairs.size();
    return ds;
}

// ── Benchmark systems ─────────────────────────────────────────────────────

// Nonlinear planar system built so that Ψ = (ψ1, ψ2) are exact eigenfunctions:
//   ẋ = [∇Ψ(x)]^{-1} diag(-1, 2.5) Ψ(x)
//   ψ1 = x1^2 + 2 x2 + x2^3,  ψ2 = x1 + sin(x2) + x1^3
inline double example1_psi1(const Vector& x) { return x[0] * x[0] + 2.0 * x[1] + x[1] * x[1] * x[1]; }
inline double example1_psi2(const Vector& x) { return x[0] + std::sin(x[1]) + x[0] * x[0] * x[0]; }

inline SystemModel example1_system() {
    SystemModel m;
    m.dimension = 2;
    m.name = "example1";
    m.working_domain = regions::make_box({-0.5, -1.5}, {2.5, 1.5});
    m.vector_field = [](const Vector& x) -> Vector {
        // ∇Ψ rows: dψ1 = (2x1, 2+3x2²), dψ2 = (1+3x1², cos x2)
        const double a = 2.0 * x[0];
        const double b = 2.0 + 3.0 * x[1] * x[1];
        const double c = 1.0 + 3.0 * x[0] * x[0];
        const double d = std::cos(x[1]);
        const double det = a * d - b * c;
        if (std::abs(det) < 1e-12) throw SingularJacobianError("example1: singular ∇Ψ");
        const double r1 = -example1_psi1(x);
        const double r2 = 2.5 * example1_psi2(x);
        Vector f(2);
        f << (d * r1 - b * r2) / det, (-c * r1 + a * r2) / det;
        return f;
    };
    return m;
}

inline std::vector<AnalyticEigenpair> analytic_eigenpairs_example1() {
    return {
        {Complex(-1.0, 0.0), [](const Vector& x) { return Complex(example1_psi1(x), 0.0); }},
        {Complex(2.5, 0.0), [](const Vector& x) { return Complex(example1_psi2(x), 0.0); }},
    };
}

// Duffing oscillator, stable foci at (±1, 0), saddle at the origin.
inline SystemModel duffing_system() {
    SystemModel m;
    m.dimension = 2;
    m.name = "duffing";
    m.working_domain = regions::make_box({-2.0, -2.0}, {2.0, 2.0});
    m.vector_field = [](const Vector& x) -> Vector {
        Vector f(2);
        f << x[1], -0.5 * x[1] - x[0] * (x[0] * x[0] - 1.0);
        return f;
    };
    return m;
}

inline SystemModel roessler_system() {
    SystemModel m;
    m.dimension = 3;
    m.name = "roessler";
    m.working_domain = regions::make_box({-15.0, -15.0, -5.0}, {15.0, 15.0, 30.0});
    m.vector_field = [](const Vector& x) -> Vector {
        Vector f(3);
        f << -x[1] - x[2], x[0] + 0.2 * x[1], 0.2 + x[2] * (x[0] - 5.7);
        return f;
    };
    return m;
}

inline SystemModel system_by_name(const std::string& name) {
    if (name == "example1") return example1_system();
    if (name == "duffing") return duffing_system();
    if (name == "roessler") return roessler_system();
    throw InputError("unknown system '" + name + "'");
}

// ── First-entry detection ─────────────────────────────────────────────────

struct FirstEntryResult {
    std::vector<std::optional<double>> times;
    std::size_t diverged = 0;
};

// Dense time sampling at the integrator step; entry-time resolution equals
// the step. Diverging trajectories count as never entering.
inline FirstEntryResult first_entry_times(const SystemModel& system, const std::vector<Vector>& x0_samples,
                                          const regions::Region& target, double t_max, double step) {
    if (step <= 0) throw InputError("first_entry_times: step must be positive");
    FirstEntryResult res;
    res.times.assign(x0_samples.size(), std::nullopt);
    std::atomic<std::size_t> diverged{0};
    parallel_chunks(x0_samples.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            Vector x = x0_samples[k];
            if (regions::contains(target, x)) {
                res.times[k] = 0.0;
                continue;
            }
            double t = 0.0;
            try {
                while (t < t_max) {
                    const double h = std::min(step, t_max - t);
                    x = detail::rk4_step(system.vector_field, x, h);
                    if (!x.allFinite()) throw DivergenceError(t + h);
                    t += h;
                    if (regions::contains(target, x)) {
                        res.times[k] = t;
                        break;
                    }
                }
            } catch (const DivergenceError&) {
                diverged.fetch_add(1);
            }
        }
    });
    res.diverged = diverged.load();
    return res;
}

}  // namespace koopreach::dynamics
