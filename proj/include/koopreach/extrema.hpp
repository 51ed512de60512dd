#pragma once

#include "koopreach/common.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace koopreach::extrema {

inline constexpr double kMagnitudeFloor = 1e-12;
inline constexpr double kPi = 3.14159265358979323846;

// Empirical extrema of log|ψ| and arg(ψ) over one sample set. Phases live on
// the branch (center-π, center+π]; a shared center makes phase differences
// across sets well-defined.
struct ExtremaEstimate {
    double sup_log_mag = 0, inf_log_mag = 0;
    double sup_phase = 0, inf_phase = 0;
    double branch_center = 0;
    std::size_t n_samples = 0;
    std::size_t n_skipped = 0;
    bool phase_spread_warning = false;  // spread ≥ 1.9π: phase channel unreliable
};

inline double recenter_phase(double theta, double center) {
    double d = std::remainder(theta - center, 2.0 * kPi);
    if (d <= -kPi) d += 2.0 * kPi;
    return center + d;
}

inline double circular_mean_phase(const std::vector<Complex>& values) {
    double s = 0, c = 0;
    for (const Complex& z : values) {
        if (std::abs(z) < kMagnitudeFloor) continue;
        const double th = std::arg(z);
        s += std::sin(th);
        c += std::cos(th);
    }
    return std::atan2(s, c);
}

inline ExtremaEstimate estimate_extrema(const std::vector<Complex>& psi_values,
                                        std::optional<double> branch_center = std::nullopt) {
    ExtremaEstimate est;
    est.branch_center = branch_center ? *branch_center : circular_mean_phase(psi_values);
    est.sup_log_mag = -std::numeric_limits<double>::infinity();
    est.inf_log_mag = std::numeric_limits<double>::infinity();
    est.sup_phase = -std::numeric_limits<double>::infinity();
    est.inf_phase = std::numeric_limits<double>::infinity();
    for (const Complex& z : psi_values) {
        const double mag = std::abs(z);
        if (mag < kMagnitudeFloor) {
            ++est.n_skipped;
            continue;
        }
        ++est.n_samples;
        const double lm = std::log(mag);
        est.sup_log_mag = std::max(est.sup_log_mag, lm);
        est.inf_log_mag = std::min(est.inf_log_mag, lm);
        const double ph = recenter_phase(std::arg(z), est.branch_center);
        est.sup_phase = std::max(est.sup_phase, ph);
        est.inf_phase = std::min(est.inf_phase, ph);
    }
    if (est.n_samples == 0)
        throw DegenerateEigenfunctionError("estimate_extrema: all values below the magnitude floor");
    est.phase_spread_warning = (est.sup_phase - est.inf_phase) >= 1.9 * kPi;
    return est;
}

// L̃ᵍ(W,V) = sup_V log|g| − inf_W log|g|; may be negative.
inline double L_hat(const ExtremaEstimate& from_est, const ExtremaEstimate& to_est) {
    return to_est.sup_log_mag - from_est.inf_log_mag;
}

// Ãᵍ(W,V) = sup_V arg g − inf_W arg g; both estimates must share a branch.
inline double A_hat(const ExtremaEstimate& from_est, const ExtremaEstimate& to_est) {
    if (std::abs(std::remainder(from_est.branch_center - to_est.branch_center, 2.0 * kPi)) > 1e-9)
        throw MisuseError("A_hat: estimates use different branch centers");
    return to_est.sup_phase - from_est.inf_phase;
}

// ── Sample-size planning ──────────────────────────────────────────────────

// N₀ = ⌈log σ / log(1−P_ε)⌉: enough i.i.d. samples that the empirical
// extremum is ε-accurate with probability ≥ 1−σ.
inline std::size_t required_samples(double sigma, double p_eps) {
    if (!(sigma > 0.0 && sigma < 1.0)) throw InputError("required_samples: sigma must be in (0,1)");
    if (!(p_eps > 0.0 && p_eps <= 1.0)) throw InputError("required_samples: p_eps must be in (0,1]");
    if (p_eps == 1.0) return 1;
    const double r = std::log(sigma) / std::log1p(-p_eps);
    const double n = std::ceil(r - 1e-9 * std::max(1.0, r));
    return static_cast<std::size_t>(std::max(1.0, n));
}

struct SamplingPlan {
    double per_extremum_sigma = 0;
    double eps = 0;
    std::size_t n_required = 0;
    double p_eps_assumed = 0;
};

// Splits the per-eigenpair failure budget δ/m over the extremum estimates a
// pair needs (two channels × two sets × sup and inf → 8 by default).
inline SamplingPlan plan_sampling(double delta, std::size_t m_eigenpairs, double p_eps,
                                  std::size_t n_extrema_per_pair = 8, double eps = 0.0) {
    if (!(delta > 0.0 && delta < 1.0)) throw InputError("plan_sampling: delta must be in (0,1)");
    if (m_eigenpairs < 1) throw InputError("plan_sampling: m_eigenpairs must be positive");
    if (n_extrema_per_pair < 1) throw InputError("plan_sampling: n_extrema_per_pair must be positive");
    SamplingPlan plan;
    plan.per_extremum_sigma = delta / static_cast<double>(m_eigenpairs) / static_cast<double>(n_extrema_per_pair);
    plan.eps = eps;
    plan.p_eps_assumed = p_eps;
    plan.n_required = required_samples(plan.per_extremum_sigma, p_eps);
    return plan;
}

}  // namespace koopreach::extrema
