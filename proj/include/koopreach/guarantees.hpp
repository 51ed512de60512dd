#pragma once

#include "koopreach/common.hpp"
#include "koopreach/reachtime.hpp"
#include "koopreach/spectral.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace koopreach::guarantees {

enum class Direction { Forward, Backward };  // forward: (W,V) = (X0,XF)

// Inverts the Lemma 1 sandwich around a measured L-quantity: the true
// Lᵠ(W,V) lies in [measured − Lᵋ(W,V), measured + Lᵋ(V,W)].
inline std::array<double, 2> lemma1_envelope(double measured_L, const spectral::ErrorField& eps_field,
                                             Direction direction) {
    if (direction == Direction::Forward)
        return {measured_L - eps_field.l_eps_fwd, measured_L + eps_field.l_eps_bwd};
    return {measured_L - eps_field.l_eps_bwd, measured_L + eps_field.l_eps_fwd};
}

inline std::array<double, 2> lemma1_envelope_phase(double measured_A, const spectral::ErrorField& eps_field,
                                                   Direction direction) {
    if (direction == Direction::Forward)
        return {measured_A - eps_field.a_eps_fwd, measured_A + eps_field.a_eps_bwd};
    return {measured_A - eps_field.a_eps_bwd, measured_A + eps_field.a_eps_fwd};
}

struct ErrorBudget {
    double eps = 0;                      // sampling tolerance (nats / radians)
    double delta_L = 0;                  // max_i Δ_{L,i}
    double delta_A = 0;                  // max over complex pairs of Δ_{A,i}
    double min_abs_re = 0;               // min_i |Re λ_i| over used pairs
    std::optional<double> min_abs_im;    // over complex pairs, when any
    double delta_total = 0;              // seconds
    double confidence = 0;               // 1 − δ
    bool any_assumed = false;            // some error field was user-supplied
};

struct BudgetedEigenpair {
    Complex lambda;
    spectral::ErrorField field;
};

// Hausdorff budget Δ: each eigenpair contributes (ε+Δ_{L,i})/|Re λ_i| and,
// if complex, (ε+Δ_{A,i})/|Im λ_i|; Δ is the max contribution. The weighted
// mediant inequality bounds every combination eigenpair's endpoint shift by
// this per-pair maximum, so it is a valid (and tighter) form of the
// aggregate (ε+Δ_L)/|Re λ|_min bound.
inline ErrorBudget delta_bound(const std::vector<BudgetedEigenpair>& pairs, double eps, double delta = 0.0) {
    if (pairs.empty()) throw InputError("delta_bound: need at least one eigenpair");
    if (eps < 0) throw InputError("delta_bound: eps must be nonnegative");
    ErrorBudget budget;
    budget.eps = eps;
    budget.confidence = 1.0 - delta;
    budget.min_abs_re = std::numeric_limits<double>::infinity();
    double min_im = std::numeric_limits<double>::infinity();
    bool any_complex = false;
    double total = 0;
    for (const auto& p : pairs) {
        const double re = std::abs(p.lambda.real());
        const double im = std::abs(p.lambda.imag());
        if (re < 1e-12)
            throw BudgetUndefinedError("delta_bound: |Re λ| vanishes for an eigenpair; the bound degenerates");
        const double dL = std::max(p.field.l_eps_fwd, p.field.l_eps_bwd);
        budget.delta_L = std::max(budget.delta_L, dL);
        budget.min_abs_re = std::min(budget.min_abs_re, re);
        total = std::max(total, (eps + dL) / re);
        if (im > reachtime::kImFloor) {
            any_complex = true;
            const double dA = std::max(p.field.a_eps_fwd, p.field.a_eps_bwd);
            budget.delta_A = std::max(budget.delta_A, dA);
            min_im = std::min(min_im, im);
            total = std::max(total, (eps + dA) / im);
        }
        budget.any_assumed = budget.any_assumed || p.field.assumed;
    }
    if (any_complex) budget.min_abs_im = min_im;
    budget.delta_total = total;
    return budget;
}

// ── Hausdorff distance on interval sets ───────────────────────────────────

namespace detail {

inline double point_to_set(double p, const std::vector<std::pair<double, double>>& iv) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [lo, hi] : iv) {
        if (p < lo)
            best = std::min(best, lo - p);
        else if (p > hi)
            best = std::min(best, p - hi);
        else
            return 0.0;
    }
    return best;
}

// sup over x ∈ a of dist(x, b): attained at an endpoint of a or at a
// midpoint of a gap of b that lies inside a.
inline double directed_sup_dist(const reachtime::TimeIntervalSet& a, const reachtime::TimeIntervalSet& b) {
    const auto& ia = a.intervals();
    const auto& ib = b.intervals();
    double worst = 0;
    for (const auto& [lo, hi] : ia) {
        worst = std::max(worst, point_to_set(lo, ib));
        worst = std::max(worst, point_to_set(hi, ib));
    }
    for (std::size_t j = 0; j + 1 < ib.size(); ++j) {
        const double mid = 0.5 * (ib[j].second + ib[j + 1].first);
        if (a.covers(mid)) worst = std::max(worst, point_to_set(mid, ib));
    }
    return worst;
}

}  // namespace detail

// d_H between interval sets; empty-vs-nonempty is +infinity by convention,
// empty-vs-empty is 0.
inline double hausdorff(const reachtime::TimeIntervalSet& a, const reachtime::TimeIntervalSet& b) {
    if (a.is_empty() && b.is_empty()) return 0.0;
    if (a.is_empty() || b.is_empty()) return std::numeric_limits<double>::infinity();
    return std::max(detail::directed_sup_dist(a, b), detail::directed_sup_dist(b, a));
}

// ── Certification ─────────────────────────────────────────────────────────

struct CertifiedStatement {
    std::string text;
    double confidence = 0;
    double delta = 0;
    bool empty_estimate = false;
    std::vector<std::string> assumptions;
};

inline CertifiedStatement certify(const reachtime::TimeIntervalSet& empirical, const ErrorBudget& budget,
                                  std::vector<std::string> assumptions = {}) {
    CertifiedStatement st;
    st.confidence = budget.confidence;
    st.delta = budget.delta_total;
    st.empty_estimate = empirical.is_empty();
    st.assumptions = std::move(assumptions);
    if (budget.any_assumed)
        st.assumptions.push_back("eigenfunction error bounds are user-assumed, not measured against a reference");
    std::ostringstream os;
    if (!st.empty_estimate) {
        os << "With probability >= " << budget.confidence << ", the ideal over-approximation I-hat lies within "
           << "Hausdorff distance " << budget.delta_total << " of the reported interval set.";
    } else {
        os << "The empirical reach-time set is empty. With probability >= " << budget.confidence
           << ", any ideal over-approximation interval within [0, t_max] has width <= " << budget.delta_total
           << "; unreachability holds unless true reach-time intervals of width <= " << budget.delta_total
           << " exist.";
    }
    st.text = os.str();
    return st;
}

}  // namespace koopreach::guarantees
