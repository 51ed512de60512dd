#pragma once

#include "koopreach/common.hpp"
#include "koopreach/extrema.hpp"

#include <algorithm>
#include <cmath>

namespace koopreach::reachtime {

inline constexpr double kReFloor = 1e-9;
inline constexpr double kImFloor = 1e-9;
inline constexpr double kMergeGap = 1e-12;

// Finite union of closed intervals inside [0, t_max], kept sorted, disjoint
// and merged. An empty list is evidence of unreachability.
class TimeIntervalSet {
  public:
    TimeIntervalSet() = default;
    explicit TimeIntervalSet(double t_max) : t_max_(check_tmax(t_max)) {}

    static TimeIntervalSet empty(double t_max) { return TimeIntervalSet(t_max); }
    static TimeIntervalSet full(double t_max) {
        TimeIntervalSet s(t_max);
        s.iv_.emplace_back(0.0, t_max);
        return s;
    }
    static TimeIntervalSet from_intervals(std::vector<std::pair<double, double>> iv, double t_max) {
        TimeIntervalSet s(t_max);
        s.iv_ = std::move(iv);
        s.normalize();
        return s;
    }

    double t_max() const { return t_max_; }
    bool is_empty() const { return iv_.empty(); }
    const std::vector<std::pair<double, double>>& intervals() const { return iv_; }

    TimeIntervalSet intersect(const TimeIntervalSet& other) const {
        TimeIntervalSet out(std::min(t_max_, other.t_max_));
        std::size_t i = 0, j = 0;
        while (i < iv_.size() && j < other.iv_.size()) {
            const double lo = std::max(iv_[i].first, other.iv_[j].first);
            const double hi = std::min(iv_[i].second, other.iv_[j].second);
            if (lo <= hi) out.iv_.emplace_back(lo, hi);
            if (iv_[i].second < other.iv_[j].second)
                ++i;
            else
                ++j;
        }
        out.normalize();
        return out;
    }

    TimeIntervalSet unite(const TimeIntervalSet& other) const {
        TimeIntervalSet out(std::max(t_max_, other.t_max_));
        out.iv_ = iv_;
        out.iv_.insert(out.iv_.end(), other.iv_.begin(), other.iv_.end());
        out.normalize();
        return out;
    }

    // widen every interval by delta ≥ 0 on both sides, clamped to [0, t_max]
    TimeIntervalSet inflated(double delta) const {
        TimeIntervalSet out(t_max_);
        out.iv_ = iv_;
        for (auto& [lo, hi] : out.iv_) {
            lo -= delta;
            hi += delta;
        }
        out.normalize();
        return out;
    }

    bool covers(double t) const {
        for (const auto& [lo, hi] : iv_)
            if (t >= lo && t <= hi) return true;
        return false;
    }

    double total_length() const {
        double len = 0;
        for (const auto& [lo, hi] : iv_) len += hi - lo;
        return len;
    }

  private:
    static double check_tmax(double t) {
        if (!(t > 0)) throw InputError("TimeIntervalSet: t_max must be positive");
        return t;
    }

    void normalize() {
        std::vector<std::pair<double, double>> keep;
        keep.reserve(iv_.size());
        for (auto [lo, hi] : iv_) {
            lo = std::max(lo, 0.0);
            hi = std::min(hi, t_max_);
            if (lo <= hi) keep.emplace_back(lo, hi);
        }
        std::sort(keep.begin(), keep.end());
        iv_.clear();
        for (const auto& [lo, hi] : keep) {
            if (!iv_.empty() && lo <= iv_.back().second + kMergeGap)
                iv_.back().second = std::max(iv_.back().second, hi);
            else
                iv_.emplace_back(lo, hi);
        }
    }

    std::vector<std::pair<double, double>> iv_;
    double t_max_ = 1.0;
};

// Per-eigenpair set quantities feeding the reach-time relaxations:
//   L_fwd = L̃ᵠ(X0,XF), L_bwd = L̃ᵠ(XF,X0), A likewise for phases.
struct EigenpairQuantities {
    Complex lambda;
    double L_fwd = 0, L_bwd = 0;
    double A_fwd = 0, A_bwd = 0;
    bool has_phase = false;  // |Im λ| above the floor and phases reliable
};

struct ComboWeight {
    std::vector<double> alphas;
};

// α-weighted sum of per-pair quantities; this is exactly the form in which
// the magnitude/phase relaxations admit combination eigenpairs.
inline EigenpairQuantities combine_quantities(const std::vector<EigenpairQuantities>& pairs,
                                              const ComboWeight& combo) {
    if (combo.alphas.size() != pairs.size()) throw InputError("combine_quantities: weight size mismatch");
    EigenpairQuantities q;
    q.lambda = Complex(0, 0);
    bool any_positive = false;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double a = combo.alphas[i];
        if (a < 0) throw InputError("combine_quantities: weights must be nonnegative");
        if (a > 0) any_positive = true;
        q.lambda += a * pairs[i].lambda;
        q.L_fwd += a * pairs[i].L_fwd;
        q.L_bwd += a * pairs[i].L_bwd;
        q.A_fwd += a * pairs[i].A_fwd;
        q.A_bwd += a * pairs[i].A_bwd;
    }
    if (!any_positive) throw InputError("combine_quantities: at least one weight must be positive");
    q.has_phase = std::abs(q.lambda.imag()) > kImFloor;
    return q;
}

// Magnitude window: Re(λ)·T ∈ [−L_bwd, L_fwd], clamped to [0, t_max].
inline TimeIntervalSet interval_mag(const EigenpairQuantities& q, double t_max) {
    const double re = q.lambda.real();
    if (std::abs(re) <= kReFloor) {
        const bool feasible = (-q.L_bwd <= 0.0) && (0.0 <= q.L_fwd);
        return feasible ? TimeIntervalSet::full(t_max) : TimeIntervalSet::empty(t_max);
    }
    double lo, hi;
    if (re > 0) {
        lo = -q.L_bwd / re;
        hi = q.L_fwd / re;
    } else {
        lo = q.L_fwd / re;
        hi = -q.L_bwd / re;
    }
    lo = std::max(lo, 0.0);
    if (lo > hi) return TimeIntervalSet::empty(t_max);
    return TimeIntervalSet::from_intervals({{lo, hi}}, t_max);
}

// Phase windows: Im(λ)·T ∈ [−A_bwd, A_fwd] + 2mπ, unioned over every m
// whose window meets [0, t_max]. Derived from the appendix relation; the
// main-text display has its bracket ordering swapped.
inline TimeIntervalSet interval_phase(const EigenpairQuantities& q, double t_max) {
    const double im = q.lambda.imag();
    if (!q.has_phase || std::abs(im) <= kImFloor) return TimeIntervalSet::full(t_max);
    if (q.A_fwd < -q.A_bwd) return TimeIntervalSet::empty(t_max);  // infeasible for every m

    const double two_pi = 2.0 * extrema::kPi;
    long m_lo, m_hi;
    if (im > 0) {
        m_lo = static_cast<long>(std::ceil(-q.A_fwd / two_pi - 1e-12));
        m_hi = static_cast<long>(std::floor((t_max * im + q.A_bwd) / two_pi + 1e-12));
    } else {
        m_lo = static_cast<long>(std::ceil((t_max * im - q.A_fwd) / two_pi - 1e-12));
        m_hi = static_cast<long>(std::floor(q.A_bwd / two_pi + 1e-12));
    }
    if (m_hi < m_lo) return TimeIntervalSet::empty(t_max);
    if (m_hi - m_lo + 1 > 1000000)
        throw HorizonError("interval_phase: more than 1e6 phase windows overlap the horizon");

    std::vector<std::pair<double, double>> windows;
    windows.reserve(static_cast<std::size_t>(m_hi - m_lo + 1));
    for (long m = m_lo; m <= m_hi; ++m) {
        const double shift = two_pi * static_cast<double>(m);
        double lo, hi;
        if (im > 0) {
            lo = (-q.A_bwd + shift) / im;
            hi = (q.A_fwd + shift) / im;
        } else {
            lo = (q.A_fwd + shift) / im;
            hi = (-q.A_bwd + shift) / im;
        }
        windows.emplace_back(lo, hi);
    }
    return TimeIntervalSet::from_intervals(std::move(windows), t_max);
}

inline TimeIntervalSet combine_eigenpair(const EigenpairQuantities& q, double t_max) {
    return interval_mag(q, t_max).intersect(interval_phase(q, t_max));
}

// All unit weights plus every nonzero nonnegative-integer weight vector with
// Σα ≤ max_weight (duplicates removed): the integer slice of the eigenpair
// semigroup.
inline std::vector<ComboWeight> enumerate_combos(std::size_t m_pairs, int max_weight) {
    if (m_pairs == 0) throw InputError("enumerate_combos: m_pairs must be positive");
    std::vector<ComboWeight> combos;
    for (std::size_t i = 0; i < m_pairs; ++i) {
        ComboWeight w;
        w.alphas.assign(m_pairs, 0.0);
        w.alphas[i] = 1.0;
        combos.push_back(std::move(w));
    }
    if (max_weight >= 1) {
        std::vector<double> cur(m_pairs, 0.0);
        std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int remaining) {
            if (pos == m_pairs) {
                double total = 0;
                std::size_t nonzero = 0, unit_at = 0;
                for (std::size_t i = 0; i < m_pairs; ++i) {
                    total += cur[i];
                    if (cur[i] != 0.0) {
                        ++nonzero;
                        unit_at = i;
                    }
                }
                if (total < 1) return;
                if (nonzero == 1 && cur[unit_at] == 1.0) return;  // unit vectors already present
                combos.push_back(ComboWeight{cur});
                return;
            }
            for (int k = 0; k <= remaining; ++k) {
                cur[pos] = static_cast<double>(k);
                rec(pos + 1, remaining - k);
            }
            cur[pos] = 0.0;
        };
        rec(0, max_weight);
    }
    return combos;
}

enum class Verdict { UnreachableCertified, InconclusiveWithBound };

inline const char* verdict_name(Verdict v) {
    return v == Verdict::UnreachableCertified ? "unreachable_certified" : "inconclusive_with_bound";
}

struct ComboResult {
    ComboWeight weights;
    Complex lambda;
    TimeIntervalSet mag, phase, combined;
};

struct VerifyResult {
    TimeIntervalSet final_set;
    Verdict verdict = Verdict::InconclusiveWithBound;
    std::vector<ComboResult> per_combo;
};

// Intersection over all combination eigenpairs; an empty intersection
// violates the necessary reachability condition.
inline VerifyResult verify(const std::vector<EigenpairQuantities>& pairs, const std::vector<ComboWeight>& combos,
                           double t_max) {
    if (pairs.empty()) throw InputError("verify: need at least one eigenpair");
    if (combos.empty()) throw InputError("verify: need at least one combination weight");
    VerifyResult res;
    res.final_set = TimeIntervalSet::full(t_max);
    res.per_combo.reserve(combos.size());
    for (const auto& combo : combos) {
        ComboResult cr;
        cr.weights = combo;
        const EigenpairQuantities q = combine_quantities(pairs, combo);
        cr.lambda = q.lambda;
        cr.mag = interval_mag(q, t_max);
        cr.phase = interval_phase(q, t_max);
        cr.combined = cr.mag.intersect(cr.phase);
        res.final_set = res.final_set.intersect(cr.combined);
        res.per_combo.push_back(std::move(cr));
    }
    res.verdict = res.final_set.is_empty() ? Verdict::UnreachableCertified : Verdict::InconclusiveWithBound;
    return res;
}

}  // namespace koopreach::reachtime
