#pragma once

#include "koopreach/common.hpp"
#include "koopreach/dynamics.hpp"
#include "koopreach/extrema.hpp"
#include "koopreach/observables.hpp"
#include "koopreach/regions.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <optional>

namespace koopreach::spectral {

// Learned Koopman eigenpair over a monomial dictionary. coeffs are in the
// raw (unscaled) dictionary basis, normalized so the largest-magnitude
// entry is exactly 1 + 0i.
struct Eigenpair {
    Complex lambda;       // continuous-time, 1/time
    Complex mu;           // discrete-time
    ComplexVector coeffs;
    double residual = 0;
};

// Multiplicative eigenfunction error ε(x) = c·ψ̃(x)/ψ(x) summarized by the
// magnitudes of its L/A set quantities between X₀ and X_F.
struct ErrorField {
    double l_eps_fwd = 0, l_eps_bwd = 0;  // |Lᵋ(X0,XF)|, |Lᵋ(XF,X0)|, nats
    double a_eps_fwd = 0, a_eps_bwd = 0;  // radians
    Complex scale{1.0, 0.0};
    std::size_t n_skipped = 0;
    bool assumed = false;  // true when user-supplied instead of measured
};

struct FitResult {
    Matrix G, A, L;     // (1/N)Φ_X'Φ_X, (1/N)Φ_X'Φ_Y, (1/N)Φ_Y'Φ_Y after column scaling
    Matrix K;           // (G + reg·I)⁻¹ A
    Vector col_scale;   // Φ = Ψ · diag(col_scale)
    double reg = 0;
    std::size_t n_pairs = 0;
    bool underdetermined = false;  // fewer pairs than dictionary functions
};

// Least-squares Koopman operator regression with symmetric per-column
// max-abs scaling. Scaling leaves the spectrum of K invariant (similarity)
// while taming the Gram conditioning at high degree.
inline FitResult fit_operator(const dynamics::SnapshotDataset& dataset, const observables::Dictionary& dict,
                              double reg = 1e-10) {
    if (dataset.pairs.empty()) throw InputError("fit_operator: empty dataset");
    if (dataset.dimension != dict.dimension) throw InputError("fit_operator: dimension mismatch");
    if (reg < 0) throw InputError("fit_operator: reg must be nonnegative");
    const std::size_t n = dataset.pairs.size();
    const Eigen::Index m = static_cast<Eigen::Index>(dict.size());

    std::vector<Vector> xs(n), ys(n);
    for (std::size_t k = 0; k < n; ++k) {
        xs[k] = dataset.pairs[k].first;
        ys[k] = dataset.pairs[k].second;
    }
    Matrix PX = observables::evaluate_batch(dict, xs);
    Matrix PY = observables::evaluate_batch(dict, ys);

    FitResult fit;
    fit.reg = reg;
    fit.n_pairs = n;
    fit.underdetermined = n < dict.size();
    fit.col_scale = Vector::Ones(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const double mx = std::max(PX.col(j).cwiseAbs().maxCoeff(), PY.col(j).cwiseAbs().maxCoeff());
        if (mx > 0) fit.col_scale[j] = 1.0 / mx;
        PX.col(j) *= fit.col_scale[j];
        PY.col(j) *= fit.col_scale[j];
    }

    const double inv_n = 1.0 / static_cast<double>(n);
    fit.G = inv_n * (PX.transpose() * PX);
    fit.A = inv_n * (PX.transpose() * PY);
    fit.L = inv_n * (PY.transpose() * PY);

    Eigen::SelfAdjointEigenSolver<Matrix> ges(fit.G, Eigen::EigenvaluesOnly);
    const double ev_min = ges.eigenvalues().minCoeff();
    const double ev_max = ges.eigenvalues().maxCoeff();
    if (reg == 0.0 && ev_min <= 1e-14 * std::max(ev_max, 1e-300))
        throw ConditioningError("fit_operator: G is rank-deficient with reg=0; pass a small reg (e.g. 1e-10)");

    Matrix Greg = fit.G;
    Greg.diagonal().array() += reg;
    fit.K = Greg.ldlt().solve(fit.A);
    return fit;
}

struct RawEigenpair {
    Complex mu;
    ComplexVector coeffs;  // raw dictionary basis, normalized
    double residual = 0;
};

namespace detail {

inline ComplexVector normalize_coeffs(ComplexVector c) {
    Eigen::Index imax = 0;
    double best = -1;
    for (Eigen::Index j = 0; j < c.size(); ++j) {
        const double a = std::abs(c[j]);
        if (a > best) {
            best = a;
            imax = j;
        }
    }
    if (best <= 0) throw NumericalError("normalize_coeffs: zero eigenvector");
    return c / c[imax];
}

}  // namespace detail

// Eigenpairs of K with the relative one-step residual
//   res² = [g'(L − μ̄A − μA' + |μ|²G)g] / (g'Gg)
// i.e. ‖Φ_Y g − μ Φ_X g‖ / ‖Φ_X g‖ on the training data. Sorted ascending.
inline std::vector<RawEigenpair> eigendecompose_with_residuals(const FitResult& fit) {
    Eigen::EigenSolver<Matrix> es(fit.K);
    if (es.info() != Eigen::Success) throw NumericalError("eigendecompose: eigensolver failed");
    const Eigen::Index m = fit.K.rows();
    const Eigen::MatrixXcd Gc = fit.G.cast<Complex>();
    const Eigen::MatrixXcd Ac = fit.A.cast<Complex>();
    const Eigen::MatrixXcd Lc = fit.L.cast<Complex>();

    std::vector<RawEigenpair> out;
    out.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        const Complex mu = es.eigenvalues()[i];
        ComplexVector g = es.eigenvectors().col(i);
        const Complex gGg = g.dot(Gc * g);  // g' G g (dot conjugates the left argument)
        if (std::abs(gGg) < 1e-300) continue;
        const Complex num =
            g.dot(Lc * g) - std::conj(mu) * g.dot(Ac * g) - mu * g.dot(Ac.adjoint() * g) + std::norm(mu) * gGg;
        double res2 = num.real() / gGg.real();
        if (res2 < 0 && res2 > -1e-10) res2 = 0;
        if (res2 < 0) res2 = 0;  // larger negatives are eigensolver noise on degenerate pairs
        RawEigenpair rep;
        rep.mu = mu;
        rep.coeffs = detail::normalize_coeffs(fit.col_scale.cast<Complex>().asDiagonal() * g);
        rep.residual = std::sqrt(res2);
        out.push_back(std::move(rep));
    }
    std::sort(out.begin(), out.end(), [](const RawEigenpair& a, const RawEigenpair& b) {
        return a.residual < b.residual;
    });
    return out;
}

// Principal logarithm of the discrete eigenvalue: λ = (ln|μ| + i·Arg μ)/Δt
// with Arg ∈ (−π, π].
inline Complex to_continuous(Complex mu, double dt) {
    if (mu == Complex(0.0, 0.0)) throw InputError("to_continuous: mu must be nonzero");
    if (dt <= 0) throw InputError("to_continuous: dt must be positive");
    return Complex(std::log(std::abs(mu)), std::arg(mu)) / dt;
}

inline std::vector<Eigenpair> attach_continuous(const std::vector<RawEigenpair>& raw, double dt) {
    std::vector<Eigenpair> out;
    out.reserve(raw.size());
    for (const auto& r : raw) {
        Eigenpair ep;
        ep.mu = r.mu;
        ep.coeffs = r.coeffs;
        ep.residual = r.residual;
        ep.lambda = to_continuous(r.mu, dt);
        out.push_back(std::move(ep));
    }
    return out;
}

struct SelectionCriteria {
    double max_residual = 0.1;
    std::optional<std::vector<Complex>> targets;
    std::size_t count = 2;
    double target_tol = 0.1;      // |λ − target| acceptance radius
    double trivial_tol = 1e-6;    // |μ − 1| below this is the trivial eigenpair
    double combo_tol = 1e-3;      // integer-combination rejection radius
    int combo_max_weight = 4;     // Σ n_i cap in the independence test
};

namespace detail {

// true if λ is within tol of Σ n_i λ_i for nonneg integers with Σ n_i ≤ cap
inline bool is_integer_combination(Complex lambda, const std::vector<Complex>& accepted, double tol, int cap) {
    std::vector<Complex> sums{Complex(0.0, 0.0)};
    for (int w = 0; w <= cap; ++w) {
        // breadth-first over total weight
        std::vector<Complex> next;
        for (const Complex& s : sums) {
            if (std::abs(lambda - s) < tol) return true;
            for (const Complex& a : accepted) next.push_back(s + a);
        }
        sums = std::move(next);
        if (sums.empty()) break;
    }
    return false;
}

}  // namespace detail

// Picks principal eigenpairs: by proximity to requested target eigenvalues,
// or the lowest-residual candidates that are not integer combinations of
// already-selected ones. The trivial μ≈1 pair is always dropped.
inline std::vector<Eigenpair> select_principal(const std::vector<Eigenpair>& candidates,
                                               const SelectionCriteria& criteria) {
    if (candidates.empty()) throw InputError("select_principal: no candidates");
    std::vector<Eigenpair> pool;
    for (const auto& c : candidates) {
        if (std::abs(c.mu - Complex(1.0, 0.0)) <= criteria.trivial_tol) continue;
        pool.push_back(c);
    }
    std::sort(pool.begin(), pool.end(), [](const Eigenpair& a, const Eigenpair& b) {
        return a.residual < b.residual;
    });

    const auto best_residuals = [&](std::size_t k) {
        std::string msg;
        for (std::size_t i = 0; i < std::min(k, pool.size()); ++i)
            msg += " (λ=" + std::to_string(pool[i].lambda.real()) + (pool[i].lambda.imag() >= 0 ? "+" : "") +
                   std::to_string(pool[i].lambda.imag()) + "i, res=" + std::to_string(pool[i].residual) + ")";
        return msg;
    };

    std::vector<Eigenpair> selected;
    if (criteria.targets) {
        for (const Complex& target : *criteria.targets) {
            const Eigenpair* best = nullptr;
            for (const auto& c : pool) {
                if (c.residual > criteria.max_residual) continue;
                if (std::abs(c.lambda - target) > criteria.target_tol) continue;
                if (!best || c.residual < best->residual) best = &c;
            }
            if (!best)
                throw SelectionError("select_principal: no candidate near target λ=" + std::to_string(target.real()) +
                                     (target.imag() >= 0 ? "+" : "") + std::to_string(target.imag()) +
                                     "i passes max_residual; best candidates:" + best_residuals(5));
            selected.push_back(*best);
        }
        return selected;
    }

    std::vector<Complex> accepted_lambdas;
    for (const auto& c : pool) {
        if (selected.size() >= criteria.count) break;
        if (c.residual > criteria.max_residual) break;  // pool is residual-sorted
        if (detail::is_integer_combination(c.lambda, accepted_lambdas, criteria.combo_tol, criteria.combo_max_weight))
            continue;
        selected.push_back(c);
        accepted_lambdas.push_back(c.lambda);
    }
    if (selected.empty())
        throw SelectionError("select_principal: no nontrivial candidate passes max_residual=" +
                             std::to_string(criteria.max_residual) + "; best candidates:" + best_residuals(5));
    return selected;
}

// ── Eigenfunction error field vs a reference ──────────────────────────────

using ReferenceField = std::function<Complex(const Vector&)>;

// Complex least-squares alignment c = argmin Σ|c·ψ̃(x_j) − ψ(x_j)|², then the
// pointwise ratio ε = c·ψ̃/ψ with its L/A set quantities estimated on the
// validation samples of each set.
inline ErrorField align_and_error_field(const observables::Dictionary& dict, const Eigenpair& approx,
                                        const ReferenceField& reference, const regions::Region& x0,
                                        const regions::Region& xf, std::size_t n_val, std::uint64_t seed) {
    if (n_val < 2) throw InputError("align_and_error_field: n_val too small");
    const std::size_t n0 = n_val / 2;
    const std::size_t nf = n_val - n0;
    const std::vector<Vector> pts0 = regions::sample_iid(x0, n0, splitmix64(seed ^ 0x55AA));
    const std::vector<Vector> ptsf = regions::sample_iid(xf, nf, splitmix64(seed ^ 0xAA55));

    const std::vector<Complex> approx0 = observables::evaluate_function_batch(dict, approx.coeffs, pts0);
    const std::vector<Complex> approxf = observables::evaluate_function_batch(dict, approx.coeffs, ptsf);

    ErrorField field;
    Complex num{0, 0};
    double den = 0;
    std::vector<Complex> ref0(n0), reff(nf);
    for (std::size_t k = 0; k < n0; ++k) {
        ref0[k] = reference(pts0[k]);
        num += std::conj(approx0[k]) * ref0[k];
        den += std::norm(approx0[k]);
    }
    for (std::size_t k = 0; k < nf; ++k) {
        reff[k] = reference(ptsf[k]);
        num += std::conj(approxf[k]) * reff[k];
        den += std::norm(approxf[k]);
    }
    if (den < 1e-300) throw DegenerateEigenfunctionError("align_and_error_field: approximation vanishes on samples");
    field.scale = num / den;
    if (field.scale == Complex(0.0, 0.0))
        throw DegenerateEigenfunctionError("align_and_error_field: optimal scale is zero");

    std::vector<Complex> eps0, epsf;
    eps0.reserve(n0);
    epsf.reserve(nf);
    for (std::size_t k = 0; k < n0; ++k) {
        if (std::abs(ref0[k]) < 1e-12) {
            ++field.n_skipped;
            continue;
        }
        eps0.push_back(field.scale * approx0[k] / ref0[k]);
    }
    for (std::size_t k = 0; k < nf; ++k) {
        if (std::abs(reff[k]) < 1e-12) {
            ++field.n_skipped;
            continue;
        }
        epsf.push_back(field.scale * approxf[k] / reff[k]);
    }
    if (eps0.empty() || epsf.empty())
        throw DegenerateEigenfunctionError("align_and_error_field: reference vanishes on a whole sample set");

    std::vector<Complex> all = eps0;
    all.insert(all.end(), epsf.begin(), epsf.end());
    const double center = extrema::circular_mean_phase(all);
    const extrema::ExtremaEstimate e0 = extrema::estimate_extrema(eps0, center);
    const extrema::ExtremaEstimate ef = extrema::estimate_extrema(epsf, center);

    field.l_eps_fwd = std::abs(extrema::L_hat(e0, ef));
    field.l_eps_bwd = std::abs(extrema::L_hat(ef, e0));
    field.a_eps_fwd = std::abs(extrema::A_hat(e0, ef));
    field.a_eps_bwd = std::abs(extrema::A_hat(ef, e0));
    return field;
}

}  // namespace koopreach::spectral
