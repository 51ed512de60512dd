#pragma once

#include "koopreach/common.hpp"

#include <algorithm>
#include <numeric>

namespace koopreach::observables {

// Monomial dictionary: all multi-indices with total degree ≤ degree, in
// graded lexicographic order. Entry 0 is always the constant function and
// entries 1..dimension are the coordinates, which downstream eigenvalue
// sanity checks rely on.
struct Dictionary {
    int dimension = 0;
    int degree = 0;
    std::vector<std::vector<int>> exponents;

    std::size_t size() const { return exponents.size(); }
};

inline std::size_t dictionary_size(int dimension, int degree) {
    // C(dimension + degree, degree), computed without overflow for sane inputs
    std::size_t num = 1;
    for (int i = 1; i <= degree; ++i) num = num * static_cast<std::size_t>(dimension + i) / static_cast<std::size_t>(i);
    return num;
}

inline Dictionary build_dictionary(int dimension, int degree, std::size_t cap = 5000) {
    if (dimension < 1) throw InputError("build_dictionary: dimension must be positive");
    if (degree < 0) throw InputError("build_dictionary: degree must be nonnegative");
    const std::size_t total = dictionary_size(dimension, degree);
    if (total > cap)
        throw CapacityError("build_dictionary: size " + std::to_string(total) + " exceeds cap " + std::to_string(cap));

    Dictionary dict;
    dict.dimension = dimension;
    dict.degree = degree;
    dict.exponents.reserve(total);

    // grade by total degree, lexicographic within each grade
    std::vector<int> e(static_cast<std::size_t>(dimension), 0);
    for (int d = 0; d <= degree; ++d) {
        // enumerate exponent vectors summing to exactly d, lex order
        std::function<void(int, int)> rec = [&](int pos, int remaining) {
            if (pos == dimension - 1) {
                e[static_cast<std::size_t>(pos)] = remaining;
                dict.exponents.push_back(e);
                return;
            }
            for (int k = remaining; k >= 0; --k) {
                e[static_cast<std::size_t>(pos)] = k;
                rec(pos + 1, remaining - k);
            }
        };
        rec(0, d);
    }
    return dict;
}

inline double evaluate_monomial(const std::vector<int>& exps, const Vector& x) {
    double v = 1.0;
    for (std::size_t i = 0; i < exps.size(); ++i) {
        for (int p = 0; p < exps[i]; ++p) v *= x[static_cast<Eigen::Index>(i)];
    }
    return v;
}

inline Vector evaluate(const Dictionary& dict, const Vector& x) {
    if (x.size() != dict.dimension) throw InputError("evaluate: dimension mismatch");
    Vector out(static_cast<Eigen::Index>(dict.size()));
    for (std::size_t j = 0; j < dict.size(); ++j)
        out[static_cast<Eigen::Index>(j)] = evaluate_monomial(dict.exponents[j], x);
    return out;
}

// Rows are points, columns dictionary entries. Computed per coordinate power
// table so large batches stay cheap.
inline Matrix evaluate_batch(const Dictionary& dict, const std::vector<Vector>& points) {
    const Eigen::Index n = static_cast<Eigen::Index>(points.size());
    const Eigen::Index m = static_cast<Eigen::Index>(dict.size());
    Matrix out(n, m);
    if (n == 0) return out;

    // powers[i][p] = x_i^p for the current point
    std::vector<std::vector<double>> powers(static_cast<std::size_t>(dict.dimension),
                                            std::vector<double>(static_cast<std::size_t>(dict.degree) + 1, 1.0));
    for (Eigen::Index k = 0; k < n; ++k) {
        const Vector& x = points[static_cast<std::size_t>(k)];
        if (x.size() != dict.dimension) throw InputError("evaluate_batch: dimension mismatch");
        for (int i = 0; i < dict.dimension; ++i)
            for (int p = 1; p <= dict.degree; ++p)
                powers[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)] =
                    powers[static_cast<std::size_t>(i)][static_cast<std::size_t>(p - 1)] * x[i];
        for (Eigen::Index j = 0; j < m; ++j) {
            double v = 1.0;
            const auto& exps = dict.exponents[static_cast<std::size_t>(j)];
            for (int i = 0; i < dict.dimension; ++i) {
                const int p = exps[static_cast<std::size_t>(i)];
                if (p > 0) v *= powers[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)];
            }
            out(k, j) = v;
        }
    }
    return out;
}

// ψ̃(x) = Σ_j coeffs_j · monomial_j(x) for complex coefficient vectors.
inline Complex evaluate_function(const Dictionary& dict, const ComplexVector& coeffs, const Vector& x) {
    const Vector feats = evaluate(dict, x);
    Complex acc{0.0, 0.0};
    for (Eigen::Index j = 0; j < feats.size(); ++j) acc += coeffs[j] * feats[j];
    return acc;
}

inline std::vector<Complex> evaluate_function_batch(const Dictionary& dict, const ComplexVector& coeffs,
                                                    const std::vector<Vector>& points) {
    const Matrix feats = evaluate_batch(dict, points);
    const Vector re = feats * coeffs.real();
    const Vector im = feats * coeffs.imag();
    std::vector<Complex> out(points.size());
    for (std::size_t k = 0; k < points.size(); ++k)
        out[k] = Complex(re[static_cast<Eigen::Index>(k)], im[static_cast<Eigen::Index>(k)]);
    return out;
}

}  // namespace koopreach::observables
