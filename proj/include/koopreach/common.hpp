#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace koopreach {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;

// ── Errors ────────────────────────────────────────────────────────────────

// Base for all library errors. The CLI maps InputError → exit 3 and
// NumericalError → exit 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InputError : Error {
    using Error::Error;
};
struct NumericalError : Error {
    using Error::Error;
};

struct DivergenceError : NumericalError {
    double time_of_blowup;
    explicit DivergenceError(double t)
        : NumericalError("state became non-finite at t=" + std::to_string(t)),
          time_of_blowup(t) {}
};
struct SingularJacobianError : NumericalError {
    using NumericalError::NumericalError;
};
struct CapacityError : InputError {
    using InputError::InputError;
};
struct ConditioningError : NumericalError {
    using NumericalError::NumericalError;
};
struct SelectionError : NumericalError {
    using NumericalError::NumericalError;
};
struct InfeasibleRegionError : InputError {
    using InputError::InputError;
};
struct DegenerateEigenfunctionError : NumericalError {
    using NumericalError::NumericalError;
};
struct MisuseError : Error {
    using Error::Error;
};
struct BudgetUndefinedError : NumericalError {
    using NumericalError::NumericalError;
};
struct HorizonError : InputError {
    using InputError::InputError;
};

// ── Deterministic RNG ─────────────────────────────────────────────────────
//
// All randomness flows through Rng. Substreams are derived by hashing
// (seed, index) so batch work is independent of scheduling and thread
// count; uniforms are produced from raw 64-bit draws so sequences are
// identical across standard library implementations.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(splitmix64(seed ^ 0x5851f42d4c957f2dULL)) {}

    // Substream k of a base seed; streams for distinct k never overlap in practice.
    static Rng substream(std::uint64_t seed, std::uint64_t k) {
        return Rng(splitmix64(seed) ^ splitmix64(k * 0x9e3779b97f4a7c15ULL + 1));
    }

    std::uint64_t next_u64() {
        state_ = splitmix64(state_);
        return state_;
    }

    // Uniform on [0, 1): 53 mantissa bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    Vector uniform_in_box(const Vector& lo, const Vector& hi) {
        Vector x(lo.size());
        for (Eigen::Index i = 0; i < lo.size(); ++i) x[i] = uniform(lo[i], hi[i]);
        return x;
    }

  private:
    std::uint64_t state_;
};

// ── Parallel map ──────────────────────────────────────────────────────────
//
// Fixed chunking (independent of the thread count) so any chunked RNG use
// stays deterministic. KOOPREACH_THREADS caps the pool.

inline unsigned thread_budget() {
    if (const char* env = std::getenv("KOOPREACH_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : hc;
}

constexpr std::size_t kParallelChunk = 1024;

// body(chunk_index, begin, end) over [0, n) in chunks of kParallelChunk.
inline void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    const std::size_t n_chunks = (n + kParallelChunk - 1) / kParallelChunk;
    const unsigned n_threads = std::min<std::size_t>(thread_budget(), n_chunks);
    if (n_threads <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            body(c, c * kParallelChunk, std::min(n, (c + 1) * kParallelChunk));
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (unsigned t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t c = next.fetch_add(1);
                if (c >= n_chunks) return;
                body(c, c * kParallelChunk, std::min(n, (c + 1) * kParallelChunk));
            }
        });
    }
    for (auto& th : pool) th.join();
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace koopreach
