#pragma once

#include "koopreach/common.hpp"

#include <cmath>
#include <memory>
#include <optional>
#include <variant>

namespace koopreach::regions {

struct Box {
    Vector lo, hi;

    int dimension() const { return static_cast<int>(lo.size()); }
    double volume() const {
        double v = 1.0;
        for (Eigen::Index i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
        return v;
    }
    bool contains(const Vector& x) const {
        for (Eigen::Index i = 0; i < lo.size(); ++i)
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        return true;
    }
    // centered inflation by a positive factor
    Box inflated(double factor) const {
        Box out = *this;
        for (Eigen::Index i = 0; i < lo.size(); ++i) {
            const double c = 0.5 * (lo[i] + hi[i]);
            const double h = 0.5 * (hi[i] - lo[i]) * factor;
            out.lo[i] = c - h;
            out.hi[i] = c + h;
        }
        return out;
    }
};

inline Box make_box(std::initializer_list<double> lo, std::initializer_list<double> hi) {
    Box b;
    b.lo = Eigen::Map<const Vector>(std::data(lo), static_cast<Eigen::Index>(lo.size()));
    b.hi = Eigen::Map<const Vector>(std::data(hi), static_cast<Eigen::Index>(hi.size()));
    if (b.lo.size() != b.hi.size()) throw InputError("make_box: lo/hi size mismatch");
    for (Eigen::Index i = 0; i < b.lo.size(); ++i)
        if (b.lo[i] > b.hi[i]) throw InputError("make_box: lo > hi");
    return b;
}

// The bump-shaped scalar field of the first benchmark's set definitions:
//   h = -(1 - (x1-x1c)/3 + a((x2-x2c)/s)^5 + b((x1-x1c)/s)^3)
//       * exp(-(((x1-x1c)/s)^2 + ((x2-x2c)/s)^2))
struct BumpField {
    double x1c = 0, x2c = 0, a = 0, b = 0, s = 1;

    double operator()(const Vector& x) const {
        const double u1 = (x[0] - x1c) / s;
        const double u2 = (x[1] - x2c) / s;
        const double poly = 1.0 - (x[0] - x1c) / 3.0 + a * std::pow(u2, 5) + b * std::pow(u1, 3);
        return -poly * std::exp(-(u1 * u1 + u2 * u2));
    }
};

// Named scalar field with parameters; the only named family is "bump".
struct ScalarFieldSpec {
    std::string name;
    std::vector<double> params;

    double operator()(const Vector& x) const {
        if (name == "bump") {
            if (params.size() != 5) throw InputError("bump field needs 5 parameters");
            return BumpField{params[0], params[1], params[2], params[3], params[4]}(x);
        }
        throw InputError("unknown scalar field '" + name + "'");
    }
};

struct Sublevel {
    ScalarFieldSpec field;
    double threshold = 0;
    Box bounding_box;

    bool contains(const Vector& x) const { return bounding_box.contains(x) && field(x) <= threshold; }
};

class Region;

struct UnionRegion {
    std::vector<Region> members;
    std::vector<double> weights;  // sampling weights ∝ estimated member volumes
};

class Region {
  public:
    std::variant<Box, Sublevel, UnionRegion> v;

    Region() : v(Box{}) {}
    Region(Box b) : v(std::move(b)) {}
    Region(Sublevel s) : v(std::move(s)) {}
    Region(UnionRegion u) : v(std::move(u)) {}

    int dimension() const;
    bool is_box() const { return std::holds_alternative<Box>(v); }
    const Box& as_box() const {
        if (!is_box()) throw InputError("region is not a box");
        return std::get<Box>(v);
    }
    Box bounding() const;
};

inline bool contains(const Region& r, const Vector& x);

inline int Region::dimension() const {
    if (auto* b = std::get_if<Box>(&v)) return b->dimension();
    if (auto* s = std::get_if<Sublevel>(&v)) return s->bounding_box.dimension();
    const auto& u = std::get<UnionRegion>(v);
    if (u.members.empty()) throw InputError("empty union region");
    return u.members.front().dimension();
}

inline Box Region::bounding() const {
    if (auto* b = std::get_if<Box>(&v)) return *b;
    if (auto* s = std::get_if<Sublevel>(&v)) return s->bounding_box;
    const auto& u = std::get<UnionRegion>(v);
    Box out = u.members.front().bounding();
    for (std::size_t i = 1; i < u.members.size(); ++i) {
        const Box mb = u.members[i].bounding();
        out.lo = out.lo.cwiseMin(mb.lo);
        out.hi = out.hi.cwiseMax(mb.hi);
    }
    return out;
}

inline bool contains(const Region& r, const Vector& x) {
    if (x.size() != r.dimension()) throw InputError("contains: dimension mismatch");
    if (auto* b = std::get_if<Box>(&r.v)) return b->contains(x);
    if (auto* s = std::get_if<Sublevel>(&r.v)) return s->contains(x);
    const auto& u = std::get<UnionRegion>(r.v);
    for (const auto& m : u.members)
        if (contains(m, x)) return true;
    return false;
}

namespace detail {

// Acceptance-rate estimate for a sublevel set within its bounding box,
// used for union sampling weights. Fixed internal seed: weights are a
// construction-time property, not part of the caller's random stream.
inline double acceptance_rate(const Sublevel& s, std::size_t n_proposals = 10000) {
    Rng rng(0xACCEB0F5u);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < n_proposals; ++k) {
        const Vector x = rng.uniform_in_box(s.bounding_box.lo, s.bounding_box.hi);
        if (s.contains(x)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(n_proposals);
}

inline double estimate_volume(const Region& r) {
    if (auto* b = std::get_if<Box>(&r.v)) return b->volume();
    if (auto* s = std::get_if<Sublevel>(&r.v)) return s->bounding_box.volume() * acceptance_rate(*s);
    const auto& u = std::get<UnionRegion>(r.v);
    double v = 0;
    for (const auto& m : u.members) v += estimate_volume(m);
    return v;
}

inline Vector sample_one(const Region& r, Rng& rng) {
    if (auto* b = std::get_if<Box>(&r.v)) return rng.uniform_in_box(b->lo, b->hi);
    if (auto* s = std::get_if<Sublevel>(&r.v)) {
        std::size_t proposals = 0;
        for (;;) {
            const Vector x = rng.uniform_in_box(s->bounding_box.lo, s->bounding_box.hi);
            ++proposals;
            if (s->contains(x)) return x;
            if (proposals >= 1000000)
                throw InfeasibleRegionError("sublevel rejection produced no acceptance in 1e6 proposals");
        }
    }
    const auto& u = std::get<UnionRegion>(r.v);
    double total = 0;
    for (double w : u.weights) total += w;
    double pick = rng.uniform() * total;
    for (std::size_t i = 0; i < u.members.size(); ++i) {
        pick -= u.weights[i];
        if (pick <= 0 || i + 1 == u.members.size()) return sample_one(u.members[i], rng);
    }
    return sample_one(u.members.back(), rng);
}

}  // namespace detail

// Validated constructors -----------------------------------------------------

// The bounding box must truly contain the sublevel set; checked by sampling
// the box boundary and requiring no boundary sample to be inside the set.
inline Region make_sublevel(ScalarFieldSpec field, double threshold, Box bounding_box,
                            std::size_t n_boundary_samples = 2048) {
    Sublevel s{std::move(field), threshold, std::move(bounding_box)};
    const int dim = s.bounding_box.dimension();
    Rng rng(0xB0D1B0D1u);
    for (std::size_t k = 0; k < n_boundary_samples; ++k) {
        Vector x = rng.uniform_in_box(s.bounding_box.lo, s.bounding_box.hi);
        // pin one random coordinate to a random face
        const int i = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(dim));
        x[i] = (rng.next_u64() & 1) ? s.bounding_box.hi[i] : s.bounding_box.lo[i];
        if (s.field(x) <= s.threshold)
            throw InputError("make_sublevel: bounding box boundary intersects the sublevel set");
    }
    return Region(std::move(s));
}

// Bump sublevel with the default bounding box center ± box_radius·s.
inline Region make_bump_sublevel(const BumpField& h, double threshold, double box_radius = 4.5) {
    Box bb;
    bb.lo = Vector(2);
    bb.hi = Vector(2);
    bb.lo << h.x1c - box_radius * h.s, h.x2c - box_radius * h.s;
    bb.hi << h.x1c + box_radius * h.s, h.x2c + box_radius * h.s;
    return make_sublevel(ScalarFieldSpec{"bump", {h.x1c, h.x2c, h.a, h.b, h.s}}, threshold, bb);
}

inline Region make_union(std::vector<Region> members) {
    if (members.empty()) throw InputError("make_union: empty member list");
    UnionRegion u;
    u.members = std::move(members);
    u.weights.reserve(u.members.size());
    for (const auto& m : u.members) u.weights.push_back(detail::estimate_volume(m));
    return Region(std::move(u));
}

// i.i.d. uniform sampling ----------------------------------------------------

// Deterministic given seed; chunked substreams keep the output independent
// of the thread count.
inline std::vector<Vector> sample_iid(const Region& region, std::size_t n, std::uint64_t seed) {
    std::vector<Vector> out(n);
    // feasibility probe for rejection-sampled variants
    if (auto* s = std::get_if<Sublevel>(&region.v)) {
        Rng probe = Rng::substream(seed, 0xFEA51B1EULL);
        std::size_t hits = 0;
        const std::size_t n_probe = 20000;
        for (std::size_t k = 0; k < n_probe; ++k)
            if (s->contains(probe.uniform_in_box(s->bounding_box.lo, s->bounding_box.hi))) ++hits;
        const double rate = static_cast<double>(hits) / static_cast<double>(n_probe);
        if (rate < 1e-4) {
            // long probe before declaring the region infeasible
            for (std::size_t k = n_probe; k < 1000000; ++k)
                if (s->contains(probe.uniform_in_box(s->bounding_box.lo, s->bounding_box.hi))) ++hits;
            const double long_rate = static_cast<double>(hits) / 1e6;
            if (long_rate < 1e-4)
                throw InfeasibleRegionError("region acceptance rate " + std::to_string(long_rate) +
                                            " below 1e-4 after 1e6 proposals");
        }
    }
    parallel_chunks(n, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Rng rng = Rng::substream(seed, chunk);
        for (std::size_t k = begin; k < end; ++k) out[k] = detail::sample_one(region, rng);
    });
    return out;
}

enum class Extremum { Sup, Inf };

// Plug-in estimate of the measure of the ε-optimal region
//   sup: {x : max(f) - f(x) ≤ eps},  inf: {x : f(x) - min(f) ≤ eps}
// using the probe-empirical extremum in place of the true one.
inline double estimate_eps_measure(const Region& region, const std::function<double(const Vector&)>& fn,
                                   double eps, Extremum which, std::size_t n_probe, std::uint64_t seed) {
    if (n_probe < 1000) throw InputError("estimate_eps_measure: n_probe must be at least 1000");
    if (eps <= 0) throw InputError("estimate_eps_measure: eps must be positive");
    const std::vector<Vector> pts = sample_iid(region, n_probe, seed);
    std::vector<double> vals(n_probe);
    for (std::size_t k = 0; k < n_probe; ++k) vals[k] = fn(pts[k]);
    double ext = vals[0];
    for (double v : vals) ext = (which == Extremum::Sup) ? std::max(ext, v) : std::min(ext, v);
    std::size_t inside = 0;
    for (double v : vals) {
        const double gap = (which == Extremum::Sup) ? ext - v : v - ext;
        if (gap <= eps) ++inside;
    }
    const double frac = static_cast<double>(inside) / static_cast<double>(n_probe);
    return std::max(frac, 1.0 / static_cast<double>(n_probe));
}

}  // namespace koopreach::regions
