#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "proxipair/body.hpp"
#include "proxipair/error.hpp"
#include "proxipair/instance.hpp"
#include "proxipair/sampling.hpp"
#include "proxipair/space.hpp"

namespace proxipair {

/// Where a self-map is defined: on all of A u B, or only on A0 u B0.
enum class Domain { bodies, proximal_sets };

struct AffineMap {
    Matrix matrix;
    Point offset;

    Point operator()(const Point& x) const { return matrix * x + offset; }
};

struct PiecewiseAffineMap {
    AffineMap on_a;
    AffineMap on_b;
};

struct BlackboxMap {
    std::function<Point(const Point&)> eval;
};

/// Which side of the pair a point belongs to. Points in neither body are
/// attributed to the nearer one (A on ties).
inline Side side_of(const ProximityInstance& inst, const Point& x) {
    if (contains(inst.A(), x, inst.tol())) return Side::A;
    if (contains(inst.B(), x, inst.tol())) return Side::B;
    return distance_to(inst.A(), x) <= distance_to(inst.B(), x) ? Side::A : Side::B;
}

/// A self-map of A u B with a declared cyclic/noncyclic mode.
class MapSpec {
public:
    using Kind = std::variant<AffineMap, PiecewiseAffineMap, BlackboxMap>;

    static MapSpec affine(std::string name, std::shared_ptr<const ProximityInstance> inst,
                          Matrix matrix, Point offset, Mode mode) {
        check_affine(*inst, matrix, offset, "");
        return MapSpec(std::move(name), std::move(inst),
                       AffineMap{std::move(matrix), std::move(offset)}, mode);
    }

    static MapSpec piecewise(std::string name, std::shared_ptr<const ProximityInstance> inst,
                             AffineMap on_a, AffineMap on_b, Mode mode) {
        check_affine(*inst, on_a.matrix, on_a.offset, "on_A.");
        check_affine(*inst, on_b.matrix, on_b.offset, "on_B.");
        return MapSpec(std::move(name), std::move(inst),
                       PiecewiseAffineMap{std::move(on_a), std::move(on_b)}, mode);
    }

    /// `eval` must be a pure function of its argument.
    static MapSpec blackbox(std::string name, std::shared_ptr<const ProximityInstance> inst,
                            std::function<Point(const Point&)> eval, Mode mode) {
        if (!eval) throw InvalidArgument("blackbox map needs an evaluation procedure");
        return MapSpec(std::move(name), std::move(inst), BlackboxMap{std::move(eval)}, mode);
    }

    static MapSpec identity(std::string name, std::shared_ptr<const ProximityInstance> inst,
                            Mode mode = Mode::noncyclic) {
        const auto n = static_cast<Eigen::Index>(inst->space().dim());
        return affine(std::move(name), std::move(inst), Matrix::Identity(n, n), Point::Zero(n),
                      mode);
    }

    Point apply(const Point& x) const {
        inst_->space().check(x);
        struct Eval {
            const ProximityInstance& inst;
            const Point& x;
            Point operator()(const AffineMap& m) const { return m(x); }
            Point operator()(const PiecewiseAffineMap& m) const {
                return side_of(inst, x) == Side::A ? m.on_a(x) : m.on_b(x);
            }
            Point operator()(const BlackboxMap& m) const {
                Point y = m.eval(x);
                inst.space().check(y);
                return y;
            }
        };
        return std::visit(Eval{*inst_, x}, kind_);
    }

    const std::string& name() const noexcept { return name_; }
    Mode mode() const noexcept { return mode_; }
    Domain domain() const noexcept { return Domain::bodies; }
    const Kind& kind() const noexcept { return kind_; }
    const ProximityInstance& instance() const noexcept { return *inst_; }
    const std::shared_ptr<const ProximityInstance>& instance_ptr() const noexcept { return inst_; }

    bool is_blackbox() const noexcept { return std::holds_alternative<BlackboxMap>(kind_); }

    /// The affine piece acting on `side`, if the map is affine there.
    std::optional<AffineMap> piece(Side side) const {
        if (const auto* m = std::get_if<AffineMap>(&kind_)) return *m;
        if (const auto* m = std::get_if<PiecewiseAffineMap>(&kind_))
            return side == Side::A ? m->on_a : m->on_b;
        return std::nullopt;
    }

private:
    MapSpec(std::string name, std::shared_ptr<const ProximityInstance> inst, Kind kind, Mode mode)
        : name_(std::move(name)), inst_(std::move(inst)), kind_(std::move(kind)), mode_(mode) {
        if (!inst_) throw InvalidArgument("map needs a proximity instance");
    }

    static void check_affine(const ProximityInstance& inst, const Matrix& m, const Point& b,
                             const std::string& prefix) {
        const auto n = static_cast<Eigen::Index>(inst.space().dim());
        if (m.rows() != n || m.cols() != n)
            throw InvalidArgument(prefix + "matrix: expected " + std::to_string(n) + "x" +
                                  std::to_string(n));
        if (b.size() != n)
            throw InvalidArgument(prefix + "offset: expected " + std::to_string(n) +
                                  " coordinates");
        if (!m.allFinite() || !b.allFinite())
            throw InvalidArgument(prefix + "matrix/offset: entries must be finite");
    }

    std::string name_;
    std::shared_ptr<const ProximityInstance> inst_;
    Kind kind_;
    Mode mode_;
};

/// Anything the certifiers, projector and solvers can drive: a map of
/// A u B (or A0 u B0) into itself with a declared mode.
template <class M>
concept SelfMap = requires(const M& m, const Point& x) {
    { m.apply(x) } -> std::convertible_to<Point>;
    { m.mode() } -> std::same_as<Mode>;
    { m.domain() } -> std::same_as<Domain>;
    { m.instance() } -> std::same_as<const ProximityInstance&>;
    { m.instance_ptr() } -> std::convertible_to<std::shared_ptr<const ProximityInstance>>;
};

/// The side a map sends `from` into under its declared mode.
inline Side target_side(Mode mode, Side from) noexcept {
    return mode == Mode::cyclic ? opposite(from) : from;
}

// ---------------------------------------------------------------------------
// Sample sets shared by the certifiers.

struct CertifyOptions {
    std::size_t samples = 10000;
    std::uint64_t seed = 0x5eed;
    /// Cap on extreme points per side; their cross product is always tested.
    std::size_t extreme_cap = 64;
    /// Number of sampled pairs re-tested at shrinking scales around the
    /// realizing pair.
    std::size_t refine_pairs = 200;
    std::size_t grid = 401;
};

namespace detail {

inline Point sample_side(const ProximityInstance& inst, Side side, Domain domain, Rng& rng) {
    if (domain == Domain::bodies) return sample_in(inst.body(side), rng);
    if (auto x = sample_proximal(inst, side, rng)) return *x;
    return side == Side::A ? inst.realizing_a() : inst.realizing_b();
}

inline std::vector<Point> side_points(const ProximityInstance& inst, Side side, Domain domain,
                                      std::size_t count, Rng& rng, std::size_t extreme_cap) {
    std::vector<Point> pts;
    pts.push_back(side == Side::A ? inst.realizing_a() : inst.realizing_b());
    if (domain == Domain::bodies)
        for (auto& e : extreme_points(inst.body(side), extreme_cap)) pts.push_back(std::move(e));
    for (std::size_t i = 0; i < count; ++i) pts.push_back(sample_side(inst, side, domain, rng));
    return pts;
}

using PointPair = std::pair<Point, Point>;

// Cross pairs (x, y) in A x B (or A0 x B0): realizing and extreme points
// against each other, random pairs, and random pairs pulled toward the
// realizing pair at scales 1e-1 ... 1e-8 (convex combinations stay inside
// the sets).
inline std::vector<PointPair> cross_pairs(const ProximityInstance& inst, Domain domain,
                                          const CertifyOptions& opts) {
    Rng rng(opts.seed);
    std::vector<PointPair> pairs;
    const auto anchors_a = side_points(inst, Side::A, domain, 0, rng, opts.extreme_cap);
    const auto anchors_b = side_points(inst, Side::B, domain, 0, rng, opts.extreme_cap);
    for (const auto& x : anchors_a)
        for (const auto& y : anchors_b) pairs.emplace_back(x, y);
    const std::size_t first_random = pairs.size();
    for (std::size_t i = 0; i < opts.samples; ++i) {
        Point x = sample_side(inst, Side::A, domain, rng);
        Point y = sample_side(inst, Side::B, domain, rng);
        pairs.emplace_back(std::move(x), std::move(y));
    }
    const Point& a0 = inst.realizing_a();
    const Point& b0 = inst.realizing_b();
    const std::size_t refine = std::min(opts.refine_pairs, pairs.size() - first_random);
    for (std::size_t i = 0; i < refine; ++i) {
        const auto [x, y] = pairs[first_random + i];
        for (double s = 1e-1; s > 1e-9; s *= 0.1)
            pairs.emplace_back(a0 + s * (x - a0), b0 + s * (y - b0));
    }
    return pairs;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Mode certification

struct ModeCertificate {
    bool holds = true;
    bool exact = false;
    std::size_t checked = 0;
    std::optional<Point> witness;
    std::optional<Point> witness_image;
    Side witness_side = Side::A;

    explicit operator bool() const noexcept { return holds; }
};

/// Checks T(A) in B and T(B) in A (cyclic) or T(A) in A and T(B) in B
/// (noncyclic) against the declared mode.
///
/// Affine pieces on polytopal bodies are decided exactly from vertex images
/// (the image of a polytope is the hull of the vertex images). Otherwise
/// `samples` random points per side plus extreme points are tested. Maps
/// defined on A0 u B0 are checked for landing in the target proximal set.
template <SelfMap M>
ModeCertificate certify_mode(const M& map, const CertifyOptions& opts = {}) {
    const ProximityInstance& inst = map.instance();
    ModeCertificate cert;
    Rng rng(opts.seed);

    auto check = [&](Side from, const Point& x) {
        const Side to = target_side(map.mode(), from);
        Point y = map.apply(x);
        ++cert.checked;
        bool ok = contains(inst.body(to), y, inst.tol());
        if (ok && map.domain() == Domain::proximal_sets)
            ok = proximal_excess(inst, y, to) <= 10.0 * inst.tol();
        if (!ok && cert.holds) {
            cert.holds = false;
            cert.witness = x;
            cert.witness_image = std::move(y);
            cert.witness_side = from;
        }
        return ok;
    };

    if constexpr (std::same_as<M, MapSpec>) {
        const bool exact = polytopal(inst.A()) && polytopal(inst.B()) &&
                           map.piece(Side::A) && map.piece(Side::B);
        if (exact) {
            cert.exact = true;
            for (Side s : {Side::A, Side::B})
                for (const auto& v : vertices(inst.body(s)))
                    if (!check(s, v)) return cert;
            return cert;
        }
    }

    for (Side s : {Side::A, Side::B}) {
        for (const auto& x : detail::side_points(inst, s, map.domain(), opts.samples, rng,
                                                 opts.extreme_cap))
            if (!check(s, x)) return cert;
    }
    return cert;
}

// ---------------------------------------------------------------------------
// Contraction and relative nonexpansiveness

struct ContractionCertificate {
    /// Supremum over tested cross pairs of
    /// (d(Tx,Ty) - dist) / (d(x,y) - dist), pairs with d(x,y) <= dist + tol
    /// excluded.
    double alpha_hat = 0.0;
    std::size_t samples = 0;
    std::optional<std::pair<Point, Point>> worst_pair;
    bool exact = false;
    /// No pair with d(x,y) > dist + tol was found (e.g. singleton A0, B0).
    bool degenerate = false;

    bool contraction(double margin = 1e-7) const noexcept { return alpha_hat < 1.0 - margin; }
};

namespace detail {

template <SelfMap M>
std::optional<double> accumulate_ratio(const M& map, const Point& x, const Point& y,
                                       ContractionCertificate& cert) {
    const ProximityInstance& inst = map.instance();
    const double den = inst.norm_dist(x, y) - inst.dist();
    if (den <= inst.tol()) return std::nullopt;
    ++cert.samples;
    const double ratio = (inst.norm_dist(map.apply(x), map.apply(y)) - inst.dist()) / den;
    if (!cert.worst_pair || ratio > cert.alpha_hat) {
        cert.alpha_hat = std::max(ratio, 0.0);
        cert.worst_pair = std::make_pair(x, y);
    }
    return ratio;
}

// For affine maps on a pair of segments the ratio is a function of two
// parameters in [0,1]^2; scan it on a grid, then on an equally fine grid
// spanning the cells around the worst node.
template <SelfMap M>
void grid_scan(const M& map, const std::pair<Point, Point>& sa, const std::pair<Point, Point>& sb,
               std::size_t n, ContractionCertificate& cert) {
    auto at = [](const std::pair<Point, Point>& seg, double t) {
        return Point((1.0 - t) * seg.first + t * seg.second);
    };
    const double h = 1.0 / static_cast<double>(n - 1);
    double best = -std::numeric_limits<double>::infinity(), best_s = 0.0, best_t = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double s = static_cast<double>(i) * h, t = static_cast<double>(j) * h;
            if (auto r = accumulate_ratio(map, at(sa, s), at(sb, t), cert); r && *r > best)
                best = *r, best_s = s, best_t = t;
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double s = std::clamp(best_s + (2.0 * static_cast<double>(i) * h - 1.0) * h,
                                        0.0, 1.0);
            const double t = std::clamp(best_t + (2.0 * static_cast<double>(j) * h - 1.0) * h,
                                        0.0, 1.0);
            accumulate_ratio(map, at(sa, s), at(sb, t), cert);
        }
}

}  // namespace detail

/// Empirical contraction modulus over sampled cross pairs.
///
/// The pair set always contains the realizing pair and extreme points, and a
/// multi-scale refinement toward the realizing pair, where the ratio of an
/// affine contraction typically attains its supremum. Affine maps on a pair
/// of segments are additionally scanned on a dense parameter grid; only that
/// case is flagged `exact`.
template <SelfMap M>
ContractionCertificate certify_contraction(const M& map, const CertifyOptions& opts = {}) {
    const ProximityInstance& inst = map.instance();
    ContractionCertificate cert;
    for (const auto& [x, y] : detail::cross_pairs(inst, map.domain(), opts))
        detail::accumulate_ratio(map, x, y, cert);

    if constexpr (std::same_as<M, MapSpec>) {
        const auto sa = as_segment(inst.A());
        const auto sb = as_segment(inst.B());
        if (sa && sb && map.piece(Side::A) && map.piece(Side::B)) {
            detail::grid_scan(map, *sa, *sb, opts.grid, cert);
            cert.exact = true;
        }
    }
    cert.degenerate = cert.samples == 0;
    return cert;
}

struct NonexpansiveCertificate {
    bool holds = true;
    /// max over tested pairs of d(Tx,Ty) - d(x,y)
    double worst_excess = -std::numeric_limits<double>::infinity();
    std::optional<std::pair<Point, Point>> witness;

    explicit operator bool() const noexcept { return holds; }
};

/// d(Tx,Ty) <= d(x,y) + tol on the same cross pairs certify_contraction uses.
template <SelfMap M>
NonexpansiveCertificate certify_relatively_nonexpansive(const M& map,
                                                        const CertifyOptions& opts = {}) {
    const ProximityInstance& inst = map.instance();
    NonexpansiveCertificate cert;
    for (const auto& [x, y] : detail::cross_pairs(inst, map.domain(), opts)) {
        const double excess =
            inst.norm_dist(map.apply(x), map.apply(y)) - inst.norm_dist(x, y);
        if (excess > cert.worst_excess) {
            cert.worst_excess = excess;
            if (excess > inst.tol()) {
                cert.holds = false;
                cert.witness = std::make_pair(x, y);
            }
        }
    }
    return cert;
}

}  // namespace proxipair
