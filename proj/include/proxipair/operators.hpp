#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "proxipair/body.hpp"
#include "proxipair/error.hpp"
#include "proxipair/instance.hpp"
#include "proxipair/mappings.hpp"
#include "proxipair/sampling.hpp"

namespace proxipair {

/// The cyclic projection P on A0 u B0: a point of A0 goes to its nearest point
/// in B (which lies in B0), a point of B0 to its nearest point in A.
///
/// Points are accepted when their distance to the opposite body is within
/// dist(A, B) + accept_factor * tol, so iterates converging onto A0 or B0 are
/// not rejected near the limit.
class ProximalProjector {
public:
    explicit ProximalProjector(std::shared_ptr<const ProximityInstance> inst,
                               double accept_factor = 10.0)
        : inst_(std::move(inst)), accept_factor_(accept_factor) {
        if (!inst_) throw InvalidArgument("projector needs a proximity instance");
    }

    const ProximityInstance& instance() const noexcept { return *inst_; }
    const std::shared_ptr<const ProximityInstance>& instance_ptr() const noexcept { return inst_; }
    double acceptance() const noexcept { return accept_factor_ * inst_->tol(); }

    /// Side of x, throwing DomainError when x is in neither body.
    Side side(const Point& x) const {
        if (contains(inst_->A(), x, inst_->tol())) return Side::A;
        if (contains(inst_->B(), x, inst_->tol())) return Side::B;
        throw DomainError("point lies in neither A nor B (distances " +
                          std::to_string(distance_to(inst_->A(), x)) + ", " +
                          std::to_string(distance_to(inst_->B(), x)) + ")");
    }

    bool accepts(const Point& x) const {
        const Side s = side(x);
        return proximal_excess(*inst_, x, s) <= acceptance();
    }

    Point operator()(const Point& x) const { return apply(x, side(x)); }

    Point apply(const Point& x, Side s) const {
        const ConvexBody& other = inst_->body(opposite(s));
        Point y = project(other, x);
        const double achieved = inst_->norm_dist(x, y);
        if (achieved - inst_->dist() > acceptance())
            throw DomainError(std::string("point is not in ") + (s == Side::A ? "A0" : "B0") +
                              ": distance to " + to_string(opposite(s)) + " is " +
                              std::to_string(achieved) + " > dist(A,B) = " +
                              std::to_string(inst_->dist()));
        return y;
    }

private:
    std::shared_ptr<const ProximityInstance> inst_;
    double accept_factor_;
};

inline Point proximal_project(const ProximalProjector& P, const Point& x) { return P(x); }

// ---------------------------------------------------------------------------

struct PropertyCheck {
    bool holds = true;
    double worst_deviation = 0.0;
    std::optional<std::pair<Point, Point>> witness;
    std::string note;

    void record(double deviation, const Point& x, const Point& y, double threshold) {
        if (!witness || deviation > worst_deviation) {
            worst_deviation = deviation;
            witness = std::make_pair(x, y);
        }
        if (!(deviation <= threshold)) holds = false;
    }
};

struct ProjectorReport {
    PropertyCheck cyclic_distance;  // P(A0) in B0, P(B0) in A0, ||x - Px|| = dist
    PropertyCheck isometry;         // ||Px - Py|| = ||x - y|| on A0 x B0
    PropertyCheck affine;           // P(l x1 + (1-l) x2) = l P x1 + (1-l) P x2
    PropertyCheck involution;       // P(P x) = x
    PropertyCheck continuity;       // ||Px - Px'|| <= ||x - x'|| on nearby pairs
    bool degenerate = false;
    std::size_t samples = 0;

    bool all_hold() const noexcept {
        return cyclic_distance.holds && isometry.holds && affine.holds && involution.holds &&
               continuity.holds;
    }
};

struct VerifyOptions {
    std::size_t samples = 1000;
    std::uint64_t seed = 0x5eed;
    double threshold = 1e-8;
};

/// Samples A0 and B0 and checks the five structural properties of P.
/// Singleton proximal sets are flagged `degenerate`; the checks then run on
/// the single pair.
inline ProjectorReport verify_projector_properties(const ProximalProjector& P,
                                                   const VerifyOptions& opts = {}) {
    const ProximityInstance& inst = P.instance();
    Rng rng(opts.seed);
    ProjectorReport rep;

    auto draw = [&](Side s) {
        if (auto x = sample_proximal(inst, s, rng)) return *x;
        return Point(s == Side::A ? inst.realizing_a() : inst.realizing_b());
    };
    std::vector<Point> a0{inst.realizing_a()}, b0{inst.realizing_b()};
    for (std::size_t i = 1; i < opts.samples; ++i) {
        a0.push_back(draw(Side::A));
        b0.push_back(draw(Side::B));
    }
    rep.samples = a0.size();

    double spread = 0.0;
    for (const auto& x : a0) spread = std::max(spread, inst.norm_dist(x, a0.front()));
    for (const auto& y : b0) spread = std::max(spread, inst.norm_dist(y, b0.front()));
    rep.degenerate = spread <= opts.threshold;

    const double th = opts.threshold;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < a0.size(); ++i) {
        for (Side s : {Side::A, Side::B}) {
            const Point& x = s == Side::A ? a0[i] : b0[i];
            const Point& x2 = s == Side::A ? a0[(i + 1) % a0.size()] : b0[(i + 1) % b0.size()];
            const Point px = P.apply(x, s);

            const double excess = std::max(proximal_excess(inst, px, opposite(s)),
                                           distance_to(inst.body(opposite(s)), px));
            const double dist_dev = std::abs(inst.norm_dist(x, px) - inst.dist());
            rep.cyclic_distance.record(std::max(excess, dist_dev), x, px, th);

            rep.involution.record(inst.norm_dist(P.apply(px, opposite(s)), x), x, px, th);

            const double lam = unit(rng);
            const Point mix = lam * x + (1.0 - lam) * x2;
            const Point lhs = P.apply(mix, s);
            const Point rhs = lam * px + (1.0 - lam) * P.apply(x2, s);
            rep.affine.record(inst.norm_dist(lhs, rhs), x, x2, th);

            const double eps = 1e-3 * unit(rng);
            const Point near = (1.0 - eps) * x + eps * x2;
            const double stretch = inst.norm_dist(px, P.apply(near, s)) - inst.norm_dist(x, near);
            rep.continuity.record(std::max(stretch, 0.0), x, near, th);
        }
        const Point& x = a0[i];
        const Point& y = b0[(i * 7 + 3) % b0.size()];
        const double dev =
            std::abs(inst.norm_dist(P.apply(x, Side::A), P.apply(y, Side::B)) -
                     inst.norm_dist(x, y));
        rep.isometry.record(dev, x, y, th);
    }
    rep.continuity.note = "implied by the isometry check; probed on nearby pairs only";
    if (rep.degenerate) {
        const std::string note = "degenerate: singleton proximal sets";
        for (auto* c : {&rep.cyclic_distance, &rep.isometry, &rep.affine, &rep.involution})
            c->note = note;
    }
    return rep;
}

// ---------------------------------------------------------------------------

/// x -> outer(P(x)) on A0 u B0. Composing with the cyclic P flips the mode of
/// the outer map.
class ComposedMap {
public:
    ComposedMap(MapSpec outer, ProximalProjector projector, NonexpansiveCertificate inherited)
        : outer_(std::move(outer)), projector_(std::move(projector)),
          nonexpansive_(std::move(inherited)) {}

    Point apply(const Point& x) const { return outer_.apply(projector_(x)); }
    Mode mode() const noexcept { return flipped(outer_.mode()); }
    Domain domain() const noexcept { return Domain::proximal_sets; }
    const ProximityInstance& instance() const noexcept { return outer_.instance(); }
    const std::shared_ptr<const ProximityInstance>& instance_ptr() const noexcept {
        return outer_.instance_ptr();
    }

    const MapSpec& outer() const noexcept { return outer_; }
    const ProximalProjector& projector() const noexcept { return projector_; }
    std::string name() const { return outer_.name() + "P"; }
    /// Sampled check of relative nonexpansiveness on A0 x B0.
    const NonexpansiveCertificate& nonexpansive() const noexcept { return nonexpansive_; }

private:
    MapSpec outer_;
    ProximalProjector projector_;
    NonexpansiveCertificate nonexpansive_;
};

struct PreservationReport {
    bool holds = true;
    double worst_excess = 0.0;
    std::optional<Point> witness;
    Side witness_side = Side::A;
};

/// Whether `map` sends sampled points of A0 and B0 into the proximal set of
/// their target side (A0/B0 for noncyclic maps, B0/A0 for cyclic ones).
inline PreservationReport check_proximal_preservation(const MapSpec& map,
                                                      const CertifyOptions& opts = {},
                                                      double slack = -1.0) {
    const ProximityInstance& inst = map.instance();
    if (slack < 0.0) slack = 10.0 * inst.tol();
    Rng rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
    PreservationReport rep;
    const std::size_t n = std::min<std::size_t>(opts.samples, 1000);
    for (Side s : {Side::A, Side::B}) {
        for (const auto& x : detail::side_points(inst, s, Domain::proximal_sets, n, rng, 0)) {
            const Side to = target_side(map.mode(), s);
            const Point y = map.apply(x);
            const double excess =
                std::max(distance_to(inst.body(to), y), proximal_excess(inst, y, to));
            if (excess > rep.worst_excess) {
                rep.worst_excess = excess;
                if (excess > slack && rep.holds) {
                    rep.holds = false;
                    rep.witness = x;
                    rep.witness_side = s;
                }
            }
        }
    }
    return rep;
}

/// Builds outer o P after checking that `outer` is relatively nonexpansive
/// and maps proximal sets into proximal sets. The composition's own relative
/// nonexpansiveness is re-checked by sampling A0 x B0.
inline ComposedMap compose_with_projector(const MapSpec& outer, const ProximalProjector& P,
                                          const CertifyOptions& opts = {}) {
    if (&outer.instance() != &P.instance())
        throw InvalidArgument("map and projector refer to different instances");
    if (auto rne = certify_relatively_nonexpansive(outer, opts); !rne) {
        throw DomainError("map '" + outer.name() +
                          "' is not relatively nonexpansive (excess " +
                          std::to_string(rne.worst_excess) + ")");
    }
    if (auto pres = check_proximal_preservation(outer, opts); !pres.holds) {
        std::ostringstream os;
        os << "map '" << outer.name() << "' does not preserve proximal sets: image of "
           << (pres.witness_side == Side::A ? "A0" : "B0") << " point ("
           << pres.witness->transpose() << ") misses the target by " << pres.worst_excess;
        throw DomainError(os.str());
    }
    ComposedMap composed(outer, P, {});
    auto inherited = certify_relatively_nonexpansive(composed, opts);
    return ComposedMap(outer, P, std::move(inherited));
}

struct CommutationReport {
    double max_deviation = 0.0;
    std::size_t checked = 0;
    std::optional<Point> witness;
    std::string note;
};

/// max over sampled x in A0 u B0 of ||T(Px) - P(Tx)||. If Tx leaves the
/// proximal sets, P(Tx) is undefined and the deviation is reported as
/// infinite with that point as witness.
template <SelfMap M>
CommutationReport check_commutation(const M& T, const ProximalProjector& P,
                                    const CertifyOptions& opts = {}) {
    const ProximityInstance& inst = P.instance();
    Rng rng(opts.seed);
    CommutationReport rep;
    const std::size_t per_side = std::max<std::size_t>(opts.samples / 2, 1);
    for (Side s : {Side::A, Side::B}) {
        for (const auto& x :
             detail::side_points(inst, s, Domain::proximal_sets, per_side, rng, 0)) {
            ++rep.checked;
            double dev;
            try {
                dev = inst.norm_dist(T.apply(P.apply(x, s)), P(T.apply(x)));
            } catch (const DomainError& e) {
                dev = std::numeric_limits<double>::infinity();
                if (rep.note.empty()) rep.note = e.what();
            }
            if (dev > rep.max_deviation || (!rep.witness && dev == rep.max_deviation)) {
                rep.max_deviation = dev;
                rep.witness = x;
            }
        }
    }
    return rep;
}

}  // namespace proxipair
