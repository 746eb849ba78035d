#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "proxipair/error.hpp"
#include "proxipair/instance.hpp"
#include "proxipair/mappings.hpp"
#include "proxipair/operators.hpp"

namespace proxipair {

struct SolveOptions {
    double tol = 1e-9;
    std::size_t max_iter = 10000;
    /// Number of even steps 2n over which the reduction identities are
    /// checked, independent of when the solve itself stops.
    std::size_t identity_horizon = 20;
    /// Alpha values at or above 1 - margin are not treated as contractions.
    double contraction_margin = 1e-7;
};

struct TraceStep {
    std::size_t index;
    Side side;
    Point point;
    std::optional<Point> companion;
    /// d(point, companion) - dist(A, B)
    double gap;
};

struct IterationTrace {
    std::vector<TraceStep> steps;
    bool converged = false;
    std::size_t iterations_used = 0;
    double alpha_hat = 0.0;
    /// log(tol / gap_0) / log(alpha_hat): a-priori iteration count from the
    /// geometric decay of the gap.
    std::optional<double> predicted_iterations;
};

enum class ResultKind { best_proximity_point, best_proximity_pair };

inline const char* to_string(ResultKind k) noexcept {
    return k == ResultKind::best_proximity_point ? "best_proximity_point"
                                                 : "best_proximity_pair";
}

/// Extra diagnostics recorded by the reduction solvers.
struct ReductionChecks {
    /// max_n ||(TP)^{2n} x0 - T^{2n} x0|| over n <= horizon.
    double identity_deviation = 0.0;
    std::size_t horizon = 0;
    /// max_n excess of (TP)^{2n+1} x0 over membership in B0 (noncyclic input
    /// only).
    std::optional<double> odd_membership_excess;
    /// ||T x* - x*|| for the point returned by the cyclic sub-solve
    /// (noncyclic input only).
    std::optional<double> fixed_point_residual;
};

struct SolveResult {
    ResultKind kind;
    /// x* for a best proximity point, p for a pair.
    Point p;
    /// q for a pair.
    std::optional<Point> q;
    /// Point: ||x* - T x*|| - dist. Pair: max of ||p - Tp||, ||q - Tq||,
    /// ||p - q|| - dist.
    double residual = 0.0;
    double residual_p = 0.0;
    double residual_q = 0.0;
    double pair_gap = 0.0;
    IterationTrace trace;
    std::optional<ReductionChecks> reduction;

    bool converged() const noexcept { return trace.converged; }
};

namespace detail {

template <SelfMap M>
void require_contraction(const M& T, const ContractionCertificate& cert, Mode expected,
                         const SolveOptions& opts, const char* solver) {
    if (T.mode() != expected)
        throw DomainError(std::string(solver) + ": expected a " + to_string(expected) +
                          " map, got a " + to_string(T.mode()) + " one");
    if (!cert.contraction(opts.contraction_margin))
        throw DomainError(std::string(solver) + ": map is not a contraction (alpha_hat = " +
                          std::to_string(cert.alpha_hat) + ")");
}

template <SelfMap M>
void require_start(const M& T, const Point& x0, bool need_proximal, const char* solver) {
    const ProximityInstance& inst = T.instance();
    inst.space().check(x0);
    if (!contains(inst.A(), x0, inst.tol()))
        throw DomainError(std::string(solver) + ": x0 must lie in A");
    if ((need_proximal || T.domain() == Domain::proximal_sets) &&
        proximal_excess(inst, x0, Side::A) > 10.0 * inst.tol())
        throw DomainError(std::string(solver) + ": x0 must lie in A0 (excess " +
                          std::to_string(proximal_excess(inst, x0, Side::A)) + ")");
}

inline std::optional<double> predicted_iterations(double alpha, double gap0, double tol) {
    if (!(alpha > 0.0 && alpha < 1.0) || !(gap0 > tol)) return std::nullopt;
    return std::log(tol / gap0) / std::log(alpha);
}

}  // namespace detail

/// Picard iteration x_{n+1} = T x_n for a cyclic contraction, started in A.
///
/// Stops once two iterates of equal parity are closer than tol and the
/// consecutive gap d(x_n, x_{n+1}) - dist is below tol; returns the latest
/// even (A-side) iterate. Each trace step pairs x_n with x_{n+1}.
template <SelfMap M>
SolveResult picard_cyclic(const M& T, const ContractionCertificate& cert, const Point& x0,
                          const SolveOptions& opts = {}) {
    detail::require_contraction(T, cert, Mode::cyclic, opts, "picard_cyclic");
    detail::require_start(T, x0, false, "picard_cyclic");
    const ProximityInstance& inst = T.instance();
    const double dist = inst.dist();

    SolveResult res{ResultKind::best_proximity_point, x0, std::nullopt};
    IterationTrace& trace = res.trace;
    trace.alpha_hat = cert.alpha_hat;

    Point prev2;  // x_{n-1}
    Point cur = x0;
    for (std::size_t n = 0; n < opts.max_iter; ++n) {
        Point next = T.apply(cur);
        const double gap = inst.norm_dist(cur, next) - dist;
        if (n == 0) trace.predicted_iterations = detail::predicted_iterations(cert.alpha_hat, gap, opts.tol);
        trace.steps.push_back({n, n % 2 == 0 ? Side::A : Side::B, cur, next, gap});
        trace.iterations_used = n + 1;
        const bool settled =
            n >= 1 && inst.norm_dist(next, prev2) < opts.tol && std::abs(gap) < opts.tol;
        prev2 = std::move(cur);
        cur = std::move(next);
        if (settled) {
            trace.converged = true;
            break;
        }
    }
    // cur = x_{N}, prev2 = x_{N-1}, N = iterations_used
    res.p = trace.iterations_used % 2 == 0 ? cur : prev2;
    res.residual = inst.norm_dist(res.p, T.apply(res.p)) - dist;
    res.residual_p = res.residual;
    return res;
}

template <SelfMap M>
SolveResult picard_cyclic(const M& T, const Point& x0, const SolveOptions& opts = {},
                          const CertifyOptions& copts = {}) {
    return picard_cyclic(T, certify_contraction(T, copts), x0, opts);
}

/// x_n = T^n x0, y_n = P x_n for a noncyclic contraction with x0 in A0. Stops
/// when ||x_{n+1} - x_n|| < tol and the pair gap is below tol.
template <SelfMap M>
SolveResult noncyclic_projection_iteration(const M& T, const ContractionCertificate& cert,
                                           const Point& x0, const SolveOptions& opts = {}) {
    detail::require_contraction(T, cert, Mode::noncyclic, opts,
                                "noncyclic_projection_iteration");
    detail::require_start(T, x0, true, "noncyclic_projection_iteration");
    const ProximityInstance& inst = T.instance();
    const double dist = inst.dist();
    const ProximalProjector P(T.instance_ptr());

    SolveResult res{ResultKind::best_proximity_pair, x0, std::nullopt};
    IterationTrace& trace = res.trace;
    trace.alpha_hat = cert.alpha_hat;

    Point x = x0;
    Point y = P.apply(x, Side::A);
    for (std::size_t n = 0; n < opts.max_iter; ++n) {
        const double gap = inst.norm_dist(x, y) - dist;
        trace.steps.push_back({n, Side::A, x, y, gap});
        Point x_next = T.apply(x);
        Point y_next = P.apply(x_next, Side::A);
        if (n == 0)
            trace.predicted_iterations = detail::predicted_iterations(
                cert.alpha_hat, inst.norm_dist(x, x_next), opts.tol);
        const double step = inst.norm_dist(x, x_next);
        x = std::move(x_next);
        y = std::move(y_next);
        trace.iterations_used = n + 1;
        if (step < opts.tol && std::abs(inst.norm_dist(x, y) - dist) < opts.tol) {
            trace.converged = true;
            trace.steps.push_back({n + 1, Side::A, x, y, inst.norm_dist(x, y) - dist});
            break;
        }
    }
    res.p = x;
    res.q = y;
    res.residual_p = inst.norm_dist(x, T.apply(x));
    res.residual_q = inst.norm_dist(y, T.apply(y));
    res.pair_gap = inst.norm_dist(x, y) - dist;
    res.residual = std::max({res.residual_p, res.residual_q, res.pair_gap});
    return res;
}

template <SelfMap M>
SolveResult noncyclic_projection_iteration(const M& T, const Point& x0,
                                           const SolveOptions& opts = {},
                                           const CertifyOptions& copts = {}) {
    return noncyclic_projection_iteration(T, certify_contraction(T, copts), x0, opts);
}

/// max over n <= horizon of ||F^{2n} x0 - G^{2n} x0||.
template <class F, class G>
double even_orbit_deviation(const ProximityInstance& inst, const F& f, const G& g,
                            const Point& x0, std::size_t horizon) {
    Point u = x0, v = x0;
    double worst = 0.0;
    for (std::size_t n = 1; n <= horizon; ++n) {
        for (int k = 0; k < 2; ++k) {
            u = f.apply(u);
            v = g.apply(v);
        }
        worst = std::max(worst, inst.norm_dist(u, v));
    }
    return worst;
}

/// Best proximity point of a cyclic contraction S through the noncyclic map
/// SP on A0 u B0: runs the projection iteration on SP from x0 in A0 and
/// reports its limit p as a best proximity point of S.
inline SolveResult solve_cyclic_via_reduction(const MapSpec& S, const ContractionCertificate& cert,
                                              const Point& x0, const SolveOptions& opts = {},
                                              const CertifyOptions& copts = {}) {
    detail::require_contraction(S, cert, Mode::cyclic, opts, "solve_cyclic_via_reduction");
    detail::require_start(S, x0, true, "solve_cyclic_via_reduction");
    const ProximityInstance& inst = S.instance();
    const ComposedMap SP = compose_with_projector(S, ProximalProjector(S.instance_ptr()), copts);

    SolveResult sub = noncyclic_projection_iteration(SP, cert, x0, opts);
    SolveResult res{ResultKind::best_proximity_point, sub.p, std::nullopt};
    res.residual = inst.norm_dist(res.p, S.apply(res.p)) - inst.dist();
    res.residual_p = res.residual;
    res.trace = std::move(sub.trace);

    ReductionChecks checks;
    checks.horizon = opts.identity_horizon;
    checks.identity_deviation = even_orbit_deviation(inst, SP, S, x0, opts.identity_horizon);
    res.reduction = checks;
    return res;
}

inline SolveResult solve_cyclic_via_reduction(const MapSpec& S, const Point& x0,
                                              const SolveOptions& opts = {},
                                              const CertifyOptions& copts = {}) {
    return solve_cyclic_via_reduction(S, certify_contraction(S, copts), x0, opts, copts);
}

/// Best proximity pair of a noncyclic contraction T through the cyclic map TP
/// on A0 u B0: Picard iteration of TP from x0 in A0 gives x*, and
/// (x*, P x*) is returned.
inline SolveResult solve_noncyclic_via_reduction(const MapSpec& T,
                                                 const ContractionCertificate& cert,
                                                 const Point& x0, const SolveOptions& opts = {},
                                                 const CertifyOptions& copts = {}) {
    detail::require_contraction(T, cert, Mode::noncyclic, opts, "solve_noncyclic_via_reduction");
    detail::require_start(T, x0, true, "solve_noncyclic_via_reduction");
    const ProximityInstance& inst = T.instance();
    const ComposedMap TP = compose_with_projector(T, ProximalProjector(T.instance_ptr()), copts);

    SolveResult sub = picard_cyclic(TP, cert, x0, opts);
    SolveResult res{ResultKind::best_proximity_pair, sub.p, TP.projector().apply(sub.p, Side::A)};
    res.residual_p = inst.norm_dist(res.p, T.apply(res.p));
    res.residual_q = inst.norm_dist(*res.q, T.apply(*res.q));
    res.pair_gap = inst.norm_dist(res.p, *res.q) - inst.dist();
    res.residual = std::max({res.residual_p, res.residual_q, res.pair_gap});
    res.trace = std::move(sub.trace);

    ReductionChecks checks;
    checks.horizon = opts.identity_horizon;
    checks.identity_deviation = even_orbit_deviation(inst, TP, T, x0, opts.identity_horizon);
    double odd = 0.0;
    Point x = x0;
    for (std::size_t n = 0; n <= opts.identity_horizon; ++n) {
        x = TP.apply(x);  // (TP)^{2n+1} x0
        odd = std::max({odd, distance_to(inst.B(), x), proximal_excess(inst, x, Side::B)});
        x = TP.apply(x);
    }
    checks.odd_membership_excess = odd;
    checks.fixed_point_residual = res.residual_p;
    res.reduction = checks;
    return res;
}

inline SolveResult solve_noncyclic_via_reduction(const MapSpec& T, const Point& x0,
                                                 const SolveOptions& opts = {},
                                                 const CertifyOptions& copts = {}) {
    return solve_noncyclic_via_reduction(T, certify_contraction(T, copts), x0, opts, copts);
}

}  // namespace proxipair
