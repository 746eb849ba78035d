#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "proxipair/harness/run.hpp"

namespace proxipair::harness {

struct CheckResult {
    std::string name;
    /// Which property of the theory the check exercises, e.g. "projector.isometry".
    std::string anchor;
    bool passed = true;
    bool skipped = false;
    bool degenerate = false;
    double worst_deviation = 0.0;
    double threshold = 0.0;
    json witness = nullptr;
    std::string note;
};

struct SuiteReport {
    std::string instance;
    std::vector<CheckResult> checks;

    bool all_passed() const noexcept {
        return std::all_of(checks.begin(), checks.end(),
                           [](const CheckResult& c) { return c.passed || c.skipped; });
    }
    const CheckResult* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

struct SuiteOptions {
    std::size_t samples = 1000;
    std::uint64_t seed = 0x5eed;
    CertifyOptions certify;
    SolveOptions solve;
    std::size_t uniqueness_starts = 5;
    double projector_threshold = 1e-8;
    double commutation_threshold = 1e-8;
    double identity_threshold = 1e-9;
    double odd_membership_threshold = 1e-8;
    double fixed_point_threshold = 1e-6;
    double agreement_threshold = 1e-6;
    double decay_slack = 1e-9;
};

namespace detail {

inline CheckResult check(std::string name, std::string anchor, double deviation, double threshold,
                         json witness = nullptr) {
    CheckResult c;
    c.name = std::move(name);
    c.anchor = std::move(anchor);
    c.worst_deviation = deviation;
    c.threshold = threshold;
    c.passed = deviation <= threshold;
    c.witness = std::move(witness);
    return c;
}

inline CheckResult failure(std::string name, std::string anchor, std::string note) {
    CheckResult c;
    c.name = std::move(name);
    c.anchor = std::move(anchor);
    c.passed = false;
    c.worst_deviation = std::numeric_limits<double>::infinity();
    c.note = std::move(note);
    return c;
}

inline CheckResult skipped(std::string name, std::string anchor, std::string note) {
    CheckResult c;
    c.name = std::move(name);
    c.anchor = std::move(anchor);
    c.skipped = true;
    c.note = std::move(note);
    return c;
}

/// Worst violation of gap_{n+1} <= alpha gap_n over consecutive trace steps.
inline double decay_violation(const IterationTrace& t, double alpha) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < t.steps.size(); ++i)
        worst = std::max(worst, t.steps[i].gap - alpha * t.steps[i - 1].gap);
    return t.steps.size() < 2 ? 0.0 : worst;
}

/// Contract residual of a converged result, measured against tol.
inline double contract_excess(const SolveResult& r) {
    if (r.kind == ResultKind::best_proximity_point) return std::abs(r.residual);
    return std::max({r.residual_p, r.residual_q, std::abs(r.pair_gap)});
}

/// Distinct starting points in `side`: the realizing point, extreme points,
/// then seeded samples.
inline std::vector<Point> starts(const ProximityInstance& inst, Side side, std::size_t count,
                                 bool proximal, Rng& rng) {
    std::vector<Point> out;
    auto push = [&](const Point& x) {
        for (const auto& y : out)
            if (inst.norm_dist(x, y) < 1e-6) return;
        out.push_back(x);
    };
    push(side == Side::A ? inst.realizing_a() : inst.realizing_b());
    if (!proximal)
        for (const auto& v : extreme_points(inst.body(side), count))
            if (out.size() < count) push(v);
    for (std::size_t tries = 0; out.size() < count && tries < 20 * count; ++tries) {
        if (proximal) {
            if (auto x = sample_proximal(inst, side, rng)) push(*x);
        } else {
            push(sample_in(inst.body(side), rng));
        }
    }
    return out;
}

inline json pair_json(const std::optional<std::pair<Point, Point>>& w) {
    return w ? json::array({to_json(w->first), to_json(w->second)}) : json(nullptr);
}

}  // namespace detail

/// Runs every property check the instance supports.
///
/// Projector checks need a bounded instance. Per map: mode, contraction
/// implies relative nonexpansiveness, commutation with P (noncyclic maps),
/// mode flip of the composition with P, and for contractions the solver
/// checks: reduction identities, equivalence of direct and reduced solvers,
/// uniqueness over several starts, geometric gap decay and the result
/// contract.
inline SuiteReport run_verification_suite(const LoadedInstance& li, const SuiteOptions& opts = {}) {
    using namespace detail;
    const ProximityInstance& inst = *li.inst;
    SuiteReport rep;
    rep.instance = li.file.name;
    Rng rng(opts.seed);
    const ProximalProjector P(li.inst);

    if (li.file.expected_dist)
        rep.checks.push_back(check("distance", "distance.oracle",
                                   std::abs(inst.dist() - *li.file.expected_dist), 1e-7));

    // -- projector
    if (!inst.bounded()) {
        for (const char* prop : {"cyclic_distance", "isometry", "affine", "involution", "continuity"})
            rep.checks.push_back(skipped(std::string("projector.") + prop,
                                         std::string("projector.") + prop,
                                         "unbounded instance"));
    } else {
        VerifyOptions vo{opts.samples, opts.seed, opts.projector_threshold};
        const ProjectorReport pr = verify_projector_properties(P, vo);
        auto add = [&](const char* prop, const PropertyCheck& pc) {
            CheckResult c = check(std::string("projector.") + prop, std::string("projector.") + prop,
                                  pc.worst_deviation, opts.projector_threshold,
                                  pair_json(pc.witness));
            c.degenerate = pr.degenerate;
            c.note = pc.note;
            rep.checks.push_back(std::move(c));
        };
        add("cyclic_distance", pr.cyclic_distance);
        add("isometry", pr.isometry);
        add("affine", pr.affine);
        add("involution", pr.involution);
        add("continuity", pr.continuity);
    }

    // -- maps
    for (const auto& lm : li.maps) {
        const MapSpec& T = lm.map;
        const std::string tag = T.name();
        {
            CheckResult c;
            c.name = "mode." + tag;
            c.anchor = std::string("map.") + to_string(T.mode());
            c.passed = lm.mode.holds;
            c.note = std::string(lm.mode.exact ? "exact (vertex images)" : "sampled") + ", " +
                     std::to_string(lm.mode.checked) + " points";
            rep.checks.push_back(std::move(c));
        }
        const ContractionCertificate cert = certify_contraction(T, opts.certify);
        const NonexpansiveCertificate rne = certify_relatively_nonexpansive(T, opts.certify);
        const bool contraction = cert.contraction(opts.solve.contraction_margin);
        {
            CheckResult c = check("nonexpansive." + tag, "map.relatively_nonexpansive",
                                  std::max(rne.worst_excess, 0.0), inst.tol(),
                                  pair_json(rne.witness));
            c.degenerate = cert.degenerate;
            c.note = "alpha_hat = " + fmt17(cert.alpha_hat) +
                     (contraction ? " (contraction)" : " (not a contraction)");
            // Only a contraction is required to be relatively nonexpansive.
            if (!contraction && !c.passed) c.skipped = true;
            rep.checks.push_back(std::move(c));
        }
        if (T.mode() == Mode::noncyclic) {
            const CommutationReport cr = check_commutation(T, P, opts.certify);
            CheckResult c = check("commutation." + tag, "composition.commutes_with_projector",
                                  cr.max_deviation, opts.commutation_threshold,
                                  cr.witness ? to_json(*cr.witness) : json(nullptr));
            c.note = cr.note;
            rep.checks.push_back(std::move(c));
        }

        if (!rne) {
            rep.checks.push_back(skipped("mode_flip." + tag, "composition.mode_flip",
                                         "map is not relatively nonexpansive"));
            continue;
        }

        std::optional<ComposedMap> composed;
        try {
            composed.emplace(compose_with_projector(T, P, opts.certify));
            const ModeCertificate mc = certify_mode(*composed, opts.certify);
            CheckResult c;
            c.name = "mode_flip." + tag;
            c.anchor = "composition.mode_flip";
            c.passed = mc.holds && composed->nonexpansive().holds;
            c.note = tag + "P certified " + to_string(composed->mode());
            if (!mc.holds) c.witness = to_json(*mc.witness);
            rep.checks.push_back(std::move(c));
        } catch (const DomainError& e) {
            rep.checks.push_back(failure("mode_flip." + tag, "composition.mode_flip", e.what()));
        }

        if (!contraction || !composed) continue;

        // -- solver checks
        const SolveOptions& so = opts.solve;
        const Point x0 = starts(inst, Side::A, 2, true, rng).back();
        const std::string solve_anchor = T.mode() == Mode::cyclic ? "solver.picard_cyclic"
                                                                  : "solver.projection_iteration";
        try {
            std::vector<std::pair<std::string, SolveResult>> runs;
            if (T.mode() == Mode::cyclic) {
                runs.emplace_back("picard", picard_cyclic(T, cert, x0, so));
                runs.emplace_back("reduction", solve_cyclic_via_reduction(T, cert, x0, so, opts.certify));
                const SolveResult& red = runs.back().second;
                rep.checks.push_back(check("identity." + tag, "reduction.even_orbit_identity",
                                           red.reduction->identity_deviation,
                                           opts.identity_threshold));
                rep.checks.push_back(check("equivalence." + tag, "reduction.equivalence",
                                           inst.norm_dist(runs[0].second.p, red.p),
                                           opts.agreement_threshold));

                // Alternation of the Picard orbit between A and B.
                double alt = 0.0;
                for (const auto& s : runs[0].second.trace.steps)
                    alt = std::max(alt, distance_to(inst.body(s.side), s.point));
                rep.checks.push_back(check("alternation." + tag, "solver.alternation", alt,
                                           inst.tol()));

                const auto xs = starts(inst, Side::A, opts.uniqueness_starts, false, rng);
                double spread = 0.0;
                json witness = nullptr;
                std::vector<Point> limits;
                for (const auto& s : xs) limits.push_back(picard_cyclic(T, cert, s, so).p);
                for (std::size_t i = 0; i < limits.size(); ++i)
                    for (std::size_t j = i + 1; j < limits.size(); ++j)
                        if (const double d = inst.norm_dist(limits[i], limits[j]); d > spread) {
                            spread = d;
                            witness = json::array({to_json(xs[i]), to_json(xs[j])});
                        }
                CheckResult u = check("uniqueness." + tag, "solver.unique_best_proximity_point",
                                      spread, opts.agreement_threshold, witness);
                u.note = std::to_string(xs.size()) + " starts";
                rep.checks.push_back(std::move(u));
            } else {
                runs.emplace_back("projection", noncyclic_projection_iteration(T, cert, x0, so));
                runs.emplace_back("reduction",
                                  solve_noncyclic_via_reduction(T, cert, x0, so, opts.certify));
                const SolveResult& dir = runs[0].second;
                const SolveResult& red = runs[1].second;
                rep.checks.push_back(check("identity." + tag, "reduction.even_orbit_identity",
                                           red.reduction->identity_deviation,
                                           opts.identity_threshold));
                rep.checks.push_back(check("odd_membership." + tag, "reduction.odd_iterates_in_B0",
                                           *red.reduction->odd_membership_excess,
                                           opts.odd_membership_threshold));
                rep.checks.push_back(check("fixed_point." + tag, "reduction.strict_convexity_fixed_point",
                                           *red.reduction->fixed_point_residual,
                                           opts.fixed_point_threshold));
                rep.checks.push_back(check(
                    "equivalence." + tag, "reduction.equivalence",
                    std::max(inst.norm_dist(dir.p, red.p), inst.norm_dist(*dir.q, *red.q)),
                    opts.agreement_threshold));
            }
            double decay = -std::numeric_limits<double>::infinity();
            double contract = 0.0;
            bool converged = true;
            for (const auto& [label, r] : runs) {
                decay = std::max(decay, decay_violation(r.trace, cert.alpha_hat));
                converged = converged && r.converged();
                contract = std::max(contract, contract_excess(r));
            }
            CheckResult d = check("gap_decay." + tag, "solver.geometric_gap_decay",
                                  std::max(decay, 0.0), opts.decay_slack);
            d.note = "alpha_hat = " + fmt17(cert.alpha_hat);
            rep.checks.push_back(std::move(d));
            if (!converged) {
                rep.checks.push_back(failure("contract." + tag, solve_anchor,
                                             "solver did not converge within max_iter"));
            } else {
                CheckResult c = check("contract." + tag, solve_anchor, contract, so.tol);
                c.note = "fixed-point residuals and distance realization";
                rep.checks.push_back(std::move(c));
            }
        } catch (const Error& e) {
            rep.checks.push_back(failure("solve." + tag, solve_anchor, e.what()));
        }
    }
    return rep;
}

inline json to_json(const CheckResult& c) {
    json j{{"name", c.name},          {"anchor", c.anchor},
           {"passed", c.passed},      {"skipped", c.skipped},
           {"degenerate", c.degenerate}};
    j["worst_deviation"] = std::isfinite(c.worst_deviation) ? json(c.worst_deviation)
                                                            : json("inf");
    j["threshold"] = c.threshold;
    j["witness"] = c.witness;
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

inline json to_json(const SuiteReport& r) {
    json j{{"instance", r.instance}, {"passed", r.all_passed()}, {"checks", json::array()}};
    for (const auto& c : r.checks) j["checks"].push_back(to_json(c));
    return j;
}

}  // namespace proxipair::harness
