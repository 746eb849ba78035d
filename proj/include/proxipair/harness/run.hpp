#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>

#include "proxipair/harness/instance_file.hpp"

namespace proxipair::harness {

/// Command-line overrides applied on top of a run config.
struct RunOverrides {
    std::optional<double> tol;
    std::optional<std::size_t> max_iter;
};

inline SolveOptions solve_options(const RunConfig& run, const RunOverrides& ov = {}) {
    SolveOptions o;
    o.tol = ov.tol.value_or(run.tol);
    o.max_iter = ov.max_iter.value_or(run.max_iter);
    return o;
}

inline CertifyOptions certify_options(const RunConfig& run) {
    CertifyOptions c;
    c.seed = run.seed;
    return c;
}

/// Dispatches a run config to its solver.
inline SolveResult run_solver(const std::string& solver, const MapSpec& map,
                              const ContractionCertificate& cert, const Point& x0,
                              const SolveOptions& opts, const CertifyOptions& copts = {}) {
    if (solver == "picard_cyclic") return picard_cyclic(map, cert, x0, opts);
    if (solver == "noncyclic_projection_iteration")
        return noncyclic_projection_iteration(map, cert, x0, opts);
    if (solver == "solve_cyclic_via_reduction")
        return solve_cyclic_via_reduction(map, cert, x0, opts, copts);
    if (solver == "solve_noncyclic_via_reduction")
        return solve_noncyclic_via_reduction(map, cert, x0, opts, copts);
    throw InvalidArgument("unknown solver '" + solver + "'");
}

inline SolveResult run_solve(const LoadedInstance& li, const RunConfig& run,
                             const RunOverrides& ov = {}) {
    const MapSpec& map = li.map(run.map);
    const CertifyOptions copts = certify_options(run);
    return run_solver(run.solver, map, certify_contraction(map, copts), run.x0,
                      solve_options(run, ov), copts);
}

// ---------------------------------------------------------------------------
// Output

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// CSV trace: index,side,x0..x{d-1},y0..y{d-1},gap. The y columns hold the
/// companion point (x_{n+1} for Picard runs, P x_n for projection runs) and
/// are empty when there is none.
inline void write_trace_csv(std::ostream& out, const IterationTrace& trace, std::size_t dim) {
    out << "index,side";
    for (std::size_t i = 0; i < dim; ++i) out << ",x" << i;
    for (std::size_t i = 0; i < dim; ++i) out << ",y" << i;
    out << ",gap\n";
    for (const auto& s : trace.steps) {
        out << s.index << ',' << to_string(s.side);
        for (Eigen::Index i = 0; i < s.point.size(); ++i) out << ',' << fmt17(s.point[i]);
        for (std::size_t i = 0; i < dim; ++i) {
            out << ',';
            if (s.companion) out << fmt17((*s.companion)[static_cast<Eigen::Index>(i)]);
        }
        out << ',' << fmt17(s.gap) << '\n';
    }
}

inline json summary_json(const SolveResult& r, const RunConfig& run, const std::string& instance,
                         const SolveOptions& opts) {
    json j;
    j["instance"] = instance;
    j["run"] = run.name;
    j["solver"] = run.solver;
    j["map"] = run.map;
    j["kind"] = to_string(r.kind);
    j["converged"] = r.converged();
    j["iterations"] = r.trace.iterations_used;
    j["tol"] = opts.tol;
    j["max_iter"] = opts.max_iter;
    if (r.kind == ResultKind::best_proximity_point) {
        j["x_star"] = to_json(r.p);
    } else {
        j["p"] = to_json(r.p);
        j["q"] = to_json(*r.q);
        j["residual_p"] = r.residual_p;
        j["residual_q"] = r.residual_q;
        j["pair_gap"] = r.pair_gap;
    }
    j["residual"] = r.residual;
    if (!r.trace.steps.empty()) {
        double best = r.trace.steps.front().gap;
        for (const auto& s : r.trace.steps) best = std::min(best, s.gap);
        j["final_gap"] = r.trace.steps.back().gap;
        j["best_gap"] = best;
    }
    j["alpha_hat"] = r.trace.alpha_hat;
    j["predicted_iterations"] = r.trace.predicted_iterations ? json(*r.trace.predicted_iterations)
                                                             : json(nullptr);
    if (r.reduction) {
        json red;
        red["identity_deviation"] = r.reduction->identity_deviation;
        red["horizon"] = r.reduction->horizon;
        if (r.reduction->odd_membership_excess)
            red["odd_membership_excess"] = *r.reduction->odd_membership_excess;
        if (r.reduction->fixed_point_residual)
            red["fixed_point_residual"] = *r.reduction->fixed_point_residual;
        j["reduction"] = red;
    }
    return j;
}

inline json to_json(const PropertyCheck& c) {
    json j{{"holds", c.holds}, {"worst_deviation", c.worst_deviation}};
    j["witness"] = c.witness ? json::array({to_json(c.witness->first), to_json(c.witness->second)})
                             : json(nullptr);
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

inline json to_json(const ProjectorReport& r) {
    return {{"cyclic_distance", to_json(r.cyclic_distance)},
            {"isometry", to_json(r.isometry)},
            {"affine", to_json(r.affine)},
            {"involution", to_json(r.involution)},
            {"continuity", to_json(r.continuity)},
            {"degenerate", r.degenerate},
            {"samples", r.samples}};
}

}  // namespace proxipair::harness
