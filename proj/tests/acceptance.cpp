// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Expected values come from closed forms or independent
// oracles computed here, never from the library under test.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "proxipair/harness/harness.hpp"

using namespace proxipair;
using namespace proxipair::harness;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Point pt(double x, double y) {
    Point p(2);
    p << x, y;
    return p;
}

double dist_inf(const Point& a, const Point& b) { return (a - b).lpNorm<Eigen::Infinity>(); }

int failures = 0;

void report(int id, const std::string& title, bool ok, const std::string& detail) {
    std::printf("[%s] %2d %-34s %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// Fixtures: the two builtins plus one generated instance per family and p.
std::vector<LoadedInstance> fixture_set() {
    std::vector<LoadedInstance> out;
    out.push_back(load(segpair()));
    out.push_back(load(ballpair()));
    for (Family f : {Family::separated_boxes, Family::separated_balls, Family::parallel_polytopes})
        for (double p : {1.5, 2.0, 3.0}) out.push_back(load(generate_random_instance(7, 3, p, f)));
    return out;
}

void criterion_1() {
    const LoadedInstance li = load(segpair());
    const MapSpec& T = li.map("T");
    const auto cert = certify_contraction(T);
    const auto t0 = Clock::now();
    const SolveResult r = picard_cyclic(T, cert, pt(2, 0));
    const double ms = ms_since(t0);

    double worst = 0.0;
    int n_max = -1;
    for (const auto& s : r.trace.steps) {
        if (s.index % 2 != 0 || s.index / 2 > 15) continue;
        const int n = static_cast<int>(s.index / 2);
        worst = std::max(worst, dist_inf(s.point, pt(1.0 + std::pow(4.0, -n), 0.0)));
        n_max = std::max(n_max, n);
    }
    const double residual = std::hypot(r.p[0] - T.apply(r.p)[0], r.p[1] - T.apply(r.p)[1]) - 1.0;
    const bool ok = r.converged() && n_max == 15 && worst <= 1e-9 && residual <= 1e-9 && ms < 10.0;
    report(1, "picard cyclic convergence", ok,
           fmt("orbit err %.2e, residual %.2e, %.3f ms", worst, residual, ms));
}

void criterion_2() {
    const LoadedInstance li = load(segpair());
    const MapSpec& S = li.map("S");
    const auto cert = certify_contraction(S);
    const auto t0 = Clock::now();
    const SolveResult r = noncyclic_projection_iteration(S, cert, pt(2, 0));
    const double ms = ms_since(t0);

    double worst = 0.0;
    for (const auto& s : r.trace.steps) {
        const double c = 1.0 + std::pow(2.0, -static_cast<double>(s.index));
        worst = std::max({worst, dist_inf(s.point, pt(c, 0)), dist_inf(*s.companion, pt(c, 1))});
    }
    const Point& p = r.p;
    const Point& q = *r.q;
    const double res = std::max({(p - S.apply(p)).norm(), (q - S.apply(q)).norm(),
                                 std::abs((p - q).norm() - 1.0)});
    const bool ok = r.converged() && worst <= 1e-9 && res <= 1e-9 && ms < 10.0;
    report(2, "noncyclic pair convergence", ok,
           fmt("orbit err %.2e, pair residual %.2e, %.3f ms", worst, res, ms));
}

void criterion_3() {
    const auto t0 = Clock::now();
    VerifyOptions vo;
    vo.samples = 1000;
    double worst = 0.0;
    int instances = 0, failed = 0;
    auto run = [&](const InstanceFile& f) {
        const LoadedInstance li = load(f);
        const ProjectorReport rep = verify_projector_properties(ProximalProjector(li.inst), vo);
        for (const auto* c : {&rep.cyclic_distance, &rep.isometry, &rep.affine, &rep.involution,
                              &rep.continuity})
            worst = std::max(worst, c->worst_deviation);
        ++instances;
        if (!rep.all_hold()) ++failed;
    };
    run(segpair());
    for (double p : {1.5, 2.0, 3.0})
        for (std::uint64_t seed = 1; seed <= 100; ++seed)
            run(generate_random_instance(seed, 2 + seed % 4, p, Family::separated_boxes));
    const double ms = ms_since(t0);
    const bool ok = failed == 0 && worst <= 1e-8 && ms < 5000.0;
    report(3, "projector properties", ok,
           fmt("%.0f instances, worst dev %.2e, %.0f ms", instances, worst, ms) +
               (failed ? " (" + std::to_string(failed) + " failed)" : ""));
}

void criterion_4(const std::vector<LoadedInstance>& fixtures) {
    double worst = 0.0;
    int maps = 0;
    CertifyOptions co;
    co.samples = 1000;
    for (const auto& li : fixtures) {
        const ProximalProjector P(li.inst);
        for (const auto& lm : li.maps) {
            const MapSpec& T = lm.map;
            if (T.mode() != Mode::noncyclic || !certify_contraction(T).contraction(1e-7)) continue;
            if (!certify_relatively_nonexpansive(T)) continue;
            worst = std::max(worst, check_commutation(T, P, co).max_deviation);
            ++maps;
        }
    }
    report(4, "commutation T P = P T", maps > 0 && worst <= 1e-8,
           fmt("%.0f noncyclic contractions, max dev %.2e", maps, worst));
}

void criterion_5() {
    const LoadedInstance li = load(segpair());
    const MapSpec& T = li.map("T");  // cyclic
    const MapSpec& S = li.map("S");  // noncyclic
    const ProximalProjector P(li.inst);
    const ComposedMap TP = compose_with_projector(T, P);
    const ComposedMap SP = compose_with_projector(S, P);

    // Closed forms from x0 = (2,0): T^{2n} x0 = (1 + 4^-n, 0) and
    // (TP)^{2n} x0 = (1 + 2^-2n, 0); S^{2n} x0 = (SP)^{2n} x0 = (1 + 4^-n, 0).
    // Odd iterates (SP)^{2n+1} x0 = (1 + 2^-(2n+1), 1) lie in B0 = B.
    double cyc = 0.0, non = 0.0, odd = 0.0, oracle = 0.0;
    Point u = pt(2, 0), v = u, w = u, z = u;
    for (int n = 1; n <= 20; ++n) {
        u = TP.apply(TP.apply(u));
        v = T.apply(T.apply(v));
        const Point sp_odd = SP.apply(w);
        odd = std::max(odd, std::abs(sp_odd[1] - 1.0) +
                                std::max({0.0, 1.0 - sp_odd[0], sp_odd[0] - 2.0}));
        w = SP.apply(sp_odd);
        z = S.apply(S.apply(z));
        cyc = std::max(cyc, (u - v).norm());
        non = std::max(non, (w - z).norm());
        oracle = std::max({oracle, dist_inf(v, pt(1 + std::pow(4.0, -n), 0)),
                           dist_inf(w, pt(1 + std::pow(4.0, -n), 0))});
    }
    const SolveResult rc = solve_cyclic_via_reduction(T, pt(2, 0));
    const SolveResult rn = solve_noncyclic_via_reduction(S, pt(2, 0));
    const double lib = std::max(rc.reduction->identity_deviation, rn.reduction->identity_deviation);
    const double lib_odd = *rn.reduction->odd_membership_excess;
    const bool ok = cyc <= 1e-9 && non <= 1e-9 && odd <= 1e-8 && oracle <= 1e-9 && lib <= 1e-9 &&
                    lib_odd <= 1e-8;
    report(5, "reduction identities", ok,
           fmt("even-orbit dev %.2e / %.2e, odd B0 excess %.2e", std::max(cyc, lib),
               std::max(non, oracle), std::max(odd, lib_odd)));
}

void criterion_6(const std::vector<LoadedInstance>& fixtures) {
    double worst = 0.0;
    int compared = 0;
    std::string where;
    for (const auto& li : fixtures) {
        const ProximityInstance& inst = *li.inst;
        const Point x0 = inst.realizing_a();
        for (const auto& lm : li.maps) {
            const MapSpec& T = lm.map;
            const auto cert = certify_contraction(T);
            if (!cert.contraction(1e-7)) continue;
            double dev;
            if (T.mode() == Mode::cyclic) {
                const SolveResult a = picard_cyclic(T, cert, x0);
                const SolveResult b = solve_cyclic_via_reduction(T, cert, x0);
                dev = inst.norm_dist(a.p, b.p);
            } else {
                const SolveResult a = noncyclic_projection_iteration(T, cert, x0);
                const SolveResult b = solve_noncyclic_via_reduction(T, cert, x0);
                dev = std::max(inst.norm_dist(a.p, b.p), inst.norm_dist(*a.q, *b.q));
            }
            if (dev > worst) where = li.file.name + "/" + T.name();
            worst = std::max(worst, dev);
            ++compared;
        }
    }
    report(6, "direct vs reduced solvers", compared > 0 && worst <= 1e-6,
           fmt("%.0f map/solver pairs, max disagreement %.2e", compared, worst) +
               (where.empty() ? "" : " at " + where));
}

void criterion_7() {
    const LoadedInstance li = load(segpair());
    const MapSpec& T = li.map("T");
    const auto cert = certify_contraction(T);
    std::vector<Point> limits;
    for (double x : {1.0, 1.2, 1.5, 1.77, 2.0}) limits.push_back(picard_cyclic(T, cert, pt(x, 0)).p);
    double spread = 0.0;
    for (std::size_t i = 0; i < limits.size(); ++i)
        for (std::size_t j = i + 1; j < limits.size(); ++j)
            spread = std::max(spread, (limits[i] - limits[j]).norm());
    report(7, "uniqueness of x*", spread <= 1e-6, fmt("5 starts, max pairwise spread %.2e", spread));
}

void criterion_8() {
    // Oracle: sup over u in (0, 1] of (sqrt(u^2/4 + 1) - 1) / (sqrt(u^2 + 1) - 1).
    double oracle = 0.0;
    const int n = 1000000;
    for (int i = 1; i <= n; ++i) {
        const double u = static_cast<double>(i) / n;
        oracle = std::max(oracle, (std::sqrt(u * u / 4 + 1) - 1) / (std::sqrt(u * u + 1) - 1));
    }
    const LoadedInstance li = load(segpair());
    const auto cert = certify_contraction(li.map("T"));
    const bool ok = std::abs(cert.alpha_hat - oracle) <= 1e-3 &&
                    std::abs(cert.alpha_hat - 0.2850) <= 1e-3;
    report(8, "contraction modulus oracle", ok,
           fmt("alpha_hat %.6f, oracle %.6f, exact flag %.0f", cert.alpha_hat, oracle,
               cert.exact ? 1.0 : 0.0));
}

void criterion_9(const std::vector<LoadedInstance>& fixtures) {
    double worst = -1.0;
    int runs = 0;
    auto scan = [&](const SolveResult& r, double alpha) {
        ++runs;
        for (std::size_t i = 1; i < r.trace.steps.size(); ++i)
            worst = std::max(worst, r.trace.steps[i].gap - alpha * r.trace.steps[i - 1].gap);
    };
    for (const auto& li : fixtures) {
        for (const auto& lm : li.maps) {
            const MapSpec& T = lm.map;
            const auto cert = certify_contraction(T);
            if (!cert.contraction(1e-7)) continue;
            const Point& a0 = li.inst->realizing_a();
            for (const auto& run : li.file.runs)
                if (run.map == T.name()) scan(run_solver(run.solver, T, cert, run.x0, {}), cert.alpha_hat);
            if (T.mode() == Mode::cyclic) {
                scan(picard_cyclic(T, cert, a0), cert.alpha_hat);
            } else {
                scan(noncyclic_projection_iteration(T, cert, a0), cert.alpha_hat);
                scan(solve_noncyclic_via_reduction(T, cert, a0), cert.alpha_hat);
            }
        }
    }
    report(9, "geometric gap decay", runs > 0 && worst <= 1e-9,
           fmt("%.0f runs, max gap_{n+1} - alpha gap_n = %.2e", runs, worst));
}

void criterion_10() {
    double worst = 0.0;
    const double ps[] = {1.5, 2.0, 3.0};
    const Family fams[] = {Family::separated_boxes, Family::separated_balls,
                           Family::parallel_polytopes};
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const InstanceFile f =
            generate_random_instance(seed, 2 + seed % 4, ps[(seed / 3) % 3], fams[seed % 3]);
        const DistanceResult d = distance_between(f.A, f.B);
        worst = std::max(worst, std::abs(d.dist - *f.expected_dist));
    }
    const InstanceFile bp = ballpair();
    const DistanceResult d = distance_between(bp.A, bp.B);
    const double ball_err =
        std::max({std::abs(d.dist - 2.0), dist_inf(d.a, pt(-1, 0)), dist_inf(d.b, pt(1, 0))});
    report(10, "distance oracle", worst <= 1e-7 && ball_err <= 1e-8,
           fmt("100 generated: max err %.2e; ballpair err %.2e", worst, ball_err));
}

}  // namespace

int main() {
    std::printf("proxipair acceptance suite\n");
    const std::vector<std::function<void()>> standalone{criterion_1, criterion_2, criterion_3};
    for (const auto& c : standalone) c();
    const auto fixtures = fixture_set();
    criterion_4(fixtures);
    criterion_5();
    criterion_6(fixtures);
    criterion_7();
    criterion_8();
    criterion_9(fixtures);
    criterion_10();
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
