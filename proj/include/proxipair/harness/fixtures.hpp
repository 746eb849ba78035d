#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "proxipair/harness/instance_file.hpp"

namespace proxipair::harness {

namespace detail {

inline Point pt(std::initializer_list<double> xs) {
    Point p(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double v : xs) p[i++] = v;
    return p;
}

inline AffineMap affine2(double m00, double m01, double m10, double m11, double b0, double b1) {
    Matrix m(2, 2);
    m << m00, m01, m10, m11;
    return {m, pt({b0, b1})};
}

inline MapDecl affine_decl(std::string name, AffineMap m, Mode mode) {
    MapDecl d;
    d.name = std::move(name);
    d.kind = "affine";
    d.mode = mode;
    d.affine = std::move(m);
    return d;
}

inline MapDecl piecewise_decl(std::string name, AffineMap on_a, AffineMap on_b, Mode mode) {
    MapDecl d;
    d.name = std::move(name);
    d.kind = "piecewise_affine";
    d.mode = mode;
    d.on_a = std::move(on_a);
    d.on_b = std::move(on_b);
    return d;
}

inline RunConfig run(std::string name, std::string solver, std::string map, Point x0,
                     std::uint64_t seed = 1) {
    return {std::move(name), std::move(solver), std::move(map), std::move(x0), 1e-9, 10000, seed};
}

}  // namespace detail

/// Parallel unit segments [1,2] x {0} and [1,2] x {1} in the Euclidean plane.
///
/// Maps: T(x,y) = (1 + (x-1)/2, 1 - y) (cyclic contraction),
/// S(x,y) = (1 + (x-1)/2, y) (noncyclic contraction), the identity, and the
/// swap (x,y) -> (x, 1 - y) (cyclic isometry).
inline InstanceFile segpair() {
    using namespace detail;
    const LpSpace space(2, 2.0);
    InstanceFile f{"segpair", space, ConvexBody::segment(space, pt({1, 0}), pt({2, 0})),
                   ConvexBody::segment(space, pt({1, 1}), pt({2, 1}))};
    f.expected_dist = 1.0;
    f.maps.push_back(affine_decl("T", affine2(0.5, 0, 0, -1, 0.5, 1), Mode::cyclic));
    f.maps.push_back(affine_decl("S", affine2(0.5, 0, 0, 1, 0.5, 0), Mode::noncyclic));
    f.maps.push_back(affine_decl("I", affine2(1, 0, 0, 1, 0, 0), Mode::noncyclic));
    f.maps.push_back(affine_decl("W", affine2(1, 0, 0, -1, 0, 1), Mode::cyclic));
    f.runs.push_back(run("picard-T", "picard_cyclic", "T", pt({2, 0})));
    f.runs.push_back(run("pair-S", "noncyclic_projection_iteration", "S", pt({2, 0})));
    f.runs.push_back(run("reduce-T", "solve_cyclic_via_reduction", "T", pt({2, 0})));
    f.runs.push_back(run("reduce-S", "solve_noncyclic_via_reduction", "S", pt({2, 0})));
    return f;
}

/// Unit Euclidean balls centred at (-2,0) and (2,0); A0 = {(-1,0)},
/// B0 = {(1,0)}. Maps are constant onto the realizing pair.
inline InstanceFile ballpair() {
    using namespace detail;
    const LpSpace space(2, 2.0);
    InstanceFile f{"ballpair", space, ConvexBody::ball(space, pt({-2, 0}), 1.0),
                   ConvexBody::ball(space, pt({2, 0}), 1.0)};
    f.expected_dist = 2.0;
    f.maps.push_back(piecewise_decl("Kc", affine2(0, 0, 0, 0, 1, 0), affine2(0, 0, 0, 0, -1, 0),
                                    Mode::cyclic));
    f.maps.push_back(piecewise_decl("Kn", affine2(0, 0, 0, 0, -1, 0), affine2(0, 0, 0, 0, 1, 0),
                                    Mode::noncyclic));
    f.runs.push_back(run("picard-Kc", "picard_cyclic", "Kc", pt({-2, 0})));
    f.runs.push_back(run("pair-Kn", "noncyclic_projection_iteration", "Kn", pt({-1, 0})));
    f.runs.push_back(run("reduce-Kc", "solve_cyclic_via_reduction", "Kc", pt({-1, 0})));
    f.runs.push_back(run("reduce-Kn", "solve_noncyclic_via_reduction", "Kn", pt({-1, 0})));
    return f;
}

inline std::vector<std::string> builtin_names() { return {"segpair", "ballpair"}; }

inline std::optional<InstanceFile> builtin_instance(const std::string& name) {
    if (name == "segpair") return segpair();
    if (name == "ballpair") return ballpair();
    return std::nullopt;
}

/// A builtin name or a path to a JSON instance file.
inline InstanceFile resolve_instance(const std::string& name_or_path) {
    if (auto f = builtin_instance(name_or_path)) return *f;
    return load_instance_file(name_or_path);
}

// ---------------------------------------------------------------------------
// Random instances

enum class Family { separated_boxes, separated_balls, parallel_polytopes };

inline std::optional<Family> parse_family(const std::string& s) {
    if (s == "separated-boxes") return Family::separated_boxes;
    if (s == "separated-balls") return Family::separated_balls;
    if (s == "parallel-polytopes") return Family::parallel_polytopes;
    return std::nullopt;
}

inline const char* to_string(Family f) noexcept {
    switch (f) {
        case Family::separated_boxes: return "separated-boxes";
        case Family::separated_balls: return "separated-balls";
        case Family::parallel_polytopes: return "parallel-polytopes";
    }
    return "?";
}

/// A disjoint convex pair separated along the first axis by `gap` (drawn
/// from the seed when not given), with expected_dist = gap recorded.
///
/// Each instance carries a noncyclic contraction C and a cyclic contraction K
/// toward the realizing pair (a*, b*), plus one run per solver. Boxes and
/// balls get piecewise homotheties x -> a* + l (x - a*) on A and
/// x -> b* + l (x - b*) on B (targets swapped for K); segment pairs, which are
/// flat along the separating axis, get globally affine maps.
inline InstanceFile generate_random_instance(std::uint64_t seed, std::size_t dim, double p,
                                             Family family,
                                             std::optional<double> gap = std::nullopt) {
    using namespace detail;
    if (family == Family::parallel_polytopes && (dim < 2 || dim > 8))
        throw InvalidArgument("parallel-polytopes needs 2 <= dim <= 8");
    const LpSpace space(dim, p);
    const auto n = static_cast<Eigen::Index>(dim);
    std::mt19937_64 rng(seed);
    auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

    const double g = gap ? *gap : uni(0.5, 3.0);
    if (!(g > 0.0)) throw InvalidArgument("gap: must be positive");
    const double lambda = uni(0.3, 0.7);

    Point shift(n);
    for (Eigen::Index i = 0; i < n; ++i) shift[i] = uni(-3.0, 3.0);
    const Point e0 = Point::Unit(n, 0);

    std::optional<ConvexBody> A, B;
    Point a_star(n), x0_proximal(n);
    // The cyclic homothety must shrink each body into the other one.
    double lambda_k = lambda;
    std::vector<MapDecl> maps;
    Point x0_any(n);

    if (family == Family::separated_boxes) {
        Point lo_a(n), hi_a(n), lo_b(n), hi_b(n);
        lo_a[0] = -uni(0.5, 2.0), hi_a[0] = 0.0;
        lo_b[0] = g, hi_b[0] = g + uni(0.5, 2.0);
        auto fit = [&](double from, double to) { lambda_k = std::min(lambda_k, to / from); };
        a_star[0] = 0.0;
        x0_proximal[0] = 0.0;
        for (Eigen::Index i = 1; i < n; ++i) {
            const double c = uni(-1.0, 1.0);
            lo_a[i] = c - uni(0.2, 1.5), hi_a[i] = c + uni(0.2, 1.5);
            lo_b[i] = c - uni(0.2, 1.5), hi_b[i] = c + uni(0.2, 1.5);
            a_star[i] = c;
            x0_proximal[i] = uni(std::max(lo_a[i], lo_b[i]), std::min(hi_a[i], hi_b[i]));
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            const double la = a_star[i] - lo_a[i], ha = hi_a[i] - a_star[i];
            const double lb = (i == 0 ? g : a_star[i]) - lo_b[i], hb = hi_b[i] - (i == 0 ? g : a_star[i]);
            // Axis 0 is reflected: the depth of A maps onto the depth of B.
            if (i == 0) {
                fit(la, hb);
                fit(hb, la);
            } else {
                fit(la, lb), fit(ha, hb), fit(lb, la), fit(hb, ha);
            }
        }
        A = ConvexBody::box(space, lo_a + shift, hi_a + shift);
        B = ConvexBody::box(space, lo_b + shift, hi_b + shift);
        for (Eigen::Index i = 0; i < n; ++i) x0_any[i] = uni(lo_a[i], hi_a[i]);
    } else if (family == Family::separated_balls) {
        const double r1 = uni(0.5, 2.0), r2 = uni(0.5, 2.0);
        A = ConvexBody::ball(space, shift, r1);
        B = ConvexBody::ball(space, shift + (r1 + r2 + g) * e0, r2);
        a_star = r1 * e0;
        x0_proximal = a_star;
        lambda_k = std::min({lambda, r2 / r1, r1 / r2});
        x0_any = -r1 * e0;
    } else {
        Point v = Point::Zero(n), d = Point::Zero(n);
        for (Eigen::Index i = 1; i < n; ++i) v[i] = uni(-1.0, 1.0), d[i] = uni(-1.5, 1.5);
        if (d.norm() < 0.2) d[1] = 1.0;
        std::vector<Point> va{v + shift, v + d + shift};
        // Interior collinear vertices exercise the segment detection.
        const int extra = static_cast<int>(uni(0.0, 3.0));
        for (int k = 0; k < extra; ++k) va.push_back(v + uni(0.1, 0.9) * d + shift);
        std::vector<Point> vb;
        for (const auto& x : va) vb.push_back(x + g * e0);
        A = ConvexBody::polytope(space, va);
        B = ConvexBody::polytope(space, vb);
        a_star = v + 0.5 * d;
        x0_proximal = v + uni(0.0, 1.0) * d;
        x0_any = v + uni(0.0, 1.0) * d;

        // Identity on the separating axis, homothety on the others.
        Matrix m = lambda * Matrix::Identity(n, n);
        m(0, 0) = 1.0;
        Point off = (1.0 - lambda) * (a_star + shift);
        off[0] = 0.0;
        maps.push_back(affine_decl("C", {m, off}, Mode::noncyclic));
        Matrix mc = m;
        mc(0, 0) = -1.0;
        Point offc = off;
        offc[0] = 2.0 * shift[0] + g;
        maps.push_back(affine_decl("K", {mc, offc}, Mode::cyclic));
    }
    a_star += shift;
    x0_proximal += shift;
    x0_any += shift;
    const Point b_star = a_star + g * e0;

    if (maps.empty()) {
        // C: x -> a* + l (x - a*) on A, x -> b* + l (x - b*) on B.
        // K: x -> b* + D (x - a*) on A, x -> a* + D (x - b*) on B, where D
        // scales by lambda_k and flips the separating axis.
        const Matrix m = lambda * Matrix::Identity(n, n);
        maps.push_back(piecewise_decl("C", {m, (1.0 - lambda) * a_star},
                                      {m, (1.0 - lambda) * b_star}, Mode::noncyclic));
        Matrix d = lambda_k * Matrix::Identity(n, n);
        d(0, 0) = -lambda_k;
        maps.push_back(piecewise_decl("K", {d, b_star - d * a_star}, {d, a_star - d * b_star},
                                      Mode::cyclic));
    }

    InstanceFile f{std::string(to_string(family)) + "-" + std::to_string(dim) + "d-seed" +
                       std::to_string(seed),
                   space, *A, *B};
    f.expected_dist = g;
    f.maps = std::move(maps);
    f.runs.push_back(run("picard-K", "picard_cyclic", "K", x0_any, seed));
    f.runs.push_back(run("pair-C", "noncyclic_projection_iteration", "C", x0_proximal, seed));
    f.runs.push_back(run("reduce-K", "solve_cyclic_via_reduction", "K", x0_proximal, seed));
    f.runs.push_back(run("reduce-C", "solve_noncyclic_via_reduction", "C", x0_proximal, seed));
    return f;
}

}  // namespace proxipair::harness
