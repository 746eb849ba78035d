#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "proxipair/proxipair.hpp"

namespace proxipair::harness {

using json = nlohmann::json;

struct MapDecl {
    std::string name;
    /// "affine", "piecewise_affine" or "builtin"
    std::string kind;
    Mode mode = Mode::noncyclic;
    AffineMap affine;
    AffineMap on_a;
    AffineMap on_b;
    /// builtin id: "identity", "realizing_constant", "realizing_homothety"
    std::string builtin;
    double factor = 0.5;
};

struct RunConfig {
    std::string name;
    /// picard_cyclic | noncyclic_projection_iteration |
    /// solve_cyclic_via_reduction | solve_noncyclic_via_reduction
    std::string solver;
    std::string map;
    Point x0;
    double tol = 1e-9;
    std::size_t max_iter = 10000;
    std::uint64_t seed = 1;
};

/// In-memory form of an instance file. Bodies are validated on parse.
struct InstanceFile {
    std::string name;
    LpSpace space{2, 2.0};
    ConvexBody A;
    ConvexBody B;
    double tol = 1e-9;
    std::optional<double> expected_dist;
    std::vector<MapDecl> maps;
    std::vector<RunConfig> runs;

    const RunConfig& run(const std::string& run_name) const {
        for (const auto& r : runs)
            if (r.name == run_name) return r;
        throw InvalidArgument("no run named '" + run_name + "' in instance '" + name + "'");
    }
};

/// Input error carrying the JSON path of the offending field.
class ParseError : public InvalidArgument {
public:
    ParseError(const std::string& path, const std::string& what)
        : InvalidArgument(path.empty() ? what : path + ": " + what) {}
};

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline const json& field(const json& j, const std::string& path, const char* key) {
    if (!j.is_object()) throw ParseError(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(path.empty() ? key : path + "." + key, "missing field");
    return *it;
}

inline std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

inline double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError(path, "expected a number");
    return j.get<double>();
}

inline std::string text(const json& j, const std::string& path) {
    if (!j.is_string()) throw ParseError(path, "expected a string");
    return j.get<std::string>();
}

inline Point vec(const json& j, const std::string& path, std::size_t dim) {
    if (!j.is_array()) throw ParseError(path, "expected an array of numbers");
    if (j.size() != dim)
        throw ParseError(path, "expected " + std::to_string(dim) + " coordinates, got " +
                                   std::to_string(j.size()));
    Point x(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i)
        x[static_cast<Eigen::Index>(i)] = number(j[i], path + "[" + std::to_string(i) + "]");
    return x;
}

inline Matrix mat(const json& j, const std::string& path, std::size_t dim) {
    if (!j.is_array() || j.size() != dim)
        throw ParseError(path, "expected " + std::to_string(dim) + " rows");
    Matrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < dim; ++r)
        m.row(static_cast<Eigen::Index>(r)) =
            vec(j[r], path + "[" + std::to_string(r) + "]", dim).transpose();
    return m;
}

inline Mode mode(const json& j, const std::string& path) {
    const std::string s = text(j, path);
    if (s == "cyclic") return Mode::cyclic;
    if (s == "noncyclic") return Mode::noncyclic;
    throw ParseError(path, "expected \"cyclic\" or \"noncyclic\", got \"" + s + "\"");
}

// Rethrows body-constructor validation errors under the body's JSON path.
template <class Build>
ConvexBody build(const std::string& path, Build&& f) {
    try {
        return f();
    } catch (const ParseError&) {
        throw;
    } catch (const InvalidArgument& e) {
        // "radius: must be ..." becomes "A.radius: must be ...".
        const std::string msg = e.what();
        const auto colon = msg.find(": ");
        if (colon != std::string::npos && msg.find(' ') > colon)
            throw ParseError(path + "." + msg.substr(0, colon), msg.substr(colon + 2));
        throw ParseError(path, msg);
    }
}

inline ConvexBody parse_body(const json& j, const std::string& path, const LpSpace& space) {
    const std::string type = text(field(j, path, "type"), join(path, "type"));
    const std::size_t n = space.dim();
    if (type == "ball") {
        Point c = vec(field(j, path, "center"), join(path, "center"), n);
        const double r = number(field(j, path, "radius"), join(path, "radius"));
        return build(path, [&] { return ConvexBody::ball(space, c, r); });
    }
    if (type == "box") {
        Point lo = vec(field(j, path, "lo"), join(path, "lo"), n);
        Point hi = vec(field(j, path, "hi"), join(path, "hi"), n);
        return build(path, [&] { return ConvexBody::box(space, lo, hi); });
    }
    if (type == "halfspace" || type == "hyperplane") {
        Point a = vec(field(j, path, "normal"), join(path, "normal"), n);
        const double c = number(field(j, path, "offset"), join(path, "offset"));
        return build(path, [&] {
            return type == "halfspace" ? ConvexBody::halfspace(space, a, c)
                                       : ConvexBody::hyperplane(space, a, c);
        });
    }
    if (type == "polytope" || type == "segment") {
        const json& vs = field(j, path, "vertices");
        if (!vs.is_array()) throw ParseError(join(path, "vertices"), "expected an array");
        std::vector<Point> verts;
        for (std::size_t i = 0; i < vs.size(); ++i)
            verts.push_back(vec(vs[i], join(path, "vertices") + "[" + std::to_string(i) + "]", n));
        std::vector<Halfspace> facets;
        if (auto it = j.find("facets"); it != j.end()) {
            if (!it->is_array()) throw ParseError(join(path, "facets"), "expected an array");
            for (std::size_t i = 0; i < it->size(); ++i) {
                const std::string fp = join(path, "facets") + "[" + std::to_string(i) + "]";
                facets.push_back({vec(field((*it)[i], fp, "normal"), join(fp, "normal"), n),
                                  number(field((*it)[i], fp, "offset"), join(fp, "offset"))});
            }
        }
        return build(path, [&] { return ConvexBody::polytope(space, verts, facets); });
    }
    if (type == "intersection") {
        const json& ps = field(j, path, "parts");
        if (!ps.is_array()) throw ParseError(join(path, "parts"), "expected an array");
        std::vector<ConvexBody> parts;
        for (std::size_t i = 0; i < ps.size(); ++i)
            parts.push_back(parse_body(ps[i], join(path, "parts") + "[" + std::to_string(i) + "]",
                                       space));
        Point w = vec(field(j, path, "witness"), join(path, "witness"), n);
        return build(path, [&] { return ConvexBody::intersection(space, parts, w); });
    }
    throw ParseError(join(path, "type"), "unknown body type \"" + type + "\"");
}

inline AffineMap parse_affine(const json& j, const std::string& path, std::size_t n) {
    return {mat(field(j, path, "matrix"), join(path, "matrix"), n),
            vec(field(j, path, "offset"), join(path, "offset"), n)};
}

}  // namespace detail

inline InstanceFile parse_instance(const json& j) {
    using namespace detail;
    if (!j.is_object()) throw ParseError("", "instance file must be a JSON object");
    const json& sp = field(j, "", "space");
    const double dim = number(field(sp, "space", "dim"), "space.dim");
    if (!(dim >= 1.0) || dim != std::floor(dim)) throw ParseError("space.dim", "must be a positive integer");
    const double p = number(field(sp, "space", "p"), "space.p");
    std::optional<LpSpace> space;
    try {
        space.emplace(static_cast<std::size_t>(dim), p);
    } catch (const InvalidArgument& e) {
        throw ParseError("", e.what());
    }
    const std::size_t n = space->dim();

    InstanceFile f{
        j.contains("name") ? text(j["name"], "name") : std::string("instance"),
        *space,
        parse_body(field(j, "", "A"), "A", *space),
        parse_body(field(j, "", "B"), "B", *space),
    };
    if (j.contains("tol")) {
        f.tol = number(j["tol"], "tol");
        if (!(f.tol > 0.0)) throw ParseError("tol", "must be positive");
    }
    if (j.contains("expected_dist")) f.expected_dist = number(j["expected_dist"], "expected_dist");

    if (j.contains("maps")) {
        const json& ms = j["maps"];
        if (!ms.is_array()) throw ParseError("maps", "expected an array");
        for (std::size_t i = 0; i < ms.size(); ++i) {
            const std::string path = "maps[" + std::to_string(i) + "]";
            const json& m = ms[i];
            MapDecl d;
            d.name = text(field(m, path, "name"), join(path, "name"));
            d.kind = text(field(m, path, "kind"), join(path, "kind"));
            d.mode = mode(field(m, path, "mode"), join(path, "mode"));
            if (d.kind == "affine") {
                d.affine = parse_affine(m, path, n);
            } else if (d.kind == "piecewise_affine") {
                d.on_a = parse_affine(field(m, path, "on_A"), join(path, "on_A"), n);
                d.on_b = parse_affine(field(m, path, "on_B"), join(path, "on_B"), n);
            } else if (d.kind == "builtin") {
                d.builtin = text(field(m, path, "id"), join(path, "id"));
                if (d.builtin != "identity" && d.builtin != "realizing_constant" &&
                    d.builtin != "realizing_homothety")
                    throw ParseError(join(path, "id"), "unknown builtin map \"" + d.builtin + "\"");
                if (m.contains("factor")) d.factor = number(m["factor"], join(path, "factor"));
                if (!(d.factor >= 0.0 && d.factor <= 1.0))
                    throw ParseError(join(path, "factor"), "must lie in [0, 1]");
            } else {
                throw ParseError(join(path, "kind"), "unknown map kind \"" + d.kind + "\"");
            }
            for (const auto& prev : f.maps)
                if (prev.name == d.name) throw ParseError(join(path, "name"), "duplicate map name");
            f.maps.push_back(std::move(d));
        }
    }

    if (j.contains("runs")) {
        const json& rs = j["runs"];
        if (!rs.is_array()) throw ParseError("runs", "expected an array");
        for (std::size_t i = 0; i < rs.size(); ++i) {
            const std::string path = "runs[" + std::to_string(i) + "]";
            const json& r = rs[i];
            RunConfig c;
            c.name = text(field(r, path, "name"), join(path, "name"));
            c.solver = text(field(r, path, "solver"), join(path, "solver"));
            if (c.solver != "picard_cyclic" && c.solver != "noncyclic_projection_iteration" &&
                c.solver != "solve_cyclic_via_reduction" &&
                c.solver != "solve_noncyclic_via_reduction")
                throw ParseError(join(path, "solver"), "unknown solver \"" + c.solver + "\"");
            c.map = text(field(r, path, "map"), join(path, "map"));
            bool known = false;
            for (const auto& m : f.maps) known = known || m.name == c.map;
            if (!known) throw ParseError(join(path, "map"), "no map named \"" + c.map + "\"");
            c.x0 = vec(field(r, path, "x0"), join(path, "x0"), n);
            if (r.contains("tol")) c.tol = number(r["tol"], join(path, "tol"));
            if (!(c.tol > 0.0)) throw ParseError(join(path, "tol"), "must be positive");
            if (r.contains("max_iter")) {
                const double mi = number(r["max_iter"], join(path, "max_iter"));
                if (!(mi >= 1.0) || mi != std::floor(mi))
                    throw ParseError(join(path, "max_iter"), "must be a positive integer");
                c.max_iter = static_cast<std::size_t>(mi);
            }
            if (r.contains("seed")) {
                if (!r["seed"].is_number_unsigned())
                    throw ParseError(join(path, "seed"), "must be a nonnegative integer");
                c.seed = r["seed"].get<std::uint64_t>();
            }
            f.runs.push_back(std::move(c));
        }
    }
    return f;
}

inline InstanceFile parse_instance_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("", std::string("malformed JSON: ") + e.what());
    }
    return parse_instance(j);
}

inline InstanceFile load_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open instance file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_instance_text(ss.str());
}

// ---------------------------------------------------------------------------
// Serialization

inline json to_json(const Point& x) {
    json a = json::array();
    for (Eigen::Index i = 0; i < x.size(); ++i) a.push_back(x[i]);
    return a;
}

inline json to_json(const Matrix& m) {
    json a = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(to_json(Point(m.row(r).transpose())));
    return a;
}

inline json to_json(const AffineMap& m) {
    return {{"matrix", to_json(m.matrix)}, {"offset", to_json(m.offset)}};
}

inline json to_json(const ConvexBody& body) {
    struct Visitor {
        std::size_t dim;
        json operator()(const Ball& b) const {
            return {{"type", "ball"}, {"center", to_json(b.center)}, {"radius", b.radius}};
        }
        json operator()(const Box& b) const {
            return {{"type", "box"}, {"lo", to_json(b.lo)}, {"hi", to_json(b.hi)}};
        }
        json operator()(const Halfspace& h) const {
            return {{"type", "halfspace"}, {"normal", to_json(h.normal)}, {"offset", h.offset}};
        }
        json operator()(const Hyperplane& h) const {
            return {{"type", "hyperplane"}, {"normal", to_json(h.normal)}, {"offset", h.offset}};
        }
        json operator()(const Polytope& p) const {
            json j = {{"type", "polytope"}, {"vertices", json::array()}};
            for (const auto& v : p.vertices) j["vertices"].push_back(to_json(v));
            // Planar facets are re-derived from the hull on load.
            if (dim > 2 && !p.facets.empty()) {
                j["facets"] = json::array();
                for (const auto& f : p.facets)
                    j["facets"].push_back({{"normal", to_json(f.normal)}, {"offset", f.offset}});
            }
            return j;
        }
        json operator()(const Intersection& in) const {
            json j = {{"type", "intersection"}, {"parts", json::array()}};
            for (const auto& part : in.parts) j["parts"].push_back(to_json(part));
            j["witness"] = to_json(in.witness);
            return j;
        }
    };
    return std::visit(Visitor{body.space().dim()}, body.shape());
}

inline json to_json(const InstanceFile& f) {
    json j;
    j["name"] = f.name;
    j["space"] = {{"dim", f.space.dim()}, {"p", f.space.p()}};
    j["tol"] = f.tol;
    j["A"] = to_json(f.A);
    j["B"] = to_json(f.B);
    if (f.expected_dist) j["expected_dist"] = *f.expected_dist;
    j["maps"] = json::array();
    for (const auto& m : f.maps) {
        json jm = {{"name", m.name}, {"kind", m.kind}, {"mode", to_string(m.mode)}};
        if (m.kind == "affine") {
            jm["matrix"] = to_json(m.affine.matrix);
            jm["offset"] = to_json(m.affine.offset);
        } else if (m.kind == "piecewise_affine") {
            jm["on_A"] = to_json(m.on_a);
            jm["on_B"] = to_json(m.on_b);
        } else {
            jm["id"] = m.builtin;
            if (m.builtin == "realizing_homothety") jm["factor"] = m.factor;
        }
        j["maps"].push_back(std::move(jm));
    }
    j["runs"] = json::array();
    for (const auto& r : f.runs)
        j["runs"].push_back({{"name", r.name},
                             {"solver", r.solver},
                             {"map", r.map},
                             {"x0", to_json(r.x0)},
                             {"tol", r.tol},
                             {"max_iter", r.max_iter},
                             {"seed", r.seed}});
    return j;
}

inline std::string serialize_instance(const InstanceFile& f) { return to_json(f).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Loading into live objects

struct LoadedMap {
    MapSpec map;
    ModeCertificate mode;
};

/// An instance file turned into a ProximityInstance and MapSpecs, with every
/// declared mode re-certified.
struct LoadedInstance {
    InstanceFile file;
    std::shared_ptr<const ProximityInstance> inst;
    std::vector<LoadedMap> maps;

    const MapSpec& map(const std::string& name) const {
        for (const auto& m : maps)
            if (m.map.name() == name) return m.map;
        throw InvalidArgument("no map named '" + name + "'");
    }
};

inline MapSpec realize_map(const MapDecl& d, const std::shared_ptr<const ProximityInstance>& inst) {
    const auto n = static_cast<Eigen::Index>(inst->space().dim());
    if (d.kind == "affine") return MapSpec::affine(d.name, inst, d.affine.matrix, d.affine.offset, d.mode);
    if (d.kind == "piecewise_affine") return MapSpec::piecewise(d.name, inst, d.on_a, d.on_b, d.mode);
    if (d.builtin == "identity") return MapSpec::identity(d.name, inst, d.mode);
    // Constant or homothety toward the realizing pair: on each side,
    // x -> target + factor (x - own anchor).
    const double t = d.builtin == "realizing_constant" ? 0.0 : d.factor;
    const Point& a = inst->realizing_a();
    const Point& b = inst->realizing_b();
    const Point& to_a = d.mode == Mode::cyclic ? b : a;
    const Point& to_b = d.mode == Mode::cyclic ? a : b;
    const Matrix M = t * Matrix::Identity(n, n);
    return MapSpec::piecewise(d.name, inst, AffineMap{M, to_a - t * a}, AffineMap{M, to_b - t * b},
                              d.mode);
}

inline LoadedInstance load(InstanceFile file, const CertifyOptions& copts = {}) {
    auto inst = ProximityInstance::create(file.A, file.B, file.tol);
    LoadedInstance out{std::move(file), inst, {}};
    for (std::size_t i = 0; i < out.file.maps.size(); ++i) {
        const MapDecl& d = out.file.maps[i];
        const std::string path = "maps[" + std::to_string(i) + "]";
        std::optional<MapSpec> spec;
        try {
            spec.emplace(realize_map(d, inst));
        } catch (const InvalidArgument& e) {
            throw ParseError(path, e.what());
        }
        auto mode = certify_mode(*spec, copts);
        if (!mode) {
            std::ostringstream os;
            os << "map '" << d.name << "' declared " << to_string(d.mode) << " but sends "
               << to_string(mode.witness_side) << " point (" << mode.witness->transpose()
               << ") to (" << mode.witness_image->transpose() << ")";
            throw ParseError(detail::join(path, "mode"), os.str());
        }
        out.maps.push_back({std::move(*spec), std::move(mode)});
    }
    return out;
}

}  // namespace proxipair::harness
