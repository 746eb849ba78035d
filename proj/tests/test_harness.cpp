#include <gtest/gtest.h>

#include <sstream>

#include "proxipair/harness/harness.hpp"

using namespace proxipair;
using namespace proxipair::harness;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_instance_text(text);
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

const char* kMinimal = R"({
  "space": {"dim": 2, "p": 2},
  "A": {"type": "ball", "center": [-2, 0], "radius": 1},
  "B": {"type": "ball", "center": [2, 0], "radius": 1}
})";

}  // namespace

TEST(Parse, Minimal) {
    const auto f = parse_instance_text(kMinimal);
    EXPECT_EQ(f.space.dim(), 2u);
    EXPECT_TRUE(f.maps.empty());
    EXPECT_NEAR(load(f).inst->dist(), 2.0, 1e-9);
}

TEST(Parse, ErrorsNameTheField) {
    EXPECT_NE(error_of(R"({"space": {"dim": 2, "p": 2},
        "A": {"type": "ball", "center": [0, 0], "radius": -1},
        "B": {"type": "ball", "center": [3, 0], "radius": 1}})")
                  .find("A.radius"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"space": {"dim": 2, "p": 1},
        "A": {"type": "ball", "center": [0, 0], "radius": 1},
        "B": {"type": "ball", "center": [3, 0], "radius": 1}})")
                  .find("p"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"space": {"dim": 2, "p": 2},
        "A": {"type": "ball", "center": [0, 0, 0], "radius": 1},
        "B": {"type": "ball", "center": [3, 0], "radius": 1}})")
                  .find("A.center"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"space": {"dim": 2, "p": 2},
        "A": {"type": "ball", "center": [0, 0], "radius": 1}})")
                  .find("B"),
              std::string::npos);
    EXPECT_NE(error_of("{not json").find("malformed"), std::string::npos);
}

TEST(Parse, RunReferencesUnknownMap) {
    auto j = json::parse(kMinimal);
    j["runs"] = json::array({{{"name", "r"}, {"solver", "picard_cyclic"}, {"map", "Z"},
                              {"x0", {-1, 0}}}});
    EXPECT_NE(error_of(j.dump()).find("runs[0].map"), std::string::npos);
}

TEST(Load, WrongModeNamesTheMap) {
    auto f = segpair();
    f.maps[1].mode = Mode::cyclic;  // S is noncyclic
    try {
        load(f);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("maps[1].mode"), std::string::npos);
    }
}

TEST(Serialize, RoundTrip) {
    for (const auto& f : {segpair(), ballpair(),
                          generate_random_instance(3, 3, 1.5, Family::separated_boxes),
                          generate_random_instance(3, 2, 3.0, Family::parallel_polytopes)}) {
        const std::string once = serialize_instance(f);
        EXPECT_EQ(serialize_instance(parse_instance_text(once)), once) << f.name;
    }
}

TEST(Generate, DeterministicPerSeed) {
    EXPECT_EQ(serialize_instance(generate_random_instance(11, 3, 2.0, Family::separated_balls)),
              serialize_instance(generate_random_instance(11, 3, 2.0, Family::separated_balls)));
    EXPECT_NE(serialize_instance(generate_random_instance(11, 3, 2.0, Family::separated_balls)),
              serialize_instance(generate_random_instance(12, 3, 2.0, Family::separated_balls)));
}

TEST(Generate, PrescribedGapIsTheDistance) {
    for (auto fam : {Family::separated_boxes, Family::separated_balls, Family::parallel_polytopes}) {
        const auto li = load(generate_random_instance(5, 2, 2.0, fam, 3.0));
        EXPECT_NEAR(li.inst->dist(), 3.0, 1e-7) << to_string(fam);
    }
}

TEST(Generate, BallDistanceIsCentreGapMinusRadii) {
    const auto f = generate_random_instance(9, 3, 3.0, Family::separated_balls);
    const auto* a = f.A.as<Ball>();
    const auto* b = f.B.as<Ball>();
    ASSERT_TRUE(a && b);
    // The centres differ along one axis, so every lp distance agrees.
    const double oracle = (a->center - b->center).norm() - a->radius - b->radius;
    EXPECT_NEAR(load(f).inst->dist(), oracle, 1e-7);
}

TEST(Generate, RejectsUnknownFamilyAndBadGap) {
    EXPECT_FALSE(parse_family("spheres").has_value());
    EXPECT_THROW(generate_random_instance(1, 2, 2.0, Family::separated_boxes, -1.0),
                 InvalidArgument);
}

TEST(Trace, CsvHeaderAndDeterminism) {
    const auto li = load(segpair());
    const auto& run = li.file.run("picard-T");
    std::ostringstream a, b;
    write_trace_csv(a, run_solve(li, run).trace, 2);
    write_trace_csv(b, run_solve(li, run).trace, 2);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "index,side,x0,x1,y0,y1,gap");
    EXPECT_NE(a.str().find("\n0,A,2,0,1.5,1,"), std::string::npos);
}

TEST(Trace, SummaryCarriesResult) {
    const auto li = load(segpair());
    const auto& run = li.file.run("reduce-S");
    const auto j = summary_json(run_solve(li, run), run, "segpair", solve_options(run));
    EXPECT_EQ(j["kind"], "best_proximity_pair");
    EXPECT_TRUE(j["converged"].get<bool>());
    EXPECT_NEAR(j["p"][0].get<double>(), 1.0, 1e-8);
    EXPECT_NEAR(j["q"][1].get<double>(), 1.0, 1e-8);
    EXPECT_TRUE(j["reduction"].contains("odd_membership_excess"));
}

TEST(Suite, SegpairPasses) {
    const auto rep = run_verification_suite(load(segpair()));
    for (const auto& c : rep.checks) EXPECT_TRUE(c.passed || c.skipped) << c.name << " " << c.note;
    ASSERT_NE(rep.find("commutation.S"), nullptr);
    EXPECT_LE(rep.find("commutation.S")->worst_deviation, 1e-8);
    // The swap W is an isometry: its solver checks are not run.
    EXPECT_EQ(rep.find("contract.W"), nullptr);
}

TEST(Suite, BallpairPassesAndIsDegenerate) {
    const auto rep = run_verification_suite(load(ballpair()));
    EXPECT_TRUE(rep.all_passed());
    const auto* iso = rep.find("projector.isometry");
    ASSERT_NE(iso, nullptr);
    EXPECT_TRUE(iso->degenerate);
}

TEST(Suite, SkewedMapFailsCommutation) {
    const auto rep = run_verification_suite(load(load_instance_file(PROXIPAIR_SOURCE_DIR "/instances/segpair_skewed.json")));
    const auto* c = rep.find("commutation.R");
    ASSERT_NE(c, nullptr);
    EXPECT_FALSE(c->passed);
    EXPECT_FALSE(rep.all_passed());
    EXPECT_FALSE(c->witness.is_null());
}

TEST(Resolve, BuiltinsAndMissingFiles) {
    EXPECT_EQ(resolve_instance("segpair").name, "segpair");
    EXPECT_THROW(resolve_instance("/nonexistent/instance.json"), InvalidArgument);
}
