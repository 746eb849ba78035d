// proxipair: solve, verify, generate and benchmark proximity instances.
//
// Exit codes: 0 success, 1 input or precondition error, 2 non-convergence
// or a failed verification check.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "proxipair/harness/harness.hpp"

namespace fs = std::filesystem;
using namespace proxipair;
using namespace proxipair::harness;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNotConverged = 2;

struct Common {
    std::string out = "proxipair-out";
    std::optional<double> tol;
    std::optional<std::size_t> max_iter;
    std::optional<std::uint64_t> seed;

    fs::path out_dir() const {
        if (const char* env = std::getenv("PROXIPAIR_OUT"); env && *env) return env;
        return out;
    }
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--out", c.out, "output directory (PROXIPAIR_OUT overrides)");
    cmd->add_option("--tol", c.tol, "solver tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", c.max_iter, "iteration cap")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", c.seed, "seed for sampling");
}

void write_file(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
    out << text;
}

struct RunRecord {
    std::string instance;
    std::string run;
    bool converged = false;
    std::size_t iterations = 0;
    double residual = 0.0;
    double millis = 0.0;
    std::string error;
};

RunRecord solve_one(const LoadedInstance& li, RunConfig run, const Common& c, const fs::path& dir) {
    if (c.seed) run.seed = *c.seed;
    const RunOverrides ov{c.tol, c.max_iter};
    const auto t0 = std::chrono::steady_clock::now();
    const SolveResult r = run_solve(li, run, ov);
    RunRecord rec{li.file.name, run.name, r.converged(), r.trace.iterations_used, r.residual};
    rec.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    std::ostringstream csv;
    write_trace_csv(csv, r.trace, li.inst->space().dim());
    write_file(dir / (run.name + ".csv"), csv.str());
    write_file(dir / (run.name + ".json"),
               summary_json(r, run, li.file.name, solve_options(run, ov)).dump(2) + "\n");
    return rec;
}

int cmd_solve(const std::string& source, const std::string& run_name, const Common& c) {
    const LoadedInstance li = load(resolve_instance(source));
    std::vector<RunConfig> runs;
    if (run_name.empty()) runs = li.file.runs;
    else runs.push_back(li.file.run(run_name));
    if (runs.empty()) throw InvalidArgument("instance '" + li.file.name + "' declares no runs");

    const fs::path dir = c.out_dir() / li.file.name;
    int code = kOk;
    for (const auto& run : runs) {
        const RunRecord rec = solve_one(li, run, c, dir);
        std::cout << rec.run << ": " << (rec.converged ? "converged" : "NOT CONVERGED") << " after "
                  << rec.iterations << " iterations, residual " << fmt17(rec.residual) << "\n";
        if (!rec.converged) code = kNotConverged;
    }
    std::cout << "wrote " << dir.string() << "\n";
    return code;
}

int cmd_verify(const std::string& source, const Common& c, std::size_t samples) {
    const LoadedInstance li = load(resolve_instance(source));
    SuiteOptions opts;
    opts.samples = samples;
    if (c.seed) opts.seed = opts.certify.seed = *c.seed;
    if (c.tol) opts.solve.tol = *c.tol;
    if (c.max_iter) opts.solve.max_iter = *c.max_iter;
    const SuiteReport rep = run_verification_suite(li, opts);

    for (const auto& chk : rep.checks) {
        const char* status = chk.skipped ? "SKIP" : chk.passed ? "PASS" : "FAIL";
        std::cout << std::left << std::setw(5) << status << std::setw(34) << chk.name
                  << std::setw(40) << chk.anchor;
        if (!chk.skipped && chk.threshold > 0.0)
            std::cout << std::setprecision(3) << chk.worst_deviation << " <= " << chk.threshold;
        if (chk.degenerate) std::cout << "  [degenerate]";
        if (!chk.note.empty()) std::cout << "  (" << chk.note << ")";
        std::cout << "\n";
    }
    const fs::path path = c.out_dir() / li.file.name / "verify.json";
    write_file(path, to_json(rep).dump(2) + "\n");
    std::cout << (rep.all_passed() ? "all checks passed" : "some checks FAILED") << "; wrote "
              << path.string() << "\n";
    return rep.all_passed() ? kOk : kNotConverged;
}

int cmd_gen(std::uint64_t seed, std::size_t dim, double p, const std::string& family,
            std::optional<double> gap, bool to_dir, const Common& c) {
    const auto fam = parse_family(family);
    if (!fam) throw InvalidArgument("unknown family '" + family + "'");
    const InstanceFile f = generate_random_instance(seed, dim, p, *fam, gap);
    const std::string text = serialize_instance(f);
    if (!to_dir) {
        std::cout << text;
        return kOk;
    }
    const fs::path path = c.out_dir() / (f.name + ".json");
    write_file(path, text);
    std::cout << path.string() << "\n";
    return kOk;
}

int cmd_bench(const std::vector<std::string>& sources, const Common& c) {
    std::vector<LoadedInstance> loaded;
    for (const auto& s : sources) loaded.push_back(load(resolve_instance(s)));

    const fs::path root = c.out_dir() / "bench";
    std::vector<std::future<RunRecord>> jobs;
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        // Duplicate names get distinct directories.
        const fs::path dir = root / (loaded[i].file.name + "-" + std::to_string(i));
        for (const auto& run : loaded[i].file.runs)
            jobs.push_back(std::async(std::launch::async, [&, i, run, dir] {
                try {
                    return solve_one(loaded[i], run, c, dir);
                } catch (const std::exception& e) {
                    RunRecord rec{loaded[i].file.name, run.name};
                    rec.error = e.what();
                    return rec;
                }
            }));
    }
    int code = kOk;
    std::cout << std::left << std::setw(40) << "instance" << std::setw(34) << "run" << std::setw(8)
              << "iters" << std::setw(12) << "ms" << "residual\n";
    for (auto& j : jobs) {
        const RunRecord r = j.get();
        std::cout << std::setw(40) << r.instance << std::setw(34) << r.run;
        if (!r.error.empty()) {
            std::cout << "error: " << r.error << "\n";
            code = std::max(code, kInputError);
            continue;
        }
        std::cout << std::setw(8) << r.iterations << std::setw(12) << std::setprecision(4)
                  << r.millis << fmt17(r.residual) << (r.converged ? "" : "  NOT CONVERGED")
                  << "\n";
        if (!r.converged) code = kNotConverged;
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"best proximity points and pairs on convex pairs in lp spaces"};
    app.require_subcommand(1);
    Common common;

    std::string source, run_name;
    auto* solve = app.add_subcommand("solve", "run a solver and write its trace");
    solve->add_option("instance", source, "instance file or builtin (segpair, ballpair)")->required();
    solve->add_option("run", run_name, "run name (default: every run)");
    add_common(solve, common);

    std::size_t samples = 1000;
    auto* verify = app.add_subcommand("verify", "run the verification suite");
    verify->add_option("instance", source, "instance file or builtin")->required();
    verify->add_option("--samples", samples, "samples per property")->check(CLI::PositiveNumber);
    add_common(verify, common);

    std::uint64_t gen_seed = 1;
    std::size_t dim = 2;
    double p = 2.0;
    std::string family = "separated-boxes";
    std::optional<double> gap;
    auto* gen = app.add_subcommand("gen", "generate a random instance (stdout unless --out)");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--dim", dim, "dimension")->check(CLI::PositiveNumber);
    gen->add_option("--p", p, "exponent in (1, inf)");
    gen->add_option("--family", family, "separated-boxes | separated-balls | parallel-polytopes");
    gen->add_option("--gap", gap, "separation (default: drawn from the seed)");
    auto* gen_out = gen->add_option("--out", common.out, "output directory");

    std::vector<std::string> sources;
    auto* bench = app.add_subcommand("bench", "run every run of several instances concurrently");
    bench->add_option("instances", sources, "instance files or builtins")->required();
    add_common(bench, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInputError;
    }

    try {
        if (*solve) return cmd_solve(source, run_name, common);
        if (*verify) return cmd_verify(source, common, samples);
        if (*gen) {
            const bool to_dir = gen_out->count() > 0 || std::getenv("PROXIPAIR_OUT");
            return cmd_gen(gen_seed, dim, p, family, gap, to_dir, common);
        }
        if (*bench) return cmd_bench(sources, common);
    } catch (const NotConverged& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNotConverged;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}
