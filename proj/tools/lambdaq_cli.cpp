// Command-line driver: run the exact automaton simulator, compile automata
// to lambda-q term bundles, reduce terms, and diff the two sides.
//
// Exit codes: 0 success, 1 parse error, 2 validation failure, 3 fuel
// exhausted, 4 comparison mismatch.

#include "lambdaq/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

namespace {

constexpr int kExitParse = 1;
constexpr int kExitValidation = 2;
constexpr int kExitFuel = 3;
constexpr int kExitMismatch = 4;

struct CliError {
    int code;
    std::string message;
};

std::string read_file(const std::string& path) {
    if (path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path);
    if (!in) throw CliError{kExitParse, "cannot open '" + path + "'"};
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct SpecFlags {
    bool strict_unitary = false;
    bool allow_nonunitary = false;
};

lambdaq::pqca::PqcaSpec load_spec(const std::string& path, const SpecFlags& flags) {
    lambdaq::pqca::PqcaSpec spec;
    try {
        spec = lambdaq::pqca::parse_spec(read_file(path));
    } catch (const lambdaq::pqca::SpecError& e) {
        throw CliError{kExitParse, e.what()};
    }
    auto report = lambdaq::pqca::validate(spec);
    if (!report.ok()) {
        std::string msg = "invalid spec:";
        for (const auto& err : report.errors) msg += "\n  " + err;
        throw CliError{kExitValidation, msg};
    }
    if (!report.unitary) {
        if (flags.strict_unitary)
            throw CliError{kExitValidation, "transition matrix is not unitary (strict mode)"};
        if (!flags.allow_nonunitary)
            std::cerr << "warning: transition matrix is not unitary\n";
    }
    return spec;
}

// Replaces the initial state by a seeded random basis configuration; used
// for randomized differential instances.
void randomize_initial(lambdaq::pqca::PqcaSpec& spec, unsigned long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dist(0, spec.state_count() - 1);
    lambdaq::pqca::Configuration config(spec.width);
    for (int& q : config) q = dist(rng);
    spec.initial.clear();
    spec.initial[config] = 1;
}

void print_state(const lambdaq::pqca::SuperposedState& state, bool machine, std::ostream& out) {
    for (const auto& [config, amp] : state) {
        if (machine)
            out << "amp=" << lambdaq::rational_to_string(amp)
                << " config=" << lambdaq::pqca::config_to_string(config) << "\n";
        else
            out << "  " << lambdaq::rational_to_string(amp) << "  "
                << lambdaq::pqca::config_to_string(config) << "\n";
    }
}

int cmd_pqca_run(const std::string& path, long k, const SpecFlags& flags, bool machine) {
    auto spec = load_spec(path, flags);
    auto state = lambdaq::pqca::run(spec, spec.initial, k);
    auto prob = lambdaq::pqca::acceptance_probability(state, spec);
    if (machine) {
        std::cout << "k=" << k << "\n";
        print_state(state, true, std::cout);
        std::cout << "accept_prob=" << lambdaq::rational_to_string(prob) << "\n";
    } else {
        std::cout << "state after " << k << " step(s):\n";
        print_state(state, false, std::cout);
        std::cout << "acceptance probability = " << lambdaq::rational_to_string(prob) << "\n";
    }
    return 0;
}

int cmd_compile(const std::string& path, const std::string& out_path, const SpecFlags& flags,
                bool lcm, bool machine) {
    auto spec = load_spec(path, flags);
    auto compiled = lambdaq::compiler::compile(spec, lcm);
    std::string manifest = lambdaq::compiler::write_manifest(compiled);
    if (out_path.empty() || out_path == "-") {
        std::cout << manifest;
        return 0;
    }
    std::ofstream out(out_path);
    if (!out) throw CliError{kExitParse, "cannot write '" + out_path + "'"};
    out << manifest;
    auto scaled = lambdaq::compiler::scale_superposition(spec.initial);
    const char* sep = machine ? "=" : " = ";
    std::cout << "b" << sep << compiled.scaled.b.str() << "\n";
    std::cout << "d" << sep << scaled.d.str() << "\n";
    std::cout << "width" << sep << spec.width << "\n";
    return 0;
}

int cmd_reduce(const std::string& path, long fuel, bool trace, bool machine) {
    lambdaq::TermPtr term;
    try {
        term = lambdaq::parse_term(read_file(path));
    } catch (const lambdaq::ParseError& e) {
        throw CliError{kExitParse, e.what()};
    }
    lambdaq::ReductionTrace result;
    if (trace) {
        lambdaq::TermPtr t = lambdaq::normalize_structure(term);
        std::cout << "step 0: " << lambdaq::print_term(t) << "\n";
        while (!t->normal && result.steps < fuel) {
            auto r = lambdaq::step(t);
            if (!r) break;
            t = r->term;
            ++result.steps;
            result.work += r->contractions;
            std::cout << "step " << result.steps << ": " << lambdaq::print_term(t) << "\n";
        }
        result.fuel_exhausted = !t->normal;
        if (t->kind == lambdaq::TermKind::Superposition)
            t = lambdaq::canonicalize(t).expand_compressed();
        result.final = t;
    } else {
        result = lambdaq::reduce(term, fuel);
    }
    if (machine) {
        std::cout << "final=" << lambdaq::print_term(result.final) << "\n";
        std::cout << "steps=" << result.steps << "\n";
        std::cout << "work=" << result.work << "\n";
        std::cout << "fuel_exhausted=" << (result.fuel_exhausted ? "true" : "false") << "\n";
    } else {
        std::cout << lambdaq::print_term(result.final) << "\n";
        std::cout << "steps = " << result.steps << ", work = " << result.work << "\n";
        if (result.fuel_exhausted) std::cout << "fuel exhausted; the term above is partial\n";
    }
    return result.fuel_exhausted ? kExitFuel : 0;
}

int cmd_compare(const std::string& path, const lambdaq::harness::CompareOptions& opts,
                const SpecFlags& flags, std::optional<unsigned long> seed, bool machine) {
    auto spec = load_spec(path, flags);
    if (seed) randomize_initial(spec, *seed);
    auto report = lambdaq::harness::compare_run(spec, opts, path);
    if (machine) {
        std::cout << "spec=" << report.spec_id << "\n";
        std::cout << "k=" << report.k << "\n";
        std::cout << "equal=" << (report.equal ? "true" : "false") << "\n";
        std::cout << "steps=" << report.parallel_steps << "\n";
        std::cout << "work=" << report.work << "\n";
        std::cout << "fuel_exhausted=" << (report.fuel_exhausted ? "true" : "false") << "\n";
    } else {
        std::cout << "spec = " << report.spec_id << "\n";
        std::cout << "k = " << report.k << "\n";
        std::cout << "reference state:\n";
        print_state(report.reference, false, std::cout);
        std::cout << "decoded compiled state:\n";
        print_state(report.decoded, false, std::cout);
        std::cout << "equal = " << (report.equal ? "yes" : "no") << "\n";
        std::cout << "parallel steps = " << report.parallel_steps << ", work = " << report.work
                  << "\n";
    }
    for (const auto& diff : report.diffs) {
        std::ostream& out = machine ? std::cout : std::cout;
        out << (machine ? "diff config=" : "  differs at ")
            << lambdaq::pqca::config_to_string(diff.config) << " reference="
            << (diff.reference ? lambdaq::rational_to_string(*diff.reference) : "absent")
            << " compiled="
            << (diff.decoded ? lambdaq::rational_to_string(*diff.decoded) : "absent") << "\n";
    }
    std::cerr << "wall time: " << report.wall_seconds << "s\n";
    if (report.fuel_exhausted) return kExitFuel;
    return report.equal ? 0 : kExitMismatch;
}

int cmd_bench(const std::string& path, const std::string& k_list, long fuel,
              const SpecFlags& flags, std::optional<unsigned long> seed, bool machine) {
    auto spec = load_spec(path, flags);
    if (seed) randomize_initial(spec, *seed);
    std::vector<long> ks;
    std::stringstream ss(k_list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            ks.push_back(std::stol(item));
        } catch (const std::exception&) {
            throw CliError{kExitParse, "bad k-list entry '" + item + "'"};
        }
    }
    if (ks.empty()) throw CliError{kExitParse, "empty k-list"};
    auto result = lambdaq::harness::bench_run(spec, ks, fuel);
    bool fuel_hit = false;
    for (const auto& row : result.rows) {
        if (machine)
            std::cout << "k=" << row.k << " steps=" << row.steps << " work=" << row.work
                      << " wall_ms=" << row.wall_seconds * 1e3 << "\n";
        else
            std::cout << "k = " << row.k << "  steps = " << row.steps << "  work = " << row.work
                      << "  wall = " << row.wall_seconds * 1e3 << " ms\n";
    }
    if (machine) {
        std::cout << "fit.slope=" << result.fit.slope << "\n";
        std::cout << "fit.intercept=" << result.fit.intercept << "\n";
        std::cout << "fit.rel_residual=" << result.fit.rel_residual << "\n";
    } else {
        std::cout << "linear fit: steps = " << result.fit.slope << " * k + " << result.fit.intercept
                  << " (relative residual " << result.fit.rel_residual * 100 << "%)\n";
    }
    return fuel_hit ? kExitFuel : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lambda-q calculus engine and 1d partitioned quantum cellular automaton compiler"};
    app.require_subcommand(1);
    argv = app.ensure_utf8(argv);

    std::string format = "text";
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"text", "machine"}))
        ->capture_default_str();

    SpecFlags flags;
    app.add_flag("--strict-unitary", flags.strict_unitary,
                 "fail validation when the matrix is not unitary");
    app.add_flag("--allow-nonunitary", flags.allow_nonunitary,
                 "silence the non-unitary warning");

    std::optional<unsigned long> seed;
    app.add_option("--seed", seed,
                   "replace the initial state by a seeded random basis configuration");

    auto* run_cmd = app.add_subcommand("pqca-run", "run the exact automaton simulator");
    std::string run_spec;
    long run_k = 1;
    run_cmd->add_option("spec", run_spec, "automaton spec file")->required();
    run_cmd->add_option("-k,--k", run_k, "number of steps")->capture_default_str();

    auto* compile_cmd = app.add_subcommand("compile", "compile a spec to a lambda-q term bundle");
    std::string compile_spec, compile_out;
    bool lcm = false;
    compile_cmd->add_option("spec", compile_spec, "automaton spec file")->required();
    compile_cmd->add_option("-o,--output", compile_out, "manifest output path ('-' for stdout)");
    compile_cmd->add_flag("--lcm-scaling", lcm, "scale by the lcm of denominators instead of the product");

    auto* reduce_cmd = app.add_subcommand("reduce", "reduce a lambda-q term to normal form");
    std::string reduce_file;
    long reduce_fuel = 1'000'000;
    bool trace = false;
    reduce_cmd->add_option("term", reduce_file, "term file ('-' for stdin)")->required();
    reduce_cmd->add_option("--steps", reduce_fuel, "parallel step budget")->capture_default_str();
    reduce_cmd->add_flag("--trace", trace, "print every parallel step");

    auto* compare_cmd =
        app.add_subcommand("compare", "diff the reference simulator against the compiled terms");
    std::string compare_spec;
    long compare_k = 1;
    long compare_fuel = 1'000'000;
    std::string decode_mode = "ledger";
    bool compare_lcm = false;
    compare_cmd->add_option("spec", compare_spec, "automaton spec file")->required();
    compare_cmd->add_option("-k,--k", compare_k, "number of steps")->capture_default_str();
    compare_cmd->add_option("--steps", compare_fuel, "parallel step budget")->capture_default_str();
    compare_cmd->add_option("--decode-mode", decode_mode, "amplitude recovery rule")
        ->check(CLI::IsMember({"ledger", "paper"}))
        ->capture_default_str();
    compare_cmd->add_flag("--lcm-scaling", compare_lcm,
                          "scale by the lcm of denominators instead of the product");

    auto* bench_cmd = app.add_subcommand("bench", "measure parallel steps against k");
    std::string bench_spec;
    std::string k_list = "1,2,3,4,5";
    long bench_fuel = 1'000'000;
    bench_cmd->add_option("spec", bench_spec, "automaton spec file")->required();
    bench_cmd->add_option("--k-list", k_list, "comma-separated step counts")->capture_default_str();
    bench_cmd->add_option("--steps", bench_fuel, "parallel step budget")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        bool machine = format == "machine";
        if (run_cmd->parsed()) return cmd_pqca_run(run_spec, run_k, flags, machine);
        if (compile_cmd->parsed()) return cmd_compile(compile_spec, compile_out, flags, lcm, machine);
        if (reduce_cmd->parsed()) return cmd_reduce(reduce_file, reduce_fuel, trace, machine);
        if (compare_cmd->parsed()) {
            lambdaq::harness::CompareOptions opts;
            opts.k = compare_k;
            opts.fuel = compare_fuel;
            opts.lcm_scaling = compare_lcm;
            opts.mode = decode_mode == "paper" ? lambdaq::compiler::DecodeMode::Paper
                                               : lambdaq::compiler::DecodeMode::Ledger;
            return cmd_compare(compare_spec, opts, flags, seed, machine);
        }
        if (bench_cmd->parsed()) return cmd_bench(bench_spec, k_list, bench_fuel, flags, seed, machine);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const lambdaq::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const lambdaq::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    return 0;
}
