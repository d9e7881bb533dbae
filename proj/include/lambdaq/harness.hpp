#pragma once

#include "lambdaq/compiler.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace lambdaq::harness {

struct CompareOptions {
    long k = 1;
    long fuel = 1'000'000;
    compiler::DecodeMode mode = compiler::DecodeMode::Ledger;
    bool lcm_scaling = false;
};

struct ConfigDiff {
    pqca::Configuration config;
    std::optional<Rational> reference;
    std::optional<Rational> decoded;
};

struct ComparisonReport {
    std::string spec_id;
    long k = 0;
    pqca::SuperposedState reference;  // exact simulator
    pqca::SuperposedState decoded;    // decoded compiled reduction
    bool equal = false;
    std::vector<ConfigDiff> diffs;
    long parallel_steps = 0;
    long work = 0;
    bool fuel_exhausted = false;
    double wall_seconds = 0.0;
};

// Runs the reference simulator and the compiled pipeline side by side and
// compares the resulting rational amplitude maps exactly.
inline ComparisonReport compare_run(const pqca::PqcaSpec& spec, const CompareOptions& opts,
                                    const std::string& spec_id = "") {
    auto t0 = std::chrono::steady_clock::now();
    ComparisonReport report;
    report.spec_id = spec_id;
    report.k = opts.k;

    report.reference = pqca::run(spec, spec.initial, opts.k);

    compiler::CompiledAutomaton compiled = compiler::compile(spec, opts.lcm_scaling);
    compiler::CompiledRun run = compiler::run_compiled(compiled, opts.k, opts.fuel);
    report.fuel_exhausted = run.fuel_exhausted;
    report.parallel_steps = run.total_steps;
    report.work = run.total_work;
    if (!run.fuel_exhausted)
        report.decoded = compiler::decode_superposition(run.state, run.ledger, opts.mode);

    report.equal = !report.fuel_exhausted && report.reference == report.decoded;
    if (!report.equal) {
        auto lit = report.reference.begin();
        auto rit = report.decoded.begin();
        while (lit != report.reference.end() || rit != report.decoded.end()) {
            if (rit == report.decoded.end() ||
                (lit != report.reference.end() && lit->first < rit->first)) {
                report.diffs.push_back({lit->first, lit->second, std::nullopt});
                ++lit;
            } else if (lit == report.reference.end() || rit->first < lit->first) {
                report.diffs.push_back({rit->first, std::nullopt, rit->second});
                ++rit;
            } else {
                if (lit->second != rit->second)
                    report.diffs.push_back({lit->first, lit->second, rit->second});
                ++lit;
                ++rit;
            }
        }
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

// ---------------------------------------------------------------------------
// Step-count measurements against k with a least-squares linear fit.
// ---------------------------------------------------------------------------

struct BenchRow {
    long k = 0;
    long steps = 0;
    long work = 0;
    double wall_seconds = 0.0;
};

struct BenchFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rel_residual = 0.0;  // rms residual over mean steps
};

struct BenchResult {
    std::vector<BenchRow> rows;
    BenchFit fit;
};

inline BenchFit fit_linear(const std::vector<BenchRow>& rows) {
    BenchFit fit;
    const std::size_t n = rows.size();
    if (n < 2) return fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : rows) {
        sx += r.k;
        sy += static_cast<double>(r.steps);
        sxx += static_cast<double>(r.k) * r.k;
        sxy += static_cast<double>(r.k) * r.steps;
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0) return fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0;
    for (const auto& r : rows) {
        double resid = r.steps - (fit.slope * r.k + fit.intercept);
        ss += resid * resid;
    }
    double mean = sy / n;
    fit.rel_residual = mean == 0 ? 0.0 : std::sqrt(ss / n) / std::abs(mean);
    return fit;
}

inline BenchResult bench_run(const pqca::PqcaSpec& spec, const std::vector<long>& ks, long fuel) {
    BenchResult out;
    compiler::CompiledAutomaton compiled = compiler::compile(spec);
    for (long k : ks) {
        auto t0 = std::chrono::steady_clock::now();
        compiler::CompiledRun run = compiler::run_compiled(compiled, k, fuel);
        BenchRow row;
        row.k = k;
        row.steps = run.total_steps;
        row.work = run.total_work;
        row.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.rows.push_back(row);
    }
    out.fit = fit_linear(out.rows);
    return out;
}

}  // namespace lambdaq::harness
