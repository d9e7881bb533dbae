#pragma once

#include "lambdaq/encodings.hpp"
#include "lambdaq/parser.hpp"
#include "lambdaq/pqca.hpp"
#include "lambdaq/reduce.hpp"

#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace lambdaq::compiler {

using pqca::Configuration;
using pqca::PqcaSpec;
using pqca::SuperposedState;

struct MalformedConfiguration : Error {
    using Error::Error;
};
struct ZeroTotalCount : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Scaling: clearing denominators turns rational amplitudes into the signed
// integer branch counts the calculus works with.
// ---------------------------------------------------------------------------

struct ScaledMatrix {
    BigInt b;                            // product (or lcm) of all entry denominators
    std::vector<std::vector<BigInt>> t;  // T = b * Lambda, indexed [from][to]
};

inline ScaledMatrix scale_matrix(const pqca::Matrix& lambda, bool lcm_mode = false) {
    BigInt b = 1;
    for (const auto& row : lambda.rows)
        for (const auto& entry : row) {
            BigInt den = denominator(entry);
            b = lcm_mode ? big_lcm(b, den) : b * den;
        }
    ScaledMatrix out;
    out.b = b;
    out.t.reserve(lambda.rows.size());
    for (const auto& row : lambda.rows) {
        std::vector<BigInt> trow;
        trow.reserve(row.size());
        for (const auto& entry : row) {
            Rational scaled = entry * Rational(b);
            trow.push_back(numerator(scaled));  // exact integer by construction
        }
        out.t.push_back(std::move(trow));
    }
    return out;
}

struct ScaledState {
    BigInt d;  // product of the amplitude denominators
    std::map<Configuration, BigInt> counts;
};

inline ScaledState scale_superposition(const SuperposedState& state) {
    ScaledState out;
    out.d = 1;
    for (const auto& [config, amp] : state) out.d *= denominator(amp);
    for (const auto& [config, amp] : state)
        out.counts[config] = numerator(amp * Rational(out.d));
    return out;
}

// Tracks the denominator bookkeeping connecting integer branch counts back
// to rational amplitudes: after `steps_applied` compiled steps the total
// scale is d * b^(width * steps_applied).
struct ScaleLedger {
    BigInt b = 1;
    BigInt d = 1;
    long steps_applied = 0;
    int width = 1;

    BigInt total_scale() const {
        return d * big_pow(b, static_cast<unsigned long>(width) *
                                  static_cast<unsigned long>(steps_applied));
    }
};

// ---------------------------------------------------------------------------
// Configuration encoding and the decode map. The decode map is a fixed
// syntactic operation outside the calculus.
// ---------------------------------------------------------------------------

inline TermPtr encode_state(int q) { return church(static_cast<unsigned long>(q)); }

inline TermPtr encode_config(const Configuration& config) {
    std::vector<TermPtr> items;
    items.reserve(config.size());
    for (int q : config) items.push_back(encode_state(q));
    return list_value(items);
}

inline Configuration decode_config(const TermPtr& term) {
    Configuration out;
    TermPtr t = term, head, tail;
    while (match_pair(t, head, tail)) {
        try {
            out.push_back(static_cast<int>(unchurch(head)));
        } catch (const NotANumeral&) {
            throw MalformedConfiguration("cell is not a state numeral: " + print_term(head));
        }
        t = tail;
    }
    if (!match_nil(t) || out.empty())
        throw MalformedConfiguration("not an encoded configuration: " + print_term(term));
    return out;
}

// ---------------------------------------------------------------------------
// Term emission.
// ---------------------------------------------------------------------------

namespace detail {

// IF (EQUAL s enc(0)) out[0] (IF (EQUAL s enc(1)) out[1] (... out[N-1]))
inline TermPtr select_by_state(const TermPtr& scrutinee, const std::vector<TermPtr>& outputs) {
    TermPtr acc = outputs.back();
    for (int j = static_cast<int>(outputs.size()) - 2; j >= 0; --j)
        acc = app(if_term(), app(equal_term(), scrutinee, church(j)), outputs[j], acc);
    return acc;
}

// FST (SND^i c)
inline TermPtr project_cell(const TermPtr& config, int i) {
    TermPtr t = config;
    for (int j = 0; j < i; ++j) t = app(snd_term(), t);
    return app(fst_term(), t);
}

// Lookup table state -> digit as a closed one-argument term.
inline TermPtr digit_table(int state_count, const std::vector<int>& digits) {
    std::vector<TermPtr> outputs;
    outputs.reserve(state_count);
    for (int q = 0; q < state_count; ++q) outputs.push_back(church(digits[q]));
    return abs("s", select_by_state(var("s"), outputs));
}

}  // namespace detail

// The permutation term P: decomposes every cell state into its (l, m, r)
// digits, takes the l-digit from the right neighbour and the r-digit from
// the left neighbour, and reassembles (l*n_m + m)*n_r + r with Church
// arithmetic. P enc(c) reduces to enc(sigma(c)).
inline TermPtr emit_sigma_term(const PqcaSpec& spec) {
    const int w = spec.width;
    const int n = spec.state_count();
    if (w == 1 || (spec.n_l == 1 && spec.n_r == 1))
        return abs("c", var("c"));  // sigma fixes every configuration

    std::vector<int> l_digits(n), m_digits(n), r_digits(n);
    for (int q = 0; q < n; ++q) {
        l_digits[q] = spec.l_of(q);
        m_digits[q] = spec.m_of(q);
        r_digits[q] = spec.r_of(q);
    }
    TermPtr l_table = detail::digit_table(n, l_digits);
    TermPtr m_table = detail::digit_table(n, m_digits);
    TermPtr r_table = detail::digit_table(n, r_digits);

    TermPtr c = var("c");
    TermPtr body = nil_term();
    for (int i = w - 1; i >= 0; --i) {
        TermPtr value;  // (l_{i+1} * n_m + m_i) * n_r + r_{i-1}
        if (spec.n_l > 1) value = app(l_table, detail::project_cell(c, (i + 1) % w));
        if (spec.n_m > 1) {
            TermPtr m_expr = app(m_table, detail::project_cell(c, i));
            value = value ? app(plus_term(), app(times_term(), value, church(spec.n_m)), m_expr)
                          : m_expr;
        }
        if (spec.n_r > 1) {
            TermPtr r_expr = app(r_table, detail::project_cell(c, (i - 1 + w) % w));
            value = value ? app(plus_term(), app(times_term(), value, church(spec.n_r)), r_expr)
                          : r_expr;
        }
        if (!value) value = church(0);
        body = app(pair_term(), value, body);
    }
    return abs("c", body);
}

namespace detail {

// Branch superpositions of the transition term for one source state: for
// every target state i with T[from][i] != 0, |T[from][i]| copies of
// wrap(enc(i)), negated when the entry is negative. Multiplicities are kept
// compressed.
template <typename Wrap>
inline TermPtr transition_branch(const std::vector<BigInt>& t_row, Wrap&& wrap) {
    std::vector<SupEntry> es;
    for (std::size_t to = 0; to < t_row.size(); ++to) {
        const BigInt& entry = t_row[to];
        if (entry == 0) continue;
        TermPtr item = wrap(static_cast<int>(to));
        if (entry < 0) item = Term::negation(item);
        es.push_back({item, entry < 0 ? -entry : entry});
    }
    return Term::superposition(std::move(es));
}

template <typename Wrap>
inline TermPtr transition_term_wrapped(const PqcaSpec& spec, const ScaledMatrix& scaled,
                                       Wrap&& wrap) {
    const int n = spec.state_count();
    std::vector<TermPtr> branches;
    branches.reserve(n);
    for (int from = 0; from < n; ++from)
        branches.push_back(transition_branch(scaled.t[from], wrap));
    if (n == 1) return abs("s", branches[0]);
    return abs("s", select_by_state(var("s"), branches));
}

}  // namespace detail

// The transition term Q: compares its argument against each state encoding
// and returns the matching column of T = b*Lambda as a superposition of
// state encodings with compressed multiplicities.
inline TermPtr emit_transition_term(const PqcaSpec& spec, const ScaledMatrix& scaled) {
    return detail::transition_term_wrapped(spec, scaled, [](int to) { return encode_state(to); });
}

// Continuation-passing variant used inside STEP: branches carry \k. k enc(i)
// so the produced superposition lands in operator position and distributes
// over the remaining per-cell chain instead of being swallowed by a pair
// constructor.
inline TermPtr emit_transition_cps(const PqcaSpec& spec, const ScaledMatrix& scaled) {
    return detail::transition_term_wrapped(
        spec, scaled, [](int to) { return abs("k", app(var("k"), encode_state(to))); });
}

// The full step term: apply P, then feed every cell of the permuted
// configuration through the transition term, chaining cells left to right
// through continuations that finally rebuild the configuration. Branch
// multiplicities multiply through the chain, so a basis configuration c
// reduces to the superposition { enc(e) : prod_i T[sigma(c)_i][e_i] }.
inline TermPtr emit_step_term(const PqcaSpec& spec, const ScaledMatrix& scaled) {
    const int w = spec.width;
    TermPtr qk = emit_transition_cps(spec, scaled);

    TermPtr build = nil_term();
    for (int i = w - 1; i >= 0; --i)
        build = app(pair_term(), var("v" + std::to_string(i)), build);

    TermPtr chain = build;
    for (int i = w - 1; i >= 0; --i)
        chain = app(app(qk, detail::project_cell(var("d"), i)),
                    abs("v" + std::to_string(i), chain));

    return abs("c", app(abs("d", chain), app(emit_sigma_term(spec), var("c"))));
}

// ACC enc(c) reduces to the Church boolean of
// (c[accept_cell] in accept_states).
inline TermPtr emit_accept_term(const PqcaSpec& spec) {
    const int n = spec.state_count();
    std::vector<TermPtr> outputs;
    outputs.reserve(n);
    for (int q = 0; q < n; ++q)
        outputs.push_back(spec.accept_states.count(q) ? true_term() : false_term());
    TermPtr sel = n == 1 ? abs("s", outputs[0])
                         : abs("s", detail::select_by_state(var("s"), outputs));
    return abs("c", app(sel, detail::project_cell(var("c"), spec.accept_cell)));
}

// Church-numeral iterator: ITER k STEP x nests k applications of STEP.
// Sound only for branch-free automata; the driver applies STEP per
// representative when superpositions are in play.
inline TermPtr emit_iter_term() {
    return abs("n", abs("f", abs("x", app(var("n"), var("f"), var("x")))));
}

// ---------------------------------------------------------------------------
// Compiled bundle and the driver pipeline.
// ---------------------------------------------------------------------------

struct CompiledAutomaton {
    PqcaSpec spec;
    ScaledMatrix scaled;
    TermPtr sigma_term;       // P
    TermPtr transition_term;  // Q
    TermPtr step_term;        // STEP
    TermPtr accept_term;      // ACC
    TermPtr iter_term;        // ITER
};

inline CompiledAutomaton compile(const PqcaSpec& spec, bool lcm_scaling = false) {
    CompiledAutomaton out;
    out.spec = spec;
    out.scaled = scale_matrix(spec.lambda, lcm_scaling);
    out.sigma_term = emit_sigma_term(spec);
    out.transition_term = emit_transition_term(spec, out.scaled);
    out.step_term = emit_step_term(spec, out.scaled);
    out.accept_term = emit_accept_term(spec);
    out.iter_term = emit_iter_term();
    return out;
}

enum class DecodeMode {
    Ledger,  // amplitude = n_i / (d * b^(width * steps))
    Paper,   // amplitude = n_i / sum_j n_j
};

// Recovers the exact rational state from a canonical superposition of
// encoded configurations.
inline SuperposedState decode_superposition(const CanonicalSuperposition& canon,
                                            const ScaleLedger& ledger,
                                            DecodeMode mode = DecodeMode::Ledger) {
    BigInt scale;
    if (mode == DecodeMode::Ledger) {
        scale = ledger.total_scale();
    } else {
        scale = canon.total_count();
        if (scale == 0)
            throw ZeroTotalCount("total branch count is zero; cannot normalize by sum");
    }
    SuperposedState out;
    for (const auto& e : canon.entries()) {
        Configuration config = decode_config(e.rep);
        Rational amp(e.net, scale);
        Rational& slot = out[config];
        slot += amp;
        if (slot == 0) out.erase(config);
    }
    return out;
}

struct CompiledRun {
    CanonicalSuperposition state;  // encoded configurations with net counts
    ScaleLedger ledger;
    long total_steps = 0;
    long total_work = 0;
    std::vector<long> steps_per_application;
    bool fuel_exhausted = false;
};

inline CompiledRun start_compiled(const CompiledAutomaton& compiled) {
    ScaledState scaled = scale_superposition(compiled.spec.initial);
    std::vector<std::pair<TermPtr, BigInt>> leaves;
    leaves.reserve(scaled.counts.size());
    for (const auto& [config, count] : scaled.counts)
        leaves.emplace_back(encode_config(config), count);
    CompiledRun run;
    run.state = CanonicalSuperposition::from_leaves(leaves);
    run.ledger = ScaleLedger{compiled.scaled.b, scaled.d, 0, compiled.spec.width};
    return run;
}

// One driver-applied compiled step: STEP is applied to every representative
// and the results reduce together so interference between branches settles
// within this application.
inline void compiled_step(const CompiledAutomaton& compiled, CompiledRun& run, long fuel) {
    std::vector<std::pair<TermPtr, BigInt>> leaves;
    leaves.reserve(run.state.size());
    for (const auto& e : run.state.entries())
        leaves.emplace_back(app(compiled.step_term, e.rep), e.net);
    CompressedResult r = reduce_compressed(CanonicalSuperposition::from_leaves(leaves), fuel);
    run.state = std::move(r.state);
    run.ledger.steps_applied += 1;
    run.total_steps += r.trace.steps;
    run.total_work += r.trace.work;
    run.steps_per_application.push_back(r.trace.steps);
    run.fuel_exhausted = run.fuel_exhausted || r.trace.fuel_exhausted;
}

inline CompiledRun run_compiled(const CompiledAutomaton& compiled, long k, long fuel) {
    CompiledRun run = start_compiled(compiled);
    for (long i = 0; i < k && !run.fuel_exhausted; ++i) compiled_step(compiled, run, fuel);
    return run;
}

// ---------------------------------------------------------------------------
// Compiled bundle manifest (text, one term per line).
// ---------------------------------------------------------------------------

struct Manifest {
    BigInt b = 1;
    BigInt d = 1;
    int width = 1;
    TermPtr sigma_term, transition_term, step_term, accept_term, iter_term;
};

inline std::string write_manifest(const CompiledAutomaton& compiled) {
    ScaledState scaled = scale_superposition(compiled.spec.initial);
    std::ostringstream out;
    out << "# compiled lambda-q bundle\n";
    out << "b = " << compiled.scaled.b.str() << "\n";
    out << "d = " << scaled.d.str() << "\n";
    out << "width = " << compiled.spec.width << "\n";
    out << "P = " << print_term(compiled.sigma_term) << "\n";
    out << "Q = " << print_term(compiled.transition_term) << "\n";
    out << "STEP = " << print_term(compiled.step_term) << "\n";
    out << "ACC = " << print_term(compiled.accept_term) << "\n";
    out << "ITER = " << print_term(compiled.iter_term) << "\n";
    return out.str();
}

inline Manifest read_manifest(const std::string& text) {
    Manifest m;
    bool saw_b = false, saw_d = false, saw_width = false;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            s.erase(0, s.find_first_not_of(" \t"));
            auto end = s.find_last_not_of(" \t\r");
            s.erase(end == std::string::npos ? 0 : end + 1);
        };
        trim(key);
        trim(value);
        if (key == "b") {
            m.b = BigInt(value);
            saw_b = true;
        } else if (key == "d") {
            m.d = BigInt(value);
            saw_d = true;
        } else if (key == "width") {
            m.width = std::stoi(value);
            saw_width = true;
        } else if (key == "P") {
            m.sigma_term = parse_term(value);
        } else if (key == "Q") {
            m.transition_term = parse_term(value);
        } else if (key == "STEP") {
            m.step_term = parse_term(value);
        } else if (key == "ACC") {
            m.accept_term = parse_term(value);
        } else if (key == "ITER") {
            m.iter_term = parse_term(value);
        } else {
            throw Error("manifest: unknown key '" + key + "'");
        }
    }
    if (!saw_b || !saw_d || !saw_width || !m.sigma_term || !m.transition_term || !m.step_term ||
        !m.accept_term)
        throw Error("manifest: missing required entries");
    return m;
}

}  // namespace lambdaq::compiler
