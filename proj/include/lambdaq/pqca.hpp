#pragma once

#include "lambdaq/numeric.hpp"

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace lambdaq::pqca {

struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Configuration = std::vector<int>;

// Sparse exact-amplitude state: only nonzero entries are stored, keyed in
// lexicographic configuration order.
using SuperposedState = std::map<Configuration, Rational>;

struct Matrix {
    std::vector<std::vector<Rational>> rows;

    int n() const { return static_cast<int>(rows.size()); }
    const Rational& at(int r, int c) const { return rows[r][c]; }

    static Matrix identity(int n) {
        Matrix m;
        m.rows.assign(n, std::vector<Rational>(n, Rational(0)));
        for (int i = 0; i < n; ++i) m.rows[i][i] = 1;
        return m;
    }

    Matrix transpose() const {
        Matrix m;
        int k = n();
        m.rows.assign(k, std::vector<Rational>(k, Rational(0)));
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c) m.rows[c][r] = rows[r][c];
        return m;
    }

    Matrix operator*(const Matrix& other) const {
        int k = n();
        Matrix m;
        m.rows.assign(k, std::vector<Rational>(k, Rational(0)));
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c) {
                Rational acc = 0;
                for (int j = 0; j < k; ++j) acc += rows[r][j] * other.rows[j][c];
                m.rows[r][c] = acc;
            }
        return m;
    }

    bool operator==(const Matrix& other) const { return rows == other.rows; }
};

// One-dimensional partitioned automaton on a cyclic lattice. Cell states
// factor as (l, m, r) sub-states with q = (l*n_m + m)*n_r + r; a step first
// shifts the l-components left and the r-components right (sigma), then
// applies the local transition matrix to every cell independently.
// lambda.at(from, to) is the amplitude sent from state `from` to state `to`.
struct PqcaSpec {
    int n_l = 1, n_m = 1, n_r = 1;
    int width = 1;
    Matrix lambda;
    std::set<int> accept_states;
    int accept_cell = 0;
    SuperposedState initial;

    int state_count() const { return n_l * n_m * n_r; }

    int compose(int l, int m, int r) const { return (l * n_m + m) * n_r + r; }
    int l_of(int q) const { return q / (n_m * n_r); }
    int m_of(int q) const { return (q / n_r) % n_m; }
    int r_of(int q) const { return q % n_r; }
};

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    bool unitary = false;
    bool ok() const { return errors.empty(); }
};

inline ValidationReport validate(const PqcaSpec& spec) {
    ValidationReport report;
    const int n = spec.state_count();
    if (spec.n_l < 1 || spec.n_m < 1 || spec.n_r < 1)
        report.errors.push_back("sublattice sizes must be positive");
    if (spec.width < 1) report.errors.push_back("width must be positive");
    if (spec.lambda.n() != n)
        report.errors.push_back("transition matrix must be " + std::to_string(n) + "x" +
                                std::to_string(n));
    for (const auto& row : spec.lambda.rows)
        if (static_cast<int>(row.size()) != spec.lambda.n())
            report.errors.push_back("transition matrix is not square");
    if (spec.accept_cell < 0 || spec.accept_cell >= spec.width)
        report.errors.push_back("acceptance cell out of range");
    for (int q : spec.accept_states)
        if (q < 0 || q >= n) report.errors.push_back("acceptance state out of range");
    for (const auto& [config, amp] : spec.initial) {
        if (static_cast<int>(config.size()) != spec.width)
            report.errors.push_back("initial configuration has wrong width");
        for (int q : config)
            if (q < 0 || q >= n) report.errors.push_back("initial configuration state out of range");
        if (amp == 0) report.errors.push_back("initial amplitude must be nonzero");
    }
    if (report.ok() && spec.lambda.n() == n) {
        report.unitary = (spec.lambda.transpose() * spec.lambda == Matrix::identity(n));
        if (!report.unitary) report.warnings.push_back("transition matrix is not unitary");
    }
    return report;
}

// Sub-state permutation: cell i receives the l-component of cell i+1 and the
// r-component of cell i-1 (cyclic). A bijection; sigma^width is the identity.
inline Configuration sigma(const Configuration& config, const PqcaSpec& spec) {
    const int w = spec.width;
    Configuration out(w);
    for (int i = 0; i < w; ++i) {
        int from_right = config[(i + 1) % w];
        int from_left = config[(i - 1 + w) % w];
        out[i] = spec.compose(spec.l_of(from_right), spec.m_of(config[i]), spec.r_of(from_left));
    }
    return out;
}

namespace detail {

inline void scatter_cell(const PqcaSpec& spec, const Configuration& source, Configuration& target,
                         int cell, const Rational& amp, SuperposedState& out) {
    if (cell == spec.width) {
        Rational& slot = out[target];
        slot += amp;
        if (slot == 0) out.erase(target);
        return;
    }
    const int from = source[cell];
    for (int to = 0; to < spec.state_count(); ++to) {
        const Rational& entry = spec.lambda.at(from, to);
        if (entry == 0) continue;
        target[cell] = to;
        scatter_cell(spec, source, target, cell + 1, amp * entry, out);
    }
}

}  // namespace detail

// One automaton step: apply sigma to every configuration, then the local
// matrix to every cell, summing contributions exactly.
inline SuperposedState step(const SuperposedState& state, const PqcaSpec& spec) {
    SuperposedState out;
    for (const auto& [config, amp] : state) {
        Configuration permuted = sigma(config, spec);
        Configuration target(spec.width, 0);
        detail::scatter_cell(spec, permuted, target, 0, amp, out);
    }
    return out;
}

inline SuperposedState run(const PqcaSpec& spec, SuperposedState state, long steps) {
    for (long i = 0; i < steps; ++i) state = step(state, spec);
    return state;
}

inline Rational norm_squared(const SuperposedState& state) {
    Rational acc = 0;
    for (const auto& [config, amp] : state) acc += amp * amp;
    return acc;
}

inline Rational acceptance_probability(const SuperposedState& state, const PqcaSpec& spec) {
    Rational acc = 0;
    for (const auto& [config, amp] : state)
        if (spec.accept_states.count(config[spec.accept_cell])) acc += amp * amp;
    return acc;
}

// ---------------------------------------------------------------------------
// Dense global matrix oracle over all N^width configurations.
// ---------------------------------------------------------------------------

inline long config_space_size(const PqcaSpec& spec) {
    long total = 1;
    for (int i = 0; i < spec.width; ++i) {
        total *= spec.state_count();
        if (total > (1L << 40)) return total;  // enough to trip any sane bound
    }
    return total;
}

inline long config_index(const Configuration& config, const PqcaSpec& spec) {
    long idx = 0;
    for (int q : config) idx = idx * spec.state_count() + q;
    return idx;
}

inline Configuration index_config(long idx, const PqcaSpec& spec) {
    Configuration config(spec.width);
    for (int i = spec.width - 1; i >= 0; --i) {
        config[i] = static_cast<int>(idx % spec.state_count());
        idx /= spec.state_count();
    }
    return config;
}

// G.at(source, target) = product over cells of lambda[sigma(source)_i, target_i].
// Applying a step to an amplitude vector v gives v'[e] = sum_c v[c] G[c][e].
struct GlobalMatrix {
    std::vector<std::vector<Rational>> rows;  // indexed [source][target]
};

inline GlobalMatrix global_matrix(const PqcaSpec& spec, long max_dim = 4096) {
    long dim = config_space_size(spec);
    if (dim > max_dim)
        throw SpecError("configuration space too large for the dense oracle (" +
                        std::to_string(dim) + " > " + std::to_string(max_dim) + ")");
    GlobalMatrix g;
    g.rows.assign(dim, std::vector<Rational>(dim, Rational(0)));
    for (long c = 0; c < dim; ++c) {
        Configuration source = sigma(index_config(c, spec), spec);
        for (long e = 0; e < dim; ++e) {
            Configuration target = index_config(e, spec);
            Rational prod = 1;
            for (int i = 0; i < spec.width && prod != 0; ++i)
                prod *= spec.lambda.at(source[i], target[i]);
            g.rows[c][e] = prod;
        }
    }
    return g;
}

inline SuperposedState apply_global(const GlobalMatrix& g, const SuperposedState& state,
                                    const PqcaSpec& spec) {
    SuperposedState out;
    long dim = static_cast<long>(g.rows.size());
    for (long e = 0; e < dim; ++e) {
        Rational acc = 0;
        for (const auto& [config, amp] : state) acc += amp * g.rows[config_index(config, spec)][e];
        if (acc != 0) out[index_config(e, spec)] = acc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Spec file format (line oriented, '#' comments):
//   sublattices <n_l> <n_m> <n_r>
//   width <w>
//   row <i> <p/q> ...                     N entries, N rows total
//   accept states <i> <j> ...
//   accept cell <i>
//   init <cell0> ... <cell_{w-1}>         basis configuration, or
//   init amp <p/q> <cell0> ...            repeated lines for a superposition
// ---------------------------------------------------------------------------

inline PqcaSpec parse_spec(const std::string& text) {
    PqcaSpec spec;
    std::map<int, std::vector<Rational>> rows;
    bool saw_sublattices = false, saw_width = false;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw SpecError("spec line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        if (word == "sublattices") {
            if (!(ls >> spec.n_l >> spec.n_m >> spec.n_r)) fail("expected three sublattice sizes");
            saw_sublattices = true;
        } else if (word == "width") {
            if (!(ls >> spec.width)) fail("expected a width");
            saw_width = true;
        } else if (word == "row") {
            int idx;
            if (!(ls >> idx)) fail("expected a row index");
            std::vector<Rational> row;
            std::string tok;
            while (ls >> tok) row.push_back(parse_rational(tok));
            if (!rows.emplace(idx, std::move(row)).second) fail("duplicate row");
        } else if (word == "accept") {
            std::string what;
            if (!(ls >> what)) fail("expected 'states' or 'cell'");
            if (what == "states") {
                int q;
                while (ls >> q) spec.accept_states.insert(q);
            } else if (what == "cell") {
                if (!(ls >> spec.accept_cell)) fail("expected a cell index");
            } else {
                fail("expected 'states' or 'cell'");
            }
        } else if (word == "init") {
            std::string tok;
            if (!(ls >> tok)) fail("expected configuration");
            Rational amp = 1;
            if (tok == "amp") {
                if (!(ls >> tok)) fail("expected amplitude");
                amp = parse_rational(tok);
                if (!(ls >> tok)) fail("expected configuration");
            }
            Configuration config;
            config.push_back(std::stoi(tok));
            int q;
            while (ls >> q) config.push_back(q);
            Rational& slot = spec.initial[config];
            slot += amp;
            if (slot == 0) spec.initial.erase(config);
        } else {
            fail("unknown directive '" + word + "'");
        }
    }
    if (!saw_sublattices) throw SpecError("spec missing 'sublattices'");
    if (!saw_width) throw SpecError("spec missing 'width'");
    const int n = spec.state_count();
    spec.lambda.rows.assign(n, {});
    for (int i = 0; i < n; ++i) {
        auto it = rows.find(i);
        if (it == rows.end()) throw SpecError("spec missing row " + std::to_string(i));
        if (static_cast<int>(it->second.size()) != n)
            throw SpecError("row " + std::to_string(i) + " must have " + std::to_string(n) +
                            " entries");
        spec.lambda.rows[i] = it->second;
    }
    for (const auto& [idx, row] : rows)
        if (idx < 0 || idx >= n) throw SpecError("row index " + std::to_string(idx) + " out of range");
    if (spec.initial.empty()) {
        // default initial state: every cell in state 0
        spec.initial[Configuration(spec.width, 0)] = 1;
    }
    return spec;
}

inline std::string config_to_string(const Configuration& config) {
    std::string out = "[";
    for (std::size_t i = 0; i < config.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(config[i]);
    }
    out += "]";
    return out;
}

}  // namespace lambdaq::pqca
