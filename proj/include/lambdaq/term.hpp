#pragma once

#include "lambdaq/numeric.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace lambdaq {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class TermKind { Variable, Abstraction, Application, Superposition, Negation };

class Term;
using TermPtr = std::shared_ptr<const Term>;
using NameSet = std::shared_ptr<const std::vector<std::string>>;  // sorted, unique

// One branch of a superposition. `count` is a positive multiplicity; a
// negative net count is expressed by wrapping the term in a negation.
struct SupEntry {
    TermPtr term;
    BigInt count;
};

namespace detail {

inline const NameSet& empty_names() {
    static const NameSet empty = std::make_shared<std::vector<std::string>>();
    return empty;
}

inline NameSet names_union(const NameSet& a, const NameSet& b) {
    if (a->empty()) return b;
    if (b->empty()) return a;
    auto out = std::make_shared<std::vector<std::string>>();
    out->reserve(a->size() + b->size());
    std::set_union(a->begin(), a->end(), b->begin(), b->end(), std::back_inserter(*out));
    return out;
}

inline NameSet names_without(const NameSet& a, const std::string& name) {
    if (!std::binary_search(a->begin(), a->end(), name)) return a;
    auto out = std::make_shared<std::vector<std::string>>();
    out->reserve(a->size() - 1);
    for (const auto& n : *a)
        if (n != name) out->push_back(n);
    if (out->empty()) return empty_names();
    return out;
}

inline std::uint64_t hash_mix(std::uint64_t acc, std::uint64_t v) {
    acc ^= v + 0x9e3779b97f4a7c15ULL + (acc << 6) + (acc >> 2);
    return acc;
}

inline std::uint64_t hash_bigint(const BigInt& n) {
    return static_cast<std::uint64_t>(n % BigInt("18446744073709551557"));
}

}  // namespace detail

// Immutable term of the calculus: variables, abstractions, applications,
// superpositions (with per-branch multiplicities) and negations. Nodes are
// shared freely; every field is set once at construction.
class Term {
public:
    TermKind kind;
    std::string name;               // Variable / Abstraction binder
    TermPtr child_a;                // Abstraction body, Application function, Negation inner
    TermPtr child_b;                // Application argument
    std::vector<SupEntry> entries;  // Superposition branches

    bool normal = true;           // no reduction rule applies anywhere inside
    std::size_t size = 1;         // node count
    std::uint64_t shash = 0;      // structural hash, variable names ignored
    NameSet free_vars = detail::empty_names();

    bool has_free(const std::string& n) const {
        return std::binary_search(free_vars->begin(), free_vars->end(), n);
    }
    bool closed() const { return free_vars->empty(); }

private:
    struct Private {};

public:
    explicit Term(Private) {}

    static TermPtr variable(std::string n) {
        auto t = std::make_shared<Term>(Private{});
        t->kind = TermKind::Variable;
        t->name = std::move(n);
        t->shash = 0x517cc1b727220a95ULL;
        auto fv = std::make_shared<std::vector<std::string>>();
        fv->push_back(t->name);
        t->free_vars = fv;
        return t;
    }

    static TermPtr abstraction(std::string binder, TermPtr body) {
        assert(!binder.empty());
        auto t = std::make_shared<Term>(Private{});
        t->kind = TermKind::Abstraction;
        t->name = std::move(binder);
        t->child_a = std::move(body);
        t->normal = t->child_a->normal;
        t->size = 1 + t->child_a->size;
        t->shash = detail::hash_mix(2, t->child_a->shash);
        t->free_vars = detail::names_without(t->child_a->free_vars, t->name);
        return t;
    }

    static TermPtr application(TermPtr fn, TermPtr arg) {
        auto t = std::make_shared<Term>(Private{});
        t->kind = TermKind::Application;
        t->child_a = std::move(fn);
        t->child_b = std::move(arg);
        const auto& f = *t->child_a;
        const auto& a = *t->child_b;
        bool root_redex = f.kind == TermKind::Abstraction || f.kind == TermKind::Superposition ||
                          f.kind == TermKind::Negation ||
                          (f.normal && a.kind == TermKind::Superposition);
        t->normal = !root_redex && f.normal && a.normal;
        t->size = 1 + f.size + a.size;
        t->shash = detail::hash_mix(detail::hash_mix(3, f.shash), a.shash);
        t->free_vars = detail::names_union(f.free_vars, a.free_vars);
        return t;
    }

    // Raw constructor: keeps whatever nesting the caller gives (the parser
    // needs faithful trees). Reduction-side code goes through make_* below.
    static TermPtr superposition(std::vector<SupEntry> es) {
        auto t = std::make_shared<Term>(Private{});
        t->kind = TermKind::Superposition;
        t->entries = std::move(es);
        NameSet fv = detail::empty_names();
        std::uint64_t h = 5;
        for (const auto& e : t->entries) {
            assert(e.count > 0);
            if (e.term->kind == TermKind::Superposition) t->normal = false;
            t->normal = t->normal && e.term->normal;
            t->size += e.term->size;
            h = detail::hash_mix(detail::hash_mix(h, e.term->shash), detail::hash_bigint(e.count));
            fv = detail::names_union(fv, e.term->free_vars);
        }
        t->shash = h;
        t->free_vars = fv;
        return t;
    }

    static TermPtr negation(TermPtr inner) {
        auto t = std::make_shared<Term>(Private{});
        t->kind = TermKind::Negation;
        t->child_a = std::move(inner);
        const auto& m = *t->child_a;
        bool root_redex = m.kind == TermKind::Negation || m.kind == TermKind::Superposition;
        t->normal = !root_redex && m.normal;
        t->size = 1 + m.size;
        t->shash = detail::hash_mix(7, m.shash);
        t->free_vars = m.free_vars;
        return t;
    }
};

inline TermPtr var(const std::string& n) { return Term::variable(n); }
inline TermPtr abs(const std::string& x, TermPtr body) { return Term::abstraction(x, std::move(body)); }
inline TermPtr app(TermPtr f, TermPtr a) { return Term::application(std::move(f), std::move(a)); }
inline TermPtr app(TermPtr f, TermPtr a, TermPtr b) {
    return app(app(std::move(f), std::move(a)), std::move(b));
}
inline TermPtr app(TermPtr f, TermPtr a, TermPtr b, TermPtr c) {
    return app(app(app(std::move(f), std::move(a)), std::move(b)), std::move(c));
}

// Negation with the canonicalization rules applied at the root:
// ~~M -> M and ~[M_i] -> [~M_i].
inline TermPtr make_negation(const TermPtr& inner) {
    if (inner->kind == TermKind::Negation) return inner->child_a;
    if (inner->kind == TermKind::Superposition) {
        std::vector<SupEntry> es;
        es.reserve(inner->entries.size());
        for (const auto& e : inner->entries) es.push_back({make_negation(e.term), e.count});
        return Term::superposition(std::move(es));
    }
    return Term::negation(inner);
}

// Superposition with directly nested superpositions spliced in
// (multiplicities multiply through).
inline TermPtr make_superposition(std::vector<SupEntry> es) {
    bool nested = false;
    for (const auto& e : es)
        if (e.term->kind == TermKind::Superposition) {
            nested = true;
            break;
        }
    if (!nested) return Term::superposition(std::move(es));
    std::vector<SupEntry> flat;
    for (auto& e : es) {
        if (e.term->kind == TermKind::Superposition) {
            for (const auto& sub : e.term->entries) flat.push_back({sub.term, e.count * sub.count});
        } else {
            flat.push_back(std::move(e));
        }
    }
    return make_superposition(std::move(flat));
}

// Applies the structural rules (~~M -> M, ~[..] -> [~..], nested
// superposition splicing) everywhere. These rewrites never count as
// reduction work; parsed terms pass through here before reduction.
inline TermPtr normalize_structure(const TermPtr& t) {
    switch (t->kind) {
        case TermKind::Variable:
            return t;
        case TermKind::Abstraction: {
            TermPtr b = normalize_structure(t->child_a);
            return b == t->child_a ? t : abs(t->name, b);
        }
        case TermKind::Application: {
            TermPtr f = normalize_structure(t->child_a);
            TermPtr a = normalize_structure(t->child_b);
            return (f == t->child_a && a == t->child_b) ? t : app(f, a);
        }
        case TermKind::Negation:
            return make_negation(normalize_structure(t->child_a));
        case TermKind::Superposition: {
            std::vector<SupEntry> es;
            es.reserve(t->entries.size());
            bool changed = false;
            for (const auto& e : t->entries) {
                TermPtr n = normalize_structure(e.term);
                changed = changed || n != e.term || n->kind == TermKind::Superposition;
                es.push_back({n, e.count});
            }
            if (!changed) return t;
            return make_superposition(std::move(es));
        }
    }
    return t;  // unreachable
}

// ---------------------------------------------------------------------------
// Alpha-equivalence: structural identity up to consistent bound-variable
// renaming. Superposition branches compare order-sensitively but runs of
// equal adjacent branches match regardless of how multiplicities split.
// ---------------------------------------------------------------------------

namespace detail {

using BinderStack = std::vector<const std::string*>;

inline bool alpha_eq_rec(const TermPtr& a, const TermPtr& b, BinderStack& ba, BinderStack& bb);

// The stacks always have equal depth (pushed in lockstep): the innermost
// binder hit must occur at the same distance on both sides.
inline bool alpha_eq_var(const std::string& na, const std::string& nb, const BinderStack& ba,
                         const BinderStack& bb) {
    for (std::size_t i = ba.size(); i-- > 0;) {
        bool hit_a = *ba[i] == na;
        bool hit_b = *bb[i] == nb;
        if (hit_a || hit_b) return hit_a && hit_b;
    }
    return na == nb;  // both free
}

inline bool alpha_eq_sup(const std::vector<SupEntry>& ea, const std::vector<SupEntry>& eb,
                         BinderStack& ba, BinderStack& bb) {
    std::size_t ia = 0, ib = 0;
    BigInt ra = 0, rb = 0;
    while (true) {
        if (ra == 0) {
            if (ia == ea.size()) break;
            ra = ea[ia].count;
        }
        if (rb == 0) {
            if (ib == eb.size()) return false;
            rb = eb[ib].count;
        }
        if (!alpha_eq_rec(ea[ia].term, eb[ib].term, ba, bb)) return false;
        BigInt take = ra < rb ? ra : rb;
        ra -= take;
        rb -= take;
        if (ra == 0) ++ia;
        if (rb == 0) ++ib;
    }
    return rb == 0 && ib == eb.size();
}

inline bool alpha_eq_rec(const TermPtr& a, const TermPtr& b, BinderStack& ba, BinderStack& bb) {
    if (a == b) {
        if (a->closed()) return true;
        bool same_env = true;
        for (std::size_t i = 0; i < ba.size() && same_env; ++i) same_env = *ba[i] == *bb[i];
        if (same_env) return true;
    }
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case TermKind::Variable:
            return alpha_eq_var(a->name, b->name, ba, bb);
        case TermKind::Abstraction: {
            ba.push_back(&a->name);
            bb.push_back(&b->name);
            bool r = alpha_eq_rec(a->child_a, b->child_a, ba, bb);
            ba.pop_back();
            bb.pop_back();
            return r;
        }
        case TermKind::Application:
            return alpha_eq_rec(a->child_a, b->child_a, ba, bb) &&
                   alpha_eq_rec(a->child_b, b->child_b, ba, bb);
        case TermKind::Negation:
            return alpha_eq_rec(a->child_a, b->child_a, ba, bb);
        case TermKind::Superposition:
            return alpha_eq_sup(a->entries, b->entries, ba, bb);
    }
    return false;  // unreachable
}

}  // namespace detail

inline bool alpha_eq(const TermPtr& a, const TermPtr& b) {
    if (a == b) return true;
    if (a->shash != b->shash) return false;
    if (*a->free_vars != *b->free_vars) return false;
    detail::BinderStack ba, bb;
    return detail::alpha_eq_rec(a, b, ba, bb);
}

// ---------------------------------------------------------------------------
// Canonical rendering: bound variables print as their binder distance
// (#0 innermost), free variables by name, superposition runs of equal
// branches merged. Equal keys <=> alpha-equivalent; the key ordering is the
// deterministic order of canonical superposition entries.
// ---------------------------------------------------------------------------

namespace detail {

inline void alpha_key_rec(const TermPtr& t, std::vector<const std::string*>& binders,
                          std::string& out) {
    switch (t->kind) {
        case TermKind::Variable: {
            for (std::size_t i = binders.size(); i-- > 0;) {
                if (*binders[i] == t->name) {
                    out += '#';
                    out += std::to_string(binders.size() - 1 - i);
                    return;
                }
            }
            out += t->name;
            return;
        }
        case TermKind::Abstraction:
            out += '\\';
            binders.push_back(&t->name);
            alpha_key_rec(t->child_a, binders, out);
            binders.pop_back();
            return;
        case TermKind::Application:
            out += '(';
            alpha_key_rec(t->child_a, binders, out);
            out += ' ';
            alpha_key_rec(t->child_b, binders, out);
            out += ')';
            return;
        case TermKind::Negation:
            out += '~';
            alpha_key_rec(t->child_a, binders, out);
            return;
        case TermKind::Superposition: {
            out += '[';
            std::string prev_key;
            BigInt run = 0;
            bool first = true;
            auto flush = [&] {
                if (run == 0) return;
                if (!first) out += ',';
                first = false;
                out += prev_key;
                out += ':';
                out += run.str();
            };
            for (const auto& e : t->entries) {
                std::string k;
                alpha_key_rec(e.term, binders, k);
                if (k == prev_key) {
                    run += e.count;
                } else {
                    flush();
                    prev_key = std::move(k);
                    run = e.count;
                }
            }
            flush();
            out += ']';
            return;
        }
    }
}

}  // namespace detail

inline std::string alpha_key(const TermPtr& t) {
    std::string out;
    out.reserve(t->size * 2);
    std::vector<const std::string*> binders;
    detail::alpha_key_rec(t, binders, out);
    return out;
}

// ---------------------------------------------------------------------------
// Capture-avoiding substitution. Distributes through superpositions and
// negations elementwise (with the structural rules applied on rebuild).
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fresh_name(const std::string& base, const TermPtr& a, const TermPtr& b,
                              const std::string& avoid) {
    for (int i = 1;; ++i) {
        std::string cand = base + std::to_string(i);
        if (cand != avoid && !a->has_free(cand) && !b->has_free(cand)) return cand;
    }
}

}  // namespace detail

inline TermPtr substitute(const TermPtr& body, const std::string& name, const TermPtr& value) {
    if (!body->has_free(name)) return body;
    switch (body->kind) {
        case TermKind::Variable:
            return value;  // has_free => body->name == name
        case TermKind::Abstraction: {
            // binder != name, else `name` would not be free here
            if (value->has_free(body->name)) {
                std::string fresh = detail::fresh_name(body->name, body->child_a, value, name);
                TermPtr renamed = substitute(body->child_a, body->name, var(fresh));
                return abs(fresh, substitute(renamed, name, value));
            }
            return abs(body->name, substitute(body->child_a, name, value));
        }
        case TermKind::Application:
            return app(substitute(body->child_a, name, value),
                       substitute(body->child_b, name, value));
        case TermKind::Negation:
            return make_negation(substitute(body->child_a, name, value));
        case TermKind::Superposition: {
            std::vector<SupEntry> es;
            es.reserve(body->entries.size());
            for (const auto& e : body->entries)
                es.push_back({substitute(e.term, name, value), e.count});
            return make_superposition(std::move(es));
        }
    }
    return body;  // unreachable
}

// ---------------------------------------------------------------------------
// Canonical alpha form for display/storage: binders renamed to x0, x1, ... in
// pre-order, stepping past names that would capture a free variable.
// ---------------------------------------------------------------------------

namespace detail {

inline TermPtr canonical_alpha_rec(const TermPtr& t, std::map<std::string, std::string>& env,
                                   int& counter) {
    switch (t->kind) {
        case TermKind::Variable: {
            auto it = env.find(t->name);
            return it == env.end() ? t : var(it->second);
        }
        case TermKind::Abstraction: {
            std::string cand = "x" + std::to_string(counter++);
            auto collides = [&](const std::string& c) {
                for (const auto& w : *t->child_a->free_vars) {
                    if (w == t->name) continue;
                    auto it = env.find(w);
                    if ((it == env.end() ? w : it->second) == c) return true;
                }
                return false;
            };
            while (collides(cand)) cand += '_';
            auto it = env.find(t->name);
            std::optional<std::string> saved;
            if (it != env.end()) saved = it->second;
            env[t->name] = cand;
            TermPtr b = canonical_alpha_rec(t->child_a, env, counter);
            if (saved)
                env[t->name] = *saved;
            else
                env.erase(t->name);
            return abs(cand, b);
        }
        case TermKind::Application: {
            TermPtr f = canonical_alpha_rec(t->child_a, env, counter);
            TermPtr a = canonical_alpha_rec(t->child_b, env, counter);
            return app(f, a);
        }
        case TermKind::Negation:
            return Term::negation(canonical_alpha_rec(t->child_a, env, counter));
        case TermKind::Superposition: {
            std::vector<SupEntry> es;
            es.reserve(t->entries.size());
            for (const auto& e : t->entries)
                es.push_back({canonical_alpha_rec(e.term, env, counter), e.count});
            return Term::superposition(std::move(es));
        }
    }
    return t;  // unreachable
}

}  // namespace detail

inline TermPtr canonical_alpha(const TermPtr& t) {
    std::map<std::string, std::string> env;
    int counter = 0;
    return detail::canonical_alpha_rec(t, env, counter);
}

// ---------------------------------------------------------------------------
// Pretty printer (inverse of the parser up to whitespace).
// ---------------------------------------------------------------------------

namespace detail {

inline void print_rec(const TermPtr& t, std::string& out, bool as_atom) {
    switch (t->kind) {
        case TermKind::Variable:
            out += t->name;
            return;
        case TermKind::Abstraction:
            if (as_atom) out += '(';
            out += '\\';
            out += t->name;
            out += ". ";
            print_rec(t->child_a, out, false);
            if (as_atom) out += ')';
            return;
        case TermKind::Application: {
            if (as_atom) out += '(';
            // function position admits a bare application chain but not a
            // bare abstraction
            const bool fn_atom = t->child_a->kind != TermKind::Application;
            print_rec(t->child_a, out, fn_atom);
            out += ' ';
            print_rec(t->child_b, out, true);
            if (as_atom) out += ')';
            return;
        }
        case TermKind::Negation:
            out += '~';
            print_rec(t->child_a, out, true);
            return;
        case TermKind::Superposition: {
            out += '[';
            bool first = true;
            for (const auto& e : t->entries) {
                if (!first) out += ", ";
                first = false;
                print_rec(e.term, out, false);
                if (e.count != 1) {
                    out += " : ";
                    out += e.count.str();
                }
            }
            out += ']';
            return;
        }
    }
}

}  // namespace detail

inline std::string print_term(const TermPtr& t) {
    std::string out;
    out.reserve(t->size * 3);
    detail::print_rec(t, out, false);
    return out;
}

// ---------------------------------------------------------------------------
// Canonical superpositions: distinct representatives with signed net counts.
// ---------------------------------------------------------------------------

struct CanonEntry {
    TermPtr rep;      // negation-free at top level, canonical alpha form
    std::string key;  // canonical rendering of rep, the ordering key
    BigInt net;       // nonzero signed multiplicity
};

class CanonicalSuperposition {
public:
    CanonicalSuperposition() = default;

    // Builds from (term, signed count) leaves: groups alpha-equivalent
    // terms, drops zero nets, orders by canonical key, stores canonical
    // alpha representatives.
    static CanonicalSuperposition from_leaves(
        const std::vector<std::pair<TermPtr, BigInt>>& leaves) {
        std::map<std::string, CanonEntry> grouped;
        for (const auto& [term, count] : leaves) {
            std::string key = alpha_key(term);
            auto it = grouped.find(key);
            if (it == grouped.end()) {
                grouped.emplace(key, CanonEntry{term, key, count});
            } else {
                it->second.net += count;
            }
        }
        CanonicalSuperposition out;
        for (auto& [key, entry] : grouped) {
            if (entry.net == 0) continue;
            entry.rep = canonical_alpha(entry.rep);
            out.entries_.push_back(std::move(entry));
        }
        return out;
    }

    const std::vector<CanonEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    BigInt total_count() const {
        BigInt n = 0;
        for (const auto& e : entries_) n += e.net;
        return n;
    }

    bool operator==(const CanonicalSuperposition& other) const {
        if (entries_.size() != other.entries_.size()) return false;
        for (std::size_t i = 0; i < entries_.size(); ++i)
            if (entries_[i].key != other.entries_[i].key || entries_[i].net != other.entries_[i].net)
                return false;
        return true;
    }
    bool operator!=(const CanonicalSuperposition& other) const { return !(*this == other); }

    // Superposition term with compressed multiplicities (order preserved).
    TermPtr expand_compressed() const {
        std::vector<SupEntry> es;
        es.reserve(entries_.size());
        for (const auto& e : entries_) {
            if (e.net > 0)
                es.push_back({e.rep, e.net});
            else
                es.push_back({Term::negation(e.rep), -e.net});
        }
        return Term::superposition(std::move(es));
    }

    // Superposition term with every copy written out (tests only; counts
    // must be small).
    TermPtr expand_literal() const {
        std::vector<SupEntry> es;
        for (const auto& e : entries_) {
            BigInt n = e.net > 0 ? e.net : -e.net;
            TermPtr item = e.net > 0 ? e.rep : Term::negation(e.rep);
            for (BigInt i = 0; i < n; ++i) es.push_back({item, 1});
        }
        return Term::superposition(std::move(es));
    }

private:
    std::vector<CanonEntry> entries_;
};

namespace detail {

inline void gather_leaves(const TermPtr& t, BigInt count,
                          std::vector<std::pair<TermPtr, BigInt>>& out) {
    switch (t->kind) {
        case TermKind::Superposition:
            for (const auto& e : t->entries) gather_leaves(e.term, count * e.count, out);
            return;
        case TermKind::Negation:
            gather_leaves(t->child_a, -count, out);
            return;
        default:
            out.emplace_back(t, count);
            return;
    }
}

}  // namespace detail

// Flattens nested superpositions and negations at the top, groups
// alpha-equivalent branches with net counts n_i = a_i - b_i, drops cancelled
// branches, and stores representatives in canonical alpha form. A term that
// is not a superposition counts as a singleton branch.
inline CanonicalSuperposition canonicalize(const TermPtr& t) {
    std::vector<std::pair<TermPtr, BigInt>> leaves;
    detail::gather_leaves(t, 1, leaves);
    return CanonicalSuperposition::from_leaves(leaves);
}

inline std::string to_string(const CanonicalSuperposition& c) {
    std::string out = "[";
    bool first = true;
    for (const auto& e : c.entries()) {
        if (!first) out += ", ";
        first = false;
        out += print_term(e.rep);
        out += " : ";
        out += e.net.str();
    }
    out += "]";
    return out;
}

}  // namespace lambdaq
