#pragma once

#include "lambdaq/term.hpp"

#include <optional>
#include <unordered_map>
#include <utility>

namespace lambdaq {

// Outcome of one parallel reduction step.
struct StepOutcome {
    TermPtr term;
    long contractions = 0;  // redexes contracted in this step
};

struct ReductionTrace {
    long steps = 0;  // parallel steps taken
    long work = 0;   // total redex contractions across all steps
    TermPtr final;   // canonicalized at top level when it is a superposition
    bool fuel_exhausted = false;
};

namespace detail {

// One parallel step. Outside superpositions the leftmost-outermost redex
// contracts; at every superposition, each reducible branch contracts its own
// leftmost-outermost redex simultaneously. Redexes:
//   beta               (\x.M) N -> M[x:=N]
//   distribution       [M_i] N  -> [M_i N]
//   sign lifting       (~M) N   -> ~(M N)
//   arg. distribution  M [N_i]  -> [M N_i]   (M normal, not an abstraction)
// The structural rules (~~M, ~[..], nested superpositions) are applied for
// free while rebuilding, mirroring canonicalize. Input must be structurally
// normalized; stepping preserves that.
inline std::optional<StepOutcome> parallel_step_rec(const TermPtr& t) {
    if (t->normal) return std::nullopt;
    switch (t->kind) {
        case TermKind::Variable:
            return std::nullopt;
        case TermKind::Abstraction: {
            auto r = parallel_step_rec(t->child_a);
            if (!r) return std::nullopt;
            return StepOutcome{abs(t->name, r->term), r->contractions};
        }
        case TermKind::Negation: {
            auto r = parallel_step_rec(t->child_a);
            if (!r) return std::nullopt;
            return StepOutcome{make_negation(r->term), r->contractions};
        }
        case TermKind::Superposition: {
            long work = 0;
            std::vector<SupEntry> es;
            es.reserve(t->entries.size());
            bool changed = false;
            for (const auto& e : t->entries) {
                auto r = parallel_step_rec(e.term);
                if (r) {
                    es.push_back({r->term, e.count});
                    work += r->contractions;
                    changed = true;
                } else {
                    es.push_back(e);
                }
            }
            if (!changed) return std::nullopt;
            return StepOutcome{make_superposition(std::move(es)), work};
        }
        case TermKind::Application: {
            const TermPtr& f = t->child_a;
            const TermPtr& a = t->child_b;
            if (f->kind == TermKind::Abstraction)
                return StepOutcome{substitute(f->child_a, f->name, a), 1};
            if (f->kind == TermKind::Superposition) {
                std::vector<SupEntry> es;
                es.reserve(f->entries.size());
                for (const auto& e : f->entries) es.push_back({app(e.term, a), e.count});
                return StepOutcome{make_superposition(std::move(es)), 1};
            }
            if (f->kind == TermKind::Negation)
                return StepOutcome{Term::negation(app(f->child_a, a)), 1};
            if (!f->normal) {
                auto r = parallel_step_rec(f);
                return StepOutcome{app(r->term, a), r->contractions};
            }
            if (a->kind == TermKind::Superposition) {
                std::vector<SupEntry> es;
                es.reserve(a->entries.size());
                for (const auto& e : a->entries) es.push_back({app(f, e.term), e.count});
                return StepOutcome{make_superposition(std::move(es)), 1};
            }
            auto r = parallel_step_rec(a);
            return StepOutcome{app(f, r->term), r->contractions};
        }
    }
    return std::nullopt;  // unreachable
}

}  // namespace detail

// One parallel step; nullopt when the term is in normal form.
inline std::optional<StepOutcome> step(const TermPtr& term) {
    TermPtr t = normalize_structure(term);
    auto r = detail::parallel_step_rec(t);
    if (!r && t != term) return StepOutcome{t, 0};  // structural cleanup only
    return r;
}

// Iterated parallel reduction with a fuel bound on parallel steps.
inline ReductionTrace reduce(const TermPtr& term, long fuel) {
    ReductionTrace trace;
    TermPtr t = normalize_structure(term);
    while (!t->normal) {
        if (trace.steps >= fuel) {
            trace.fuel_exhausted = true;
            break;
        }
        auto r = detail::parallel_step_rec(t);
        if (!r) break;
        t = r->term;
        ++trace.steps;
        trace.work += r->contractions;
    }
    if (t->kind == TermKind::Superposition) t = canonicalize(t).expand_compressed();
    trace.final = t;
    return trace;
}

// ---------------------------------------------------------------------------
// Compressed reduction: the state is a canonical superposition; each distinct
// representative steps once per parallel step with its net count carried
// through, and the state re-merges (interference included) after every step.
// Agrees step-for-step with literal expansion + reduce + canonicalize.
// ---------------------------------------------------------------------------

struct CompressedResult {
    CanonicalSuperposition state;
    ReductionTrace trace;  // trace.final is the compressed expansion
};

namespace detail {

using SignedLeaf = std::pair<TermPtr, BigInt>;

// Merges alpha-equivalent leaves (hash-bucketed), drops zero nets, keeps
// first-appearance order. Used for the intermediate states of compressed
// reduction; the public canonical ordering is applied at the boundary.
inline std::vector<SignedLeaf> merge_leaves(const std::vector<SignedLeaf>& leaves) {
    std::vector<SignedLeaf> items;
    items.reserve(leaves.size());
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
    for (const auto& [t, n] : leaves) {
        auto& idxs = buckets[t->shash];
        bool merged = false;
        for (std::size_t i : idxs)
            if (alpha_eq(items[i].first, t)) {
                items[i].second += n;
                merged = true;
                break;
            }
        if (!merged) {
            items.emplace_back(t, n);
            idxs.push_back(items.size() - 1);
        }
    }
    std::vector<SignedLeaf> out;
    out.reserve(items.size());
    for (auto& it : items)
        if (it.second != 0) out.push_back(std::move(it));
    return out;
}

}  // namespace detail

// Splits terms that carry a top-level superposition or negation into signed
// leaves, scaling multiplicities through.
inline std::vector<std::pair<TermPtr, BigInt>> expand_to_leaves(
    const std::vector<std::pair<TermPtr, BigInt>>& terms) {
    std::vector<std::pair<TermPtr, BigInt>> leaves;
    leaves.reserve(terms.size());
    for (const auto& [t, n] : terms) detail::gather_leaves(t, n, leaves);
    return leaves;
}

inline CompressedResult reduce_compressed(const CanonicalSuperposition& input, long fuel) {
    std::vector<detail::SignedLeaf> seed;
    seed.reserve(input.size());
    for (const auto& e : input.entries()) seed.emplace_back(normalize_structure(e.rep), e.net);
    std::vector<detail::SignedLeaf> items = detail::merge_leaves(expand_to_leaves(seed));

    CompressedResult out;
    while (true) {
        bool all_normal = true;
        for (const auto& [t, n] : items)
            if (!t->normal) {
                all_normal = false;
                break;
            }
        if (all_normal) break;
        if (out.trace.steps >= fuel) {
            out.trace.fuel_exhausted = true;
            break;
        }
        std::vector<detail::SignedLeaf> next;
        next.reserve(items.size());
        for (const auto& [t, n] : items) {
            if (t->normal) {
                next.emplace_back(t, n);
                continue;
            }
            auto r = detail::parallel_step_rec(t);
            out.trace.work += r->contractions;
            next.emplace_back(r->term, n);
        }
        ++out.trace.steps;
        items = detail::merge_leaves(expand_to_leaves(next));
    }
    out.state = CanonicalSuperposition::from_leaves(items);
    out.trace.final = out.state.expand_compressed();
    return out;
}

}  // namespace lambdaq
