#pragma once

#include "lambdaq/reduce.hpp"
#include "lambdaq/term.hpp"

#include <string>
#include <vector>

namespace lambdaq {

struct NotANumeral : Error {
    using Error::Error;
};

// Church numeral \f.\x. f^n x.
inline TermPtr church(unsigned long n) {
    TermPtr body = var("x");
    for (unsigned long i = 0; i < n; ++i) body = app(var("f"), body);
    return abs("f", abs("x", body));
}

// Reads back a term already in normal form; throws NotANumeral when the
// shape does not match \f.\x. f^n x (up to renaming).
inline unsigned long unchurch(const TermPtr& term) {
    if (term->kind != TermKind::Abstraction || term->child_a->kind != TermKind::Abstraction)
        throw NotANumeral("not a Church numeral: " + print_term(term));
    const std::string& f = term->name;
    const std::string& x = term->child_a->name;
    if (f == x) throw NotANumeral("not a Church numeral: shadowed binder");
    TermPtr body = term->child_a->child_a;
    unsigned long n = 0;
    while (body->kind == TermKind::Application) {
        const TermPtr& fn = body->child_a;
        if (fn->kind != TermKind::Variable || fn->name != f)
            throw NotANumeral("not a Church numeral: " + print_term(term));
        ++n;
        body = body->child_b;
    }
    if (body->kind != TermKind::Variable || body->name != x)
        throw NotANumeral("not a Church numeral: " + print_term(term));
    return n;
}

inline TermPtr true_term() { return abs("a", abs("b", var("a"))); }
inline TermPtr false_term() { return abs("a", abs("b", var("b"))); }

// Reads back a normal-form Church boolean.
inline bool unbool(const TermPtr& term) {
    if (alpha_eq(term, true_term())) return true;
    if (alpha_eq(term, false_term())) return false;
    throw Error("not a Church boolean: " + print_term(term));
}

inline TermPtr if_term() {
    return abs("p", abs("a", abs("b", app(var("p"), var("a"), var("b")))));
}

// Arithmetic pieces used by EQUAL. All reduce to exact numeral shape under
// normal-order reduction.
inline TermPtr succ_term() {
    return abs("n", abs("f", abs("x", app(var("f"), app(var("n"), var("f"), var("x"))))));
}

inline TermPtr plus_term() {
    return abs("m",
               abs("n", abs("f", abs("x", app(var("m"), var("f"),
                                              app(var("n"), var("f"), var("x")))))));
}

inline TermPtr times_term() {
    return abs("m", abs("n", abs("f", abs("x", app(var("m"), app(var("n"), var("f")),
                                                   var("x"))))));
}

inline TermPtr pred_term() {
    // \n.\f.\x. n (\g.\h. h (g f)) (\u. x) (\u. u)
    TermPtr inner = abs("g", abs("h", app(var("h"), app(var("g"), var("f")))));
    return abs("n", abs("f", abs("x", app(app(var("n"), inner), abs("u", var("x")),
                                          abs("u", var("u"))))));
}

inline TermPtr sub_term() {  // truncated subtraction m - n
    return abs("m", abs("n", app(var("n"), pred_term(), var("m"))));
}

inline TermPtr iszero_term() {
    return abs("n", app(var("n"), abs("z", false_term()), true_term()));
}

inline TermPtr and_term() {
    return abs("p", abs("q", app(var("p"), var("q"), false_term())));
}

inline TermPtr leq_term() {
    return abs("m", abs("n", app(iszero_term(), app(sub_term(), var("m"), var("n")))));
}

// Structural equality on Church numerals via two truncated subtractions.
inline TermPtr equal_term() {
    return abs("m", abs("n", app(and_term(), app(leq_term(), var("m"), var("n")),
                                 app(leq_term(), var("n"), var("m")))));
}

// Pairs and nil/cons lists over them. nil is the identity, which no pair
// value can be mistaken for.
inline TermPtr pair_term() {
    return abs("a", abs("b", abs("s", app(var("s"), var("a"), var("b")))));
}
inline TermPtr fst_term() { return abs("p", app(var("p"), true_term())); }
inline TermPtr snd_term() { return abs("p", app(var("p"), false_term())); }
inline TermPtr nil_term() { return abs("u", var("u")); }

// Pair value in normal form: \s. s a b.
inline TermPtr pair_value(const TermPtr& a, const TermPtr& b) {
    return abs("s", app(var("s"), a, b));
}

// List of terms as a normal-form pair chain ending in nil.
inline TermPtr list_value(const std::vector<TermPtr>& items) {
    TermPtr t = nil_term();
    for (auto it = items.rbegin(); it != items.rend(); ++it) t = pair_value(*it, t);
    return t;
}

// Matches the normal-form pair shape \s. s A B.
inline bool match_pair(const TermPtr& t, TermPtr& first, TermPtr& second) {
    if (t->kind != TermKind::Abstraction) return false;
    const std::string& s = t->name;
    const TermPtr& body = t->child_a;
    if (body->kind != TermKind::Application) return false;
    const TermPtr& inner = body->child_a;
    if (inner->kind != TermKind::Application) return false;
    if (inner->child_a->kind != TermKind::Variable || inner->child_a->name != s) return false;
    if (inner->child_b->has_free(s) || body->child_b->has_free(s)) return false;
    first = inner->child_b;
    second = body->child_b;
    return true;
}

inline bool match_nil(const TermPtr& t) { return alpha_eq(t, nil_term()); }

// Reads back a normal-form pair-chain list of numerals.
inline std::vector<unsigned long> unlist_numerals(TermPtr t) {
    std::vector<unsigned long> out;
    TermPtr head, tail;
    while (match_pair(t, head, tail)) {
        out.push_back(unchurch(head));
        t = tail;
    }
    if (!match_nil(t)) throw Error("not a numeral list: " + print_term(t));
    return out;
}

}  // namespace lambdaq
