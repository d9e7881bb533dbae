#include "lambdaq/parser.hpp"
#include "lambdaq/term.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace lambdaq;

TEST_CASE("parser builds the expected trees") {
    auto id = parse_term("\\x. x");
    REQUIRE(id->kind == TermKind::Abstraction);
    REQUIRE(id->name == "x");
    REQUIRE(id->child_a->kind == TermKind::Variable);

    auto sup = parse_term("[a, ~a]");
    REQUIRE(sup->kind == TermKind::Superposition);
    REQUIRE(sup->entries.size() == 2);
    REQUIRE(sup->entries[0].term->kind == TermKind::Variable);
    REQUIRE(sup->entries[1].term->kind == TermKind::Negation);
    REQUIRE(sup->entries[1].term->child_a->name == "a");

    auto redex = parse_term("(\\x. x x) y");
    REQUIRE(redex->kind == TermKind::Application);
    REQUIRE(redex->child_a->kind == TermKind::Abstraction);
    REQUIRE(redex->child_b->name == "y");

    // application is left-associative
    auto chain = parse_term("a b c");
    REQUIRE(chain->child_a->kind == TermKind::Application);
    REQUIRE(chain->child_b->name == "c");

    // '~' binds one atom
    auto neg_app = parse_term("~a b");
    REQUIRE(neg_app->kind == TermKind::Application);
    REQUIRE(neg_app->child_a->kind == TermKind::Negation);

    // comments and whitespace
    auto commented = parse_term("# leading comment\n \\x. x # trailing\n");
    REQUIRE(alpha_eq(commented, id));
}

TEST_CASE("parser accepts compressed multiplicities and the empty superposition") {
    auto counted = parse_term("[a : 2, b]");
    REQUIRE(counted->entries.size() == 2);
    REQUIRE(counted->entries[0].count == 2);
    REQUIRE(counted->entries[1].count == 1);
    REQUIRE(print_term(counted) == "[a : 2, b]");

    auto empty = parse_term("[]");
    REQUIRE(empty->kind == TermKind::Superposition);
    REQUIRE(empty->entries.empty());
    REQUIRE(print_term(empty) == "[]");

    auto big = parse_term("[a : 152587890625]");
    REQUIRE(big->entries[0].count == BigInt("152587890625"));
}

TEST_CASE("parse errors carry line and column") {
    try {
        parse_term("\\x.\n (y");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        REQUIRE(e.line == 2);
        REQUIRE(std::string(e.what()).find("parse error") != std::string::npos);
    }
    REQUIRE_THROWS_AS(parse_term(""), ParseError);
    REQUIRE_THROWS_AS(parse_term("\\. x"), ParseError);
    REQUIRE_THROWS_AS(parse_term("[a : 0]"), ParseError);
    REQUIRE_THROWS_AS(parse_term("a )"), ParseError);
    // free variables are not errors
    REQUIRE_NOTHROW(parse_term("free_name another"));
}

namespace {

TermPtr random_raw_term(std::mt19937_64& rng, int depth) {
    static const char* names[] = {"a", "b", "c", "x", "y"};
    auto name = [&] { return std::string(names[rng() % 5]); };
    if (depth <= 0) return var(name());
    switch (rng() % 6) {
        case 0:
        case 1:
            return var(name());
        case 2:
            return abs(name(), random_raw_term(rng, depth - 1));
        case 3:
            return app(random_raw_term(rng, depth - 1), random_raw_term(rng, depth - 1));
        case 4:
            return Term::negation(random_raw_term(rng, depth - 1));
        default: {
            std::vector<SupEntry> es;
            std::size_t n = 1 + rng() % 3;
            for (std::size_t i = 0; i < n; ++i)
                es.push_back({random_raw_term(rng, depth - 1), BigInt(1 + rng() % 3)});
            return Term::superposition(std::move(es));
        }
    }
}

}  // namespace

TEST_CASE("pretty-print and parse are mutually inverse") {
    std::mt19937_64 rng(31337);
    for (int i = 0; i < 300; ++i) {
        TermPtr t = random_raw_term(rng, 5);
        std::string printed = print_term(t);
        TermPtr back = parse_term(printed);
        REQUIRE(print_term(back) == printed);
        REQUIRE(alpha_eq(back, t));
    }
}

TEST_CASE("alpha equivalence") {
    REQUIRE(alpha_eq(parse_term("\\x. x"), parse_term("\\y. y")));
    REQUIRE_FALSE(alpha_eq(parse_term("\\x. x"), parse_term("\\x. x x")));
    REQUIRE_FALSE(alpha_eq(parse_term("x"), parse_term("y")));  // free names count
    REQUIRE(alpha_eq(parse_term("\\f. \\x. f (f x)"), parse_term("\\g. \\y. g (g y)")));
    // order-sensitive on superpositions
    REQUIRE_FALSE(alpha_eq(parse_term("[a, b]"), parse_term("[b, a]")));
    // multiplicity syntax is sugar for repetition
    REQUIRE(alpha_eq(parse_term("[a, a]"), parse_term("[a : 2]")));
    REQUIRE(alpha_eq(parse_term("[a, a, b]"), parse_term("[a : 2, b]")));
    REQUIRE_FALSE(alpha_eq(parse_term("[a : 2, b]"), parse_term("[a, b, a]")));
    // binder shadowing
    REQUIRE(alpha_eq(parse_term("\\x. \\x. x"), parse_term("\\y. \\z. z")));
    REQUIRE_FALSE(alpha_eq(parse_term("\\x. \\x. x"), parse_term("\\y. \\z. y")));
}

TEST_CASE("substitution") {
    SECTION("direct hit") {
        auto out = substitute(var("x"), "x", parse_term("\\y. y"));
        REQUIRE(alpha_eq(out, parse_term("\\y. y")));
    }
    SECTION("capture avoidance renames the binder") {
        auto out = substitute(parse_term("\\x. x z"), "z", var("x"));
        REQUIRE(alpha_eq(out, parse_term("\\w. w x")));
        REQUIRE(out->name != "x");
    }
    SECTION("distributes through superpositions and negations") {
        auto out = substitute(parse_term("[x, ~x]"), "x", var("n"));
        REQUIRE(alpha_eq(out, parse_term("[n, ~n]")));
    }
    SECTION("shadowed binder blocks substitution") {
        auto out = substitute(parse_term("\\x. x"), "x", var("y"));
        REQUIRE(alpha_eq(out, parse_term("\\x. x")));
    }
    SECTION("no-op when the name is not free") {
        auto t = parse_term("\\a. a b");
        REQUIRE(substitute(t, "zz", var("q")) == t);
    }
}

TEST_CASE("canonicalize groups, cancels and orders") {
    SECTION("net counts n = a - b") {
        auto c = canonicalize(parse_term("[m, m, ~m]"));
        REQUIRE(c.size() == 1);
        REQUIRE(c.entries()[0].net == 1);
        REQUIRE(alpha_eq(c.entries()[0].rep, var("m")));
    }
    SECTION("full interference") {
        auto c = canonicalize(parse_term("[m, ~m]"));
        REQUIRE(c.empty());
    }
    SECTION("grouping of repeated Church numerals") {
        // six copies of numeral 1 and three copies of numeral 2
        std::vector<SupEntry> es;
        for (int i = 0; i < 6; ++i) es.push_back({parse_term("\\f. \\x. f x"), 1});
        for (int i = 0; i < 3; ++i) es.push_back({parse_term("\\f. \\x. f (f x)"), 1});
        auto c = canonicalize(Term::superposition(std::move(es)));
        REQUIRE(c.size() == 2);
        REQUIRE(alpha_eq(c.entries()[0].rep, parse_term("\\f. \\x. f x")));
        REQUIRE(c.entries()[0].net == 6);
        REQUIRE(alpha_eq(c.entries()[1].rep, parse_term("\\f. \\x. f (f x)")));
        REQUIRE(c.entries()[1].net == 3);
    }
    SECTION("non-superposition is a singleton") {
        auto c = canonicalize(parse_term("\\x. x"));
        REQUIRE(c.size() == 1);
        REQUIRE(c.entries()[0].net == 1);
    }
    SECTION("nested superpositions flatten with multiplied counts") {
        auto c = canonicalize(parse_term("[[a : 2] : 3, b]"));
        REQUIRE(c.size() == 2);
        REQUIRE(c.entries()[0].net == 6);
    }
}

TEST_CASE("canonicalize properties over random terms") {
    std::mt19937_64 rng(4242);
    for (int i = 0; i < 200; ++i) {
        TermPtr m = random_raw_term(rng, 4);

        // involution: [~~M] ~ [M]
        auto douneg = Term::superposition({{Term::negation(Term::negation(m)), 1}});
        REQUIRE(canonicalize(douneg) == canonicalize(Term::superposition({{m, 1}})));

        // annihilation: k copies of M against k copies of ~M
        int k = 1 + static_cast<int>(rng() % 4);
        std::vector<SupEntry> es;
        for (int j = 0; j < k; ++j) es.push_back({m, 1});
        for (int j = 0; j < k; ++j) es.push_back({Term::negation(m), 1});
        REQUIRE(canonicalize(Term::superposition(std::move(es))).empty());
    }
}

TEST_CASE("canonicalize is invariant under branch reordering") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 100; ++i) {
        std::vector<SupEntry> es;
        std::size_t n = 2 + rng() % 4;
        for (std::size_t j = 0; j < n; ++j) {
            TermPtr t = random_raw_term(rng, 3);
            if (rng() % 3 == 0) t = Term::negation(t);
            es.push_back({t, BigInt(1 + rng() % 3)});
        }
        auto shuffled = es;
        for (std::size_t j = shuffled.size() - 1; j > 0; --j)
            std::swap(shuffled[j], shuffled[rng() % (j + 1)]);
        REQUIRE(canonicalize(Term::superposition(std::move(es))) ==
                canonicalize(Term::superposition(std::move(shuffled))));
    }
}

TEST_CASE("canonical superposition round trip") {
    std::mt19937_64 rng(555);
    for (int i = 0; i < 100; ++i) {
        TermPtr t = random_raw_term(rng, 4);
        auto canon = canonicalize(t);
        REQUIRE(canonicalize(canon.expand_compressed()) == canon);
        REQUIRE(canonicalize(canon.expand_literal()) == canon);
    }
}

TEST_CASE("canonical representatives are negation-free and alpha-canonical") {
    // ~(\q. q) cancels the alpha-equivalent \p. p; only \r. r r survives
    auto c = canonicalize(parse_term("[~(\\q. q), \\p. p, \\r. r r]"));
    REQUIRE(c.size() == 1);
    REQUIRE(c.entries()[0].net == 1);
    REQUIRE(c.entries()[0].rep->kind != TermKind::Negation);
    REQUIRE(print_term(c.entries()[0].rep) == "\\x0. x0 x0");

    // entries are ordered by canonical key and stored with renamed binders
    auto two = canonicalize(parse_term("[\\b. b q, \\a. a]"));
    REQUIRE(two.size() == 2);
    REQUIRE(print_term(two.entries()[0].rep) == "\\x0. x0");
    REQUIRE(print_term(two.entries()[1].rep) == "\\x0. x0 q");
}
