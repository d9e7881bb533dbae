#include "lambdaq/encodings.hpp"
#include "lambdaq/parser.hpp"
#include "lambdaq/reduce.hpp"

#include "generators.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace lambdaq;

TEST_CASE("single parallel step") {
    SECTION("beta") {
        auto r = step(parse_term("(\\x. x) y"));
        REQUIRE(r);
        REQUIRE(alpha_eq(r->term, var("y")));
        REQUIRE(r->contractions == 1);
    }
    SECTION("all superposition branches contract simultaneously") {
        auto r = step(parse_term("[(\\x. x) a, (\\x. x) b]"));
        REQUIRE(r);
        REQUIRE(alpha_eq(r->term, parse_term("[a, b]")));
        REQUIRE(r->contractions == 2);
    }
    SECTION("distribution over the operator") {
        auto r = step(parse_term("[a] b"));
        REQUIRE(r);
        REQUIRE(alpha_eq(r->term, parse_term("[a b]")));
    }
    SECTION("sign lifting") {
        auto r = step(parse_term("~a b"));
        REQUIRE(r);
        REQUIRE(alpha_eq(r->term, parse_term("~(a b)")));
    }
    SECTION("argument distribution when the operator is normal") {
        auto r = step(parse_term("f [a, b]"));
        REQUIRE(r);
        REQUIRE(alpha_eq(r->term, parse_term("[f a, f b]")));
    }
    SECTION("beta precedes argument distribution") {
        auto r = step(parse_term("(\\x. c) [a, b]"));
        REQUIRE(r);
        REQUIRE(alpha_eq(r->term, var("c")));
    }
    SECTION("normal form reports normal") {
        REQUIRE_FALSE(step(parse_term("\\x. x")));
        REQUIRE_FALSE(step(parse_term("x y")));
        REQUIRE_FALSE(step(parse_term("[a, ~a]")));  // interference is not a step
    }
}

TEST_CASE("reduce") {
    SECTION("single beta step") {
        auto r = reduce(parse_term("(\\x. x) y"), 10);
        REQUIRE(alpha_eq(r.final, var("y")));
        REQUIRE(r.steps == 1);
        REQUIRE_FALSE(r.fuel_exhausted);
    }
    SECTION("already normal") {
        auto r = reduce(var("y"), 10);
        REQUIRE(r.steps == 0);
        REQUIRE(alpha_eq(r.final, var("y")));
    }
    SECTION("superposition results are canonicalized") {
        auto r = reduce(parse_term("[(\\x. x) a, b, ~a]"), 10);
        REQUIRE(alpha_eq(r.final, parse_term("[b]")));
    }
    SECTION("normal forms are fixed points") {
        auto r = reduce(parse_term("(\\x. x x) (\\y. y)"), 100);
        auto again = reduce(r.final, 100);
        REQUIRE(again.steps == 0);
        REQUIRE(alpha_eq(again.final, r.final));
    }
    SECTION("fuel exhaustion is reported, not thrown") {
        auto omega = parse_term("(\\x. x x) (\\x. x x)");
        auto r = reduce(omega, 10);
        REQUIRE(r.fuel_exhausted);
        REQUIRE(r.steps == 10);
        REQUIRE_FALSE(r.final->normal);
    }
    SECTION("work counts every contraction; work >= steps") {
        auto r = reduce(parse_term("[(\\x. x) a, (\\x. x) ((\\y. y) b)]"), 100);
        REQUIRE(r.steps == 2);
        REQUIRE(r.work == 3);
        REQUIRE(r.work >= r.steps);
    }
    SECTION("determinism") {
        auto a = reduce(parse_term("(\\f. \\x. f (f x)) (\\y. y) z"), 100);
        auto b = reduce(parse_term("(\\f. \\x. f (f x)) (\\y. y) z"), 100);
        REQUIRE(print_term(a.final) == print_term(b.final));
        REQUIRE(a.steps == b.steps);
        REQUIRE(a.work == b.work);
    }
}

TEST_CASE("parallelism law") {
    // m reducible, pairwise non-equivalent branches contract exactly m
    // redexes in one parallel step
    for (int m = 1; m <= 5; ++m) {
        std::vector<SupEntry> es;
        for (int i = 0; i < m; ++i)
            es.push_back({app(abs("x", var("x")), church(i)), 1});
        es.push_back({var("inert"), 1});
        auto r = step(Term::superposition(std::move(es)));
        REQUIRE(r);
        REQUIRE(r->contractions == m);
    }
}

TEST_CASE("reduce_compressed basics") {
    SECTION("multiplicity is carried through") {
        // M -> M' in one step
        auto m = app(abs("x", var("x")), var("z"));
        auto in = CanonicalSuperposition::from_leaves({{m, 5}});
        auto r = reduce_compressed(in, 100);
        REQUIRE(r.trace.steps == 1);
        REQUIRE(r.state.size() == 1);
        REQUIRE(r.state.entries()[0].net == 5);
        REQUIRE(alpha_eq(r.state.entries()[0].rep, var("z")));
    }
    SECTION("interference after reduction, checked against literal expansion") {
        auto m = app(abs("x", var("x")), var("z"));
        auto in = CanonicalSuperposition::from_leaves({{m, 2}, {var("z"), -2}});
        auto r = reduce_compressed(in, 100);
        REQUIRE(r.state.empty());
        REQUIRE(r.trace.steps == 1);

        // oracle: expand all four copies literally and reduce
        auto literal = reduce(in.expand_literal(), 100);
        REQUIRE(canonicalize(literal.final) == r.state);
    }
    SECTION("empty superposition stays empty") {
        auto r = reduce_compressed(CanonicalSuperposition{}, 100);
        REQUIRE(r.state.empty());
        REQUIRE(r.trace.steps == 0);
    }
}

TEST_CASE("compressed reduction agrees with literal expansion step for step") {
    using generators::random_normalizing;
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<std::pair<TermPtr, BigInt>> leaves;
        std::size_t n = 1 + rng() % 3;
        for (std::size_t i = 0; i < n; ++i) {
            BigInt count(1 + rng() % 8);
            if (rng() % 3 == 0) count = -count;
            leaves.emplace_back(random_normalizing(rng, 3), count);
        }
        auto input = CanonicalSuperposition::from_leaves(leaves);
        long total = reduce_compressed(input, 400).trace.steps;
        REQUIRE(total < 400);

        TermPtr literal = normalize_structure(input.expand_literal());
        for (long j = 0; j <= total + 2; ++j) {
            auto compressed = reduce_compressed(input, j);
            REQUIRE(canonicalize(literal) == compressed.state);
            auto r = step(literal);
            if (r) literal = r->term;
        }
    }
}
