#pragma once

// Test-only generator of small strongly-normalizing lambda-q terms.

#include "lambdaq/encodings.hpp"
#include "lambdaq/term.hpp"

#include <random>

namespace generators {

using namespace lambdaq;

inline TermPtr random_normalizing(std::mt19937_64& rng, int depth) {
    switch (rng() % 8) {
        case 0:
            return church(rng() % 4);
        case 1:
            return rng() % 2 ? true_term() : false_term();
        case 2:
            return abs("x", var("x"));
        case 3: {
            if (depth <= 0) return church(rng() % 3);
            return app(abs("x", app(var("x"), random_normalizing(rng, depth - 1))),
                       abs("y", var("y")));
        }
        case 4:
            if (depth <= 0) return var("g");
            return app(app(true_term(), random_normalizing(rng, depth - 1)),
                       random_normalizing(rng, depth - 1));
        case 5:
            if (depth <= 0) return var("h");
            return app(equal_term(), church(rng() % 3), church(rng() % 3));
        case 6:
            if (depth <= 0) return church(rng() % 3);
            return Term::negation(random_normalizing(rng, depth - 1));
        default: {
            if (depth <= 0) return var("z");
            std::vector<SupEntry> es;
            std::size_t n = 1 + rng() % 3;
            for (std::size_t i = 0; i < n; ++i)
                es.push_back({random_normalizing(rng, depth - 1), BigInt(1 + rng() % 8)});
            return Term::superposition(std::move(es));
        }
    }
}

}  // namespace generators
