#pragma once

#include <random>
#include <vector>

#include "siqr/timefn.hpp"

namespace siqr::testing {

/// Deterministic generator of small bounded expression trees for
/// property-style tests.
inline TimeFunction random_tree(std::mt19937_64& rng, int depth = 0) {
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    std::uniform_real_distribution<double> omega(0.05, 2.0);
    std::uniform_real_distribution<double> rate(0.0, 1.5);
    std::uniform_int_distribution<int> kind(0, depth >= 3 ? 2 : 5);
    switch (kind(rng)) {
    case 0:
        return TimeFunction::constant(coeff(rng));
    case 1:
        return TimeFunction::sinusoid(coeff(rng), omega(rng), coeff(rng));
    case 2:
        return TimeFunction::exp_decay(rate(rng));
    case 3: {
        std::vector<TimeFunction> parts;
        std::uniform_int_distribution<int> n(2, 3);
        const int count = n(rng);
        parts.reserve(count);
        for (int i = 0; i < count; ++i) {
            parts.push_back(random_tree(rng, depth + 1));
        }
        return TimeFunction::sum(std::move(parts));
    }
    case 4: {
        std::vector<TimeFunction> parts;
        parts.push_back(random_tree(rng, depth + 1));
        parts.push_back(random_tree(rng, depth + 1));
        return TimeFunction::product(std::move(parts));
    }
    default:
        return TimeFunction::affine(coeff(rng), coeff(rng), random_tree(rng, depth + 1));
    }
}

/// Random tree whose values stay in [0, ~4]: suitable wherever a
/// nonnegative coefficient is required.
inline TimeFunction random_nonnegative_tree(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> base(0.1, 2.0);
    std::uniform_real_distribution<double> frac(0.0, 0.9);
    std::uniform_real_distribution<double> omega(0.05, 2.0);
    const double level = base(rng);
    const double amp = level * frac(rng);
    return TimeFunction::sum({TimeFunction::constant(level),
                              TimeFunction::sinusoid(amp, omega(rng), base(rng))});
}

} // namespace siqr::testing
