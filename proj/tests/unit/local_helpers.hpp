#pragma once

#include <random>

#include "lcs/local/element.hpp"

namespace testing_helpers {

using namespace lcs::local;

// Random element pi^v * unit with unit known to the field's full precision.
inline TowerElement random_unit_times(const FieldPtr& F, lcs::nt::i64 v, std::mt19937_64& rng) {
    Raw r(F->raw_size());
    for (auto& c : r) c = rng() % F->pK();
    while (F->residue().is_zero(F->raw_residue(r))) r[0] = rng() % F->pK();
    return TowerElement::from_unit(F, v, r, F->max_precision());
}

inline TowerElement random_integral(const FieldPtr& F, std::mt19937_64& rng) {
    Raw r(F->raw_size());
    for (auto& c : r) c = rng() % F->pK();
    return TowerElement::from_raw(F, r, F->max_precision());
}

inline TowerElement random_in_P(const FieldPtr& F, int n, std::mt19937_64& rng) {
    return random_integral(F, rng) * TowerElement::uniformizer(F).pow(n);
}

} // namespace testing_helpers
