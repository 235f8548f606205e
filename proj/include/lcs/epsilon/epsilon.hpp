#pragma once

#include <string>
#include <vector>

#include "lcs/chars/character.hpp"

namespace lcs::epsilon {

using chars::Character;
using exact::CycNumber;
using exact::RootOfUnity;
using exact::ScaledCyc;
using local::TowerElement;
using nt::u64;

enum class Provenance { Moy, Oracle, Ratio };
const char* to_string(Provenance p);

struct EpsilonValue {
    ScaledCyc value;
    int conductor = 0;
    bool odd = false;
    Provenance provenance = Provenance::Moy;
    /// Moy only: the value did not change under a second representative of c_theta.
    bool representative_stable = true;
};

/// q^(-1/2) * sum over a in Teich u {0} of theta^-1(1 + a pi^n) psi(c a pi^n), for
/// odd conductor 2n+1 >= 3.  Uses the given representative c of c_theta.
ScaledCyc gauss_sum(const Character& theta, const TowerElement& c);
ScaledCyc gauss_sum(const Character& theta);

/// theta^-1(c) psi(c) q^((f-1)/2) [* G], for one representative c.
ScaledCyc moy_formula(const Character& theta, const TowerElement& c);
/// Moy's formula with the representative from c_theta(), rechecked with c_theta + zeta pi^(1-r).
EpsilonValue moy_epsilon(const Character& theta);

struct OracleOptions {
    u64 budget = 100'000'000;  // maximum number of terms
    unsigned jobs = 1;
};

/// q^(-c/2) * sum over u in (O/P^c)^x of theta^-1(u delta) psi(u delta), by full enumeration.
/// Requires val(delta) >= 1 - c.
ScaledCyc oracle_sum(const Character& theta, const TowerElement& delta, const OracleOptions& opt = {});
/// oracle_sum at delta = pi^(1-c).
EpsilonValue oracle_epsilon(const Character& theta, const OracleOptions& opt = {});

/// epsilon(theta1) / epsilon(theta2) by Moy's formula.  Throws ConductorMismatch unless the
/// conductors and the c_theta truncations agree.
EpsilonValue epsilon_ratio(const Character& theta1, const Character& theta2);
/// theta1 = theta2 on 1 + P^n, tested on the generators 1 + zeta^i pi^m, n <= m < max conductor.
bool agree_on_layer(const Character& theta1, const Character& theta2, int n);

struct ConsistencyClass {
    int conductor = 0;
    bool odd = false;
    ScaledCyc constant;  // moy / oracle for the first member
    std::size_t samples = 0;
    bool consistent = true;
    bool representative_stable = true;
};

struct ConsistencyReport {
    std::vector<ConsistencyClass> classes;
    bool ok() const;
    std::string csv() const;
};

/// Ratio moy_epsilon / oracle_epsilon for every member, grouped by conductor.
ConsistencyReport moy_oracle_consistency(const std::vector<const Character*>& family, const OracleOptions& opt = {});

} // namespace lcs::epsilon
