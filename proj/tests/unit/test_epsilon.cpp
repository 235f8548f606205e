#include <doctest.h>

#include <cmath>

#include "lcs/epsilon/epsilon.hpp"
#include "lcs/error.hpp"
#include "local_helpers.hpp"

using namespace lcs::epsilon;
using namespace testing_helpers;
using lcs::chars::MulChar;
using lcs::exact::embed_complex;
using lcs::local::make_tower_digits;
using lcs::local::Step;
using lcs::nt::i64;

namespace {

FieldPtr prime_field(u64 p, unsigned digits) { return make_tower_digits(p, {}, digits); }

double modulus(const ScaledCyc& s) { return std::abs(embed_complex(s).value); }

} // namespace

TEST_CASE("oracle sum: exactness and degeneracy") {
    std::mt19937_64 rng(21);
    auto F = prime_field(7, 6);
    MulChar th = MulChar::random(F, 2, rng);
    TowerElement d = TowerElement::monomial(F, 0, -1);
    ScaledCyc a = oracle_sum(th, d);
    ScaledCyc b = oracle_sum(th, d, OracleOptions{1000, 4});
    CHECK(a == b);
    CHECK_FALSE(a.is_zero());
    CHECK(std::abs(modulus(a) - 1.0) < 1e-9);
    // val(delta) above 1 - c gives an exact zero.
    for (int c : {2, 3, 4}) {
        MulChar t = MulChar::random(F, c, rng);
        for (i64 v = 2 - c; v <= 1; ++v) CHECK(oracle_sum(t, random_unit_times(F, v, rng)).is_zero());
        double m0 = -1;
        for (int k = 0; k < 5; ++k) {
            ScaledCyc s = oracle_sum(t, random_unit_times(F, 1 - c, rng));
            CHECK_FALSE(s.is_zero());
            double m = modulus(s);
            if (m0 < 0) m0 = m;
            CHECK(std::abs(m - m0) < 1e-9);
        }
    }
    CHECK_THROWS_WITH_AS(oracle_sum(MulChar::random(F, 5, rng), TowerElement::monomial(F, 0, -4), OracleOptions{100, 1}),
                         doctest::Contains("CapacityExceeded"), lcs::Error);
}

TEST_CASE("Gauss sums have unit modulus and representative-independent products") {
    std::mt19937_64 rng(22);
    auto F = prime_field(7, 6);
    auto E = make_tower_digits(7, {Step::ramified(5)}, 4);
    for (const auto& T : {F, E}) {
        for (int k = 0; k < 25; ++k) {
            int c = 3 + 2 * static_cast<int>(rng() % 2);
            MulChar th = MulChar::random(T, c, rng);
            ScaledCyc g = gauss_sum(th);
            CHECK(std::abs(modulus(g) - 1.0) < 1e-9);
            CHECK(std::abs(modulus(g * g.conj()) - 1.0) < 1e-9);
            EpsilonValue eps = moy_epsilon(th);
            CHECK(eps.representative_stable);
            CHECK(eps.odd);
        }
    }
    MulChar even = MulChar::random(F, 4, rng);
    CHECK_THROWS_WITH_AS(gauss_sum(even), doctest::Contains("EvenConductor"), lcs::Error);
    CHECK_THROWS_WITH_AS(moy_epsilon(MulChar::random(F, 1, rng)), doctest::Contains("ConductorTooSmall"), lcs::Error);
}

TEST_CASE("Moy's formula against the oracle: one constant per conductor class") {
    std::vector<MulChar> fam;
    std::mt19937_64 rng(23);
    auto F = prime_field(7, 6);
    for (int k = 0; k < 100; ++k) fam.push_back(MulChar::random(F, 2 + k % 4, rng));
    std::vector<const lcs::chars::Character*> ptrs;
    for (const auto& t : fam) ptrs.push_back(&t);
    ConsistencyReport rep = moy_oracle_consistency(ptrs);
    REQUIRE(rep.classes.size() == 4);
    CHECK(rep.ok());
    for (const auto& c : rep.classes) {
        CHECK(c.samples == 25);
        CHECK(c.consistent);
    }
    CHECK(rep.csv().find("conductor,parity") == 0);

    // Same character at a higher storage precision gives identical values.
    auto F2 = prime_field(7, 10);
    const MulChar& t0 = fam[1];
    MulChar t1(F2, t0.wvalue(), t0.tame(),
               TowerElement::from_unit(F2, t0.gamma().valuation(), t0.gamma().unit(), t0.gamma().relprec()));
    CHECK(moy_epsilon(t0).value.num == moy_epsilon(t1).value.num);
    CHECK(oracle_epsilon(t0).value.num == oracle_epsilon(t1).value.num);

    // Independent seed on a ramified field.
    auto E = make_tower_digits(7, {Step::ramified(5)}, 4);
    std::vector<MulChar> famE;
    for (int k = 0; k < 12; ++k) famE.push_back(MulChar::random(E, 2 + k % 4, rng));
    std::vector<const lcs::chars::Character*> pe;
    for (const auto& t : famE) pe.push_back(&t);
    CHECK(moy_oracle_consistency(pe).ok());
}

TEST_CASE("epsilon ratios") {
    std::mt19937_64 rng(24);
    auto F = prime_field(7, 6);
    for (int f : {4, 5}) {
        MulChar th = MulChar::random(F, f, rng);
        CHECK(epsilon_ratio(th, th).value == ScaledCyc::one());
        MulChar eta = MulChar::random(F, f / 2, rng);
        MulChar th2 = th * eta;
        EpsilonValue r = epsilon_ratio(th, th2);
        ScaledCyc expect(lcs::exact::CycNumber::from_root(eta.eval(th.c_theta())), 0, 7);
        CHECK(r.value == expect);
        MulChar eta2 = MulChar::random(F, f / 2, rng);
        MulChar th3 = th2 * eta2;
        CHECK(epsilon_ratio(th, th3).value == epsilon_ratio(th, th2).value * epsilon_ratio(th2, th3).value);
        CHECK(agree_on_layer(th, th2, f / 2));
        CHECK_THROWS_WITH_AS(epsilon_ratio(th, MulChar::random(F, f + 1, rng)), doctest::Contains("ConductorMismatch"), lcs::Error);
    }
}

TEST_CASE("epsilon is invariant under field automorphisms") {
    std::mt19937_64 rng(25);
    auto T = make_tower_digits(11, {Step::unramified(2), Step::ramified(3)}, 4);
    auto autos = lcs::local::automorphisms(T);
    CHECK(autos.size() > 1);
    for (int k = 0; k < 4; ++k) {
        MulChar th = MulChar::random(T, 2 + k, rng);
        ScaledCyc base = moy_epsilon(th).value;
        for (const auto& s : autos) {
            MulChar ts = lcs::chars::restrict_to(th, lcs::local::RelativeExtension(s));
            CHECK(moy_epsilon(ts).value == base);
            if (th.conductor() % 2 == 1) CHECK(gauss_sum(ts) == gauss_sum(th));
        }
    }
}
