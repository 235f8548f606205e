#include <doctest.h>

#include "lcs/chars/character.hpp"
#include "lcs/error.hpp"
#include "local_helpers.hpp"

using namespace lcs::chars;
using namespace testing_helpers;
using lcs::ErrorKind;
using lcs::exact::RootOfUnity;
using lcs::local::make_tower_digits;
using lcs::local::Step;

namespace {

// psi through the matrix trace down to Q_p, where psi(y) = exp(2 pi i {y/p}) directly.
RootOfUnity psi_via_trace(const TowerElement& x) {
    auto F = lcs::local::prime_subfield(x.field());
    RelativeExtension rel(F.emb);
    TowerElement y = rel.trace(x);
    if (y.is_zero() || y.valuation() >= 1) return RootOfUnity::one();
    u64 p = F.field->p();
    // y = p^v * u with u a p-adic unit: {y/p} = (u mod p^(1-v)) / p^(1-v).
    i64 v = y.valuation();
    u64 m = lcs::nt::ipow(p, static_cast<unsigned>(1 - v));
    u64 u = y.unit()[0] % m;
    return RootOfUnity::make(m, static_cast<i64>(u));
}

const Subfield& subfield_of_degree(const std::vector<Subfield>& subs, unsigned deg) {
    for (const auto& s : subs)
        if (s.degree() == deg) return s;
    FAIL("no subfield of that degree");
    return subs.front();
}

} // namespace

TEST_CASE("psi agrees with the matrix trace and has level one") {
    std::mt19937_64 rng(11);
    auto E = make_tower_digits(7, {Step::ramified(5)}, 4);
    auto T = make_tower_digits(11, {Step::unramified(2), Step::ramified(3)}, 4);
    for (const auto& F : {E, T}) {
        for (int k = 0; k < 200; ++k) {
            i64 v = static_cast<i64>(rng() % 10) - 8;
            TowerElement x = random_unit_times(F, v, rng);
            TowerElement y = random_unit_times(F, static_cast<i64>(rng() % 10) - 8, rng);
            CHECK(psi(x) == psi_via_trace(x));
            CHECK(psi(x + y) == psi(x) * psi(y));
        }
        for (int k = 0; k < 50; ++k) CHECK(psi(random_in_P(F, 1, rng)).is_one());
        bool nontrivial = false;
        for (unsigned i = 0; i < F->f(); ++i)
            for (unsigned l = 0; l < F->e(); ++l)
                nontrivial = nontrivial || !psi(TowerElement::monomial(F, i, -static_cast<i64>(l))).is_one();
        CHECK(nontrivial);
    }
    CHECK_THROWS_AS(psi(TowerElement::zero(E, 0)), lcs::Error);
}

TEST_CASE("multiplicative characters: homomorphism, conductor, c_theta") {
    std::mt19937_64 rng(12);
    auto E = make_tower_digits(7, {Step::ramified(5)}, 4);
    auto T = make_tower_digits(11, {Step::unramified(2), Step::ramified(3)}, 4);
    for (const auto& F : {E, T}) {
        for (int c : {0, 1, 2, 3, 6, 9}) {
            MulChar th = MulChar::random(F, c, rng);
            CHECK(th.conductor() == c);
            CHECK(conductor_by_scan(th, c + 2) == c);
            for (int k = 0; k < 40; ++k) {
                TowerElement x = random_unit_times(F, static_cast<i64>(rng() % 7) - 3, rng);
                TowerElement y = random_unit_times(F, static_cast<i64>(rng() % 7) - 3, rng);
                CHECK(th.eval(x * y) == th.eval(x) * th.eval(y));
                CHECK((th * th.inv()).eval(x).is_one());
                CHECK(th.pow(3).eval(x) == th.eval(x).pow(3));
            }
            if (c >= 2) {
                CHECK(check_c_theta(th, th.c_theta()));
                CHECK(check_c_theta(th, th.standard_rep_element()) == (c <= 3));
                int r = (c + 1) / 2;
                TowerElement other = th.c_theta() + TowerElement::monomial(F, 1, 1 - r);
                CHECK(check_c_theta(th, other));
                CHECK(th.c_theta().valuation() == 1 - c);
            }
        }
    }
}

TEST_CASE("characters reject short arguments and wild fields") {
    std::mt19937_64 rng(13);
    auto E = make_tower_digits(7, {Step::ramified(5)}, 4);
    MulChar th = MulChar::random(E, 6, rng);
    TowerElement x = random_unit_times(E, 0, rng).truncated(3);
    CHECK_THROWS_AS(th.eval(x), lcs::Error);
    CHECK_THROWS_AS(th.eval(TowerElement::zero(E)), lcs::Error);
    auto W = make_tower_digits(11, {Step::ramified(14)}, 2);
    CHECK_THROWS_AS(MulChar(W, RootOfUnity::one(), 0, TowerElement::monomial(W, 0, -3)), lcs::Error);
    CHECK_THROWS_AS(MulChar::trivial(E).c_theta(), lcs::Error);
}

TEST_CASE("inflation and restriction agree with norms and embeddings pointwise") {
    std::mt19937_64 rng(14);
    auto T = make_tower_digits(11, {Step::unramified(2), Step::ramified(3)}, 4);
    auto subs = lcs::local::enumerate_subfields(T);
    for (const auto& S : subs) {
        RelativeExtension rel(S.emb);
        for (int c : {0, 1, 2, 5}) {
            if (c > S.field->max_precision()) continue;
            MulChar eta = MulChar::random(S.field, c, rng);
            MulChar up = inflate(eta, rel);
            if (c >= 2) CHECK(up.conductor() - 1 == static_cast<int>(S.emb.d) * (c - 1));
            CHECK(comes_from(up, S));
            for (int k = 0; k < 15; ++k) {
                TowerElement x = random_unit_times(T, static_cast<i64>(rng() % 5) - 2, rng);
                CHECK(up.eval(x) == eta.eval(rel.norm(x)));
            }
            MulChar th = MulChar::random(T, c + 1, rng);
            MulChar down = restrict_to(th, rel);
            for (int k = 0; k < 15; ++k) {
                TowerElement y = random_unit_times(S.field, static_cast<i64>(rng() % 5) - 2, rng);
                CHECK(down.eval(y) == th.eval(S.emb.apply(y)));
            }
        }
        // N(zeta_T) = zeta_T^(d (q_T - 1) / (q_S - 1)).
        u64 n0 = S.emb.d * ((T->q() - 1) / (S.field->q() - 1)) % (T->q() - 1);
        CHECK(S.emb.apply(rel.norm_zeta()) == TowerElement::monomial(T, static_cast<i64>(n0), 0));
    }
}

TEST_CASE("genericity and admissibility for simple extensions") {
    auto E = make_tower_digits(7, {Step::ramified(5)}, 4);
    auto subs = lcs::local::enumerate_subfields(E);
    const Subfield& F = subs.front();
    MulChar gen(E, RootOfUnity::one(), 0, TowerElement::monomial(E, 0, -8));
    CHECK(gen.conductor() == 9);
    CHECK(is_generic(gen, F));
    CHECK(is_admissible(gen, F));
    // pi_E^-5 = zeta^? / p lies in F, so this one comes from F.
    MulChar from_f(E, RootOfUnity::one(), 0, TowerElement::monomial(E, 0, -5));
    CHECK_FALSE(is_generic(from_f, F));
    CHECK_FALSE(is_admissible(from_f, F));
    CHECK_THROWS_AS(howe_factorize(from_f, F), lcs::Error);
    // Conductor one over a ramified extension is rejected explicitly.
    MulChar tame(E, RootOfUnity::one(), 1, TowerElement::zero(E, 0));
    CHECK_THROWS_AS(is_generic(tame, F), lcs::Error);

    // Unramified cubic: a tame character is generic iff it does not factor through the norm.
    auto U = make_tower_digits(7, {Step::unramified(3)}, 4);
    auto us = lcs::local::enumerate_subfields(U);
    const u64 m = U->q() - 1;  // 342 = 6 * 57
    MulChar t1(U, RootOfUnity::one(), 1, TowerElement::zero(U, 0));
    MulChar t57(U, RootOfUnity::one(), 57, TowerElement::zero(U, 0));
    CHECK(is_generic(t1, us.front()));
    CHECK_FALSE(is_generic(t57, us.front()));
    CHECK(m % 57 == 0);
}

TEST_CASE("Howe factorization round trip on a tower") {
    auto E = make_tower_digits(11, {Step::ramified(2), Step::ramified(2)}, 4);
    auto subs = lcs::local::enumerate_subfields(E);
    REQUIRE(subs.size() == 3);
    const Subfield& F = subs.front();
    TowerElement g = TowerElement::monomial(E, 0, -6) + TowerElement::monomial(E, 3, -3);
    MulChar th(E, RootOfUnity::make(10, 3), 7, g);
    REQUIRE(is_admissible(th, F));
    auto h = howe_factorize(th, F);
    REQUIRE(h.factors.size() == 2);
    CHECK(h.factors[0].field.degree() == 2);
    CHECK(h.factors[0].conductor_on_E == 7);
    CHECK(h.factors[1].field.degree() == 4);
    CHECK(h.factors[1].conductor_on_E == 4);
    CHECK(h.factors[0].phi.wvalue().is_one());
    CHECK(h.factors[0].phi.tame() == 0);
    CHECK(h.chi.is_trivial());
    CHECK(howe_product(h, E) == th);
    // Each factor is generic over the previous field.
    Subfield prev = F;
    for (const auto& f : h.factors) {
        Subfield below{prev.field, lcs::local::relative_embedding(f.field, prev)};
        CHECK(is_generic(f.phi, below));
        prev = f.field;
    }

    // A term from F is absorbed by chi.
    MulChar th2(E, RootOfUnity::one(), 1, g + TowerElement::monomial(E, 0, -8));
    auto h2 = howe_factorize(th2, F);
    CHECK(h2.chi.conductor() == 3);
    CHECK(howe_product(h2, E) == th2);

    // Not admissible: everything comes from the quadratic subfield.
    MulChar th3(E, RootOfUnity::one(), 0, TowerElement::monomial(E, 0, -6));
    CHECK_FALSE(is_admissible(th3, F));
    (void)subfield_of_degree;
}

TEST_CASE("norm composites match their parts") {
    std::mt19937_64 rng(15);
    auto E = make_tower_digits(7, {Step::ramified(5)}, 4);
    auto L = make_tower_digits(7, {Step::ramified(2)}, 4);
    auto K = make_tower_digits(7, {Step::ramified(10)}, 4);
    auto eE = std::make_shared<RelativeExtension>(lcs::local::embeddings(E, K).front());
    auto eL = std::make_shared<RelativeExtension>(lcs::local::embeddings(L, K).front());
    MulChar phi(E, RootOfUnity::one(), 2, TowerElement::monomial(E, 0, -8));
    MulChar lam(L, RootOfUnity::one(), 0, TowerElement::monomial(L, 1, -2));
    NormComposite th(K, {{phi, eE}, {lam, eL}});
    CHECK(th.conductor() == 17);
    CHECK(check_c_theta(th, th.c_theta()));
    for (int k = 0; k < 10; ++k) {
        TowerElement x = random_unit_times(K, static_cast<i64>(rng() % 5) - 2, rng);
        TowerElement y = random_unit_times(K, 0, rng);
        CHECK(th.eval(x * y) == th.eval(x) * th.eval(y));
    }
}
