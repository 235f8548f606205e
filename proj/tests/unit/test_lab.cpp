#include <doctest.h>

#include <functional>

#include "lcs/epsilon/epsilon.hpp"
#include "lcs/error.hpp"
#include "lcs/lab/sharpness.hpp"

using namespace lcs::lab;
using lcs::ErrorKind;

namespace {

SharpnessConfig cfg(u64 p, unsigned N, unsigned ell = 0, int bound = 3, int precision = 0) {
    SharpnessConfig c;
    c.p = p;
    c.N = N;
    c.ell = ell;
    c.conductor_bound = bound;
    c.precision = precision;
    return c;
}

bool throws_kind(ErrorKind k, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const lcs::Error& e) {
        return e.kind() == k;
    }
    return false;
}

} // namespace

TEST_CASE("config validation") {
    CHECK(throws_kind(ErrorKind::ConfigInvalid, [] { cfg(7, 4).validate(); }));
    CHECK(throws_kind(ErrorKind::ConfigInvalid, [] { cfg(7, 6, 5).validate(); }));   // p - 1 = N
    CHECK(throws_kind(ErrorKind::ConfigInvalid, [] { cfg(11, 6).validate(); }));     // even N without ell
    CHECK(throws_kind(ErrorKind::ConfigInvalid, [] { cfg(11, 6, 3).validate(); }));  // gcd(3, 6) > 1
    CHECK(throws_kind(ErrorKind::ConfigInvalid, [] { cfg(9, 5).validate(); }));
    CHECK_NOTHROW(cfg(11, 6, 5).validate());
    CHECK(cfg(7, 5, 0, 3, 12).digits() == 3);
    CHECK(cfg(11, 7, 0, 4, 42).digits() == 6);
    CHECK(cfg(11, 7, 0, 4).digits() == 6);
    CHECK(cfg(7, 5, 0, 3).digits() == 5);
}

TEST_CASE("twin characters for odd N") {
    PhiPair pp = build_phi_pair(cfg(7, 5, 0, 3, 12));
    PhiCheck ch = check_phi_pair(pp);
    CHECK(ch.ok(5));
    CHECK(ch.conductor1 == 9);
    CHECK(ch.quotient_conductor == 2);
    CHECK(is_conjugate(pp.phi1, pp.phi1));
    CHECK_FALSE(is_conjugate(pp.phi1, pp.phi2));

    // mu_5 lies in Q_11, so E has five automorphisms and transported characters are conjugate.
    PhiPair p11 = build_phi_pair(cfg(11, 5));
    auto autos = lcs::local::automorphisms(p11.E);
    CHECK(autos.size() == 5);
    for (const auto& s : autos) CHECK(is_conjugate(p11.phi1, lcs::chars::restrict_to(p11.phi1, RelativeExtension(s))));
    CHECK(check_phi_pair(p11).ok(5));

    PhiPair mut = mutate_pair(pp, 2);
    CHECK(lcs::epsilon::agree_on_layer(mut.phi1, mut.phi2, 3));
    CHECK_FALSE(lcs::epsilon::agree_on_layer(mut.phi1, mut.phi2, 2));

    // Too little precision surfaces as PrecisionLoss, not a wrong answer.
    PhiPair low = build_phi_pair(cfg(7, 5, 0, 3, 10));
    CHECK(throws_kind(ErrorKind::PrecisionLoss, [&] { check_phi_pair(low); }));
}

TEST_CASE("even N: two-step Howe tower") {
    PhiPair pp = build_phi_pair(cfg(11, 6, 5, 2));
    CHECK(check_phi_pair(pp).ok(6));
    auto h = lcs::chars::howe_factorize(pp.phi1, lcs::local::prime_subfield(pp.E));
    REQUIRE(h.factors.size() == 2);
    CHECK(h.factors[0].field.degree() == 3);
    CHECK(h.factors[1].field.degree() == 6);
    CHECK(h.factors[0].conductor_on_E == 11);
    CHECK(h.factors[1].conductor_on_E == 6);
    CHECK(lcs::chars::howe_product(h, pp.E) == pp.phi1);
}

TEST_CASE("tame extensions and twisting pairs") {
    CHECK(tame_extensions(11, 2, 3).size() == 3);
    CHECK(tame_extensions(7, 2, 3).size() == 3);
    CHECK(tame_extensions(7, 1, 3).size() == 1);
    CHECK(tame_extensions(7, 3, 3).size() == 4);  // unramified and three cubic Kummer classes
    auto F = tame_extensions(7, 1, 3).front();
    // r = 1, conductor 3: alpha matters modulo p^-1 only.
    CHECK(enumerate_pairs_on(F, 2).size() == 6);
    CHECK(enumerate_pairs_on(F, 4).size() == 6 * 7);
    auto quad = tame_extensions(7, 2, 4);
    for (const auto& L : quad)
        for (int m = 0; m <= 3; ++m)
            for (const auto& pr : enumerate_pairs_on(L, m)) {
                CHECK(pr.lambda.conductor() == m + 1);
                CHECK(lcs::chars::is_admissible(pr.lambda, lcs::local::prime_subfield(L)));
            }
    // Ramified quadratics admit no lambda of even m: alpha would come from F.
    CHECK(enumerate_pairs_on(quad[1], 2).empty());
    CHECK(enumerate_pairs_on(quad[1], 0).empty());
    // Frobenius identifies alpha with its conjugate.
    CHECK(enumerate_pairs_on(quad[0], 1).size() == 48 / 2 + 3);
}

TEST_CASE("valuation cases and exponents") {
    CaseData d = classify_case(5, 1, 1, 1);
    CHECK(d.vcase == ValCase::BetaDominates);
    CHECK(d.val_beta == -8);
    CHECK(d.val_alpha == -5);
    CHECK(classify_case(5, 1, 1, 2).vcase == ValCase::AlphaDominates);
    CHECK(a_exponent(1, 5, 1, 1, 1, 1) == 3);
    CHECK(throws_kind(ErrorKind::RangeViolation, [] { a_exponent(2, 5, 1, 1, 1, 1); }));
    CHECK(a_exponent_case3(1, 7, 2, 1) == 2);
    // At r = floor(N/2) the bound can drop to 1: ramified quadratic, m = 3, N = 5.
    CHECK(a_exponent(2, 5, 3, 2, 1, 2) == 1);

    CaseScanReport rep = case_scan({5, 6, 7}, 12);
    CHECK(rep.case1_ok());
    CHECK(rep.congruence_ok());
    CHECK(rep.rows > 0);
    CHECK(rep.case2 > 0);
    CHECK(rep.case3 > 0);
    // N = 6 with e_L = 3 reaches equal valuations, which needs r >= (N-1)/2.
    CHECK(classify_case(6, 3, 3, 5).vcase == ValCase::EqualVal);
    CHECK(throws_kind(ErrorKind::InternalContradiction, [] { classify_case(6, 3, 2, 5); }));
}

TEST_CASE("double cosets") {
    auto E = lcs::local::make_tower_digits(7, {lcs::local::Step::ramified(5)}, 4);
    auto fields = tame_extensions(7, 2, 4);
    for (const auto& L : fields) {
        CosetSystem cs = double_cosets(E, L);
        CHECK(cs.mackey_ok);
        unsigned total = 0;
        for (const auto& cd : cs.cosets) {
            total += cd.orbit_size;
            CHECK(cd.e2 * cd.e2p == 5);
            CHECK(cd.K->degree() == cd.orbit_size * 5);
            CHECK(cd.relE->top()->same_as(*cd.K));
            CHECK(cd.relL->top()->same_as(*cd.K));
        }
        CHECK(total == 2);
    }
    CosetSystem one = double_cosets(E, tame_extensions(7, 1, 4).front());
    REQUIRE(one.cosets.size() == 1);
    CHECK(one.cosets[0].K->degree() == 5);
    CHECK(one.cosets[0].K->e() == 5);
}

TEST_CASE("equ6 on small families") {
    PhiPair pp = build_phi_pair(cfg(7, 5, 0, 3));
    // r = 1: every chi of conductor <= 3.
    auto r1 = enumerate_tame_pairs(7, 1, 3, pp.E->digits());
    FamilyReport fam = verify_equ6_family(pp, r1);
    CHECK(fam.pass());
    CHECK(fam.reports.size() == r1.size());
    // r = 2 with m = 1 on all three quadratics.
    std::vector<AdmissiblePair> two;
    for (const auto& L : tame_extensions(7, 2, pp.E->digits())) {
        auto part = enumerate_pairs_on(L, 1);
        two.insert(two.end(), part.begin(), part.end());
    }
    FamilyReport f2 = verify_equ6_family(pp, two, Equ6Options{3, 1});
    CHECK(f2.pass());
    CHECK(f2.deep > 0);
    for (const auto& r : f2.reports) CHECK(r.arg_valuation >= 2);
}

TEST_CASE("r = 1 epsilon equality and its mutation") {
    PhiPair pp = build_phi_pair(cfg(7, 5, 0, 3, 12));
    R1Report rep = verify_r1_gamma(pp, 2);
    CHECK(rep.characters == 6 * 6 * 7);
    CHECK(rep.pass());
    // A layer-2 mutation is invisible to chi of conductor <= 2 (c_theta then lies in pi^-8 (1 + P^3)).
    CHECK(verify_r1_gamma(mutate_pair(pp, 2), 2).pass());
    R1Report bad = verify_r1_gamma(mutate_pair(pp, 2), 3);
    CHECK_FALSE(bad.pass());
    CHECK_FALSE(bad.failures.empty());
}

TEST_CASE("distinguisher search at r = floor(N/2)") {
    PhiPair pp = build_phi_pair(cfg(7, 5, 0, 6));
    SearchReport s = search_distinguisher(pp, 2, 6);
    REQUIRE(s.found.has_value());
    CHECK(s.found->L->e() == 2);
    CHECK(s.found->m == 3);
    CHECK(s.reverified);
    CHECK_FALSE(s.r1_shape_distinguishes);
    CHECK_FALSE(s.ratio.is_one());
    Equ6Report rep = verify_equ6(pp, *s.found);
    CHECK_FALSE(rep.routeA_equal);
    CHECK(rep.routes_agree);
    CHECK(rep.arg_valuation == 1);
    CHECK_FALSE(search_distinguisher(pp, 1, 4).found.has_value());
    CHECK_FALSE(search_distinguisher(pp, 2, 0).found.has_value());
}
