#include <algorithm>
#include <numeric>

#include "lcs/epsilon/epsilon.hpp"
#include "lcs/error.hpp"
#include "lcs/lab/sharpness.hpp"

namespace lcs::lab {

using local::Step;

void SharpnessConfig::validate() const {
    auto bad = [](const std::string& m) { fail(ErrorKind::ConfigInvalid, m); };
    if (p < 3 || !nt::is_prime(p)) bad("p must be an odd prime");
    if (p > 65521) bad("p too large for the residue tables");
    if (N < 5) bad("N must be at least 5");
    if (p - 1 <= N) bad("need p - 1 > N");
    if (N % 2 == 0) {
        if (ell < 2 || ell > N - 1) bad("even N needs ell in [2, N-1]");
        if (std::gcd(ell, N) != 1) bad("ell must be coprime to N");
    } else if (ell != 0 && std::gcd(ell, N) != 1) {
        bad("ell must be coprime to N");
    }
    if (conductor_bound < 0) bad("conductor bound must be non-negative");
    if (precision < 0) bad("precision must be non-negative");
    if (selector >= static_cast<i64>(p - 1)) bad("selector must be below p - 1");
}

unsigned SharpnessConfig::digits() const {
    if (precision > 0) return static_cast<unsigned>(nt::ceil_div(precision, static_cast<i64>(N)));
    // Route B at r <= 2 needs N * digits >= 4(N-1) + 2N - 1.
    const int routeB = static_cast<int>(nt::ceil_div(4 * static_cast<i64>(N) - 4 + 2 * static_cast<i64>(N) - 1, N));
    return static_cast<unsigned>(std::max({3, conductor_bound, routeB}));
}

bool is_conjugate(const MulChar& theta1, const MulChar& theta2) {
    if (!theta1.field()->same_as(*theta2.field())) return false;
    for (const auto& s : local::automorphisms(theta1.field()))
        if (chars::restrict_to(theta1, RelativeExtension(s)) == theta2) return true;
    return false;
}

PhiPair build_phi_pair(const SharpnessConfig& config) {
    config.validate();
    PhiPair out;
    out.config = config;
    const unsigned N = config.N;
    out.E = local::make_tower_digits(config.p, {Step::ramified(N)}, config.digits());
    const FieldPtr& E = out.E;
    out.beta = TowerElement::monomial(E, 0, 2 - 2 * static_cast<i64>(N));
    if (N % 2 == 0) out.beta = out.beta + TowerElement::monomial(E, 0, -static_cast<i64>(config.ell));
    out.phi1 = MulChar(E, RootOfUnity::one(), 0, out.beta);

    auto twist = [&](u64 j) { return MulChar(E, RootOfUnity::one(), 0, TowerElement::monomial(E, static_cast<i64>(j), -1)); };
    if (config.selector >= 0) {
        out.selector = static_cast<u64>(config.selector);
        out.eta = twist(out.selector);
        out.phi2 = out.phi1 * out.eta;
        if (is_conjugate(out.phi1, out.phi2)) fail(ErrorKind::ConfigInvalid, "selector gives a conjugate pair");
        return out;
    }
    for (u64 j = 0; j + 1 < E->q(); ++j) {
        MulChar eta = twist(j);
        MulChar phi2 = out.phi1 * eta;
        if (is_conjugate(out.phi1, phi2)) continue;
        out.selector = j;
        out.eta = eta;
        out.phi2 = phi2;
        return out;
    }
    fail(ErrorKind::InternalContradiction, "every separating twist gives a conjugate pair");
}

PhiPair mutate_pair(const PhiPair& pair, int layer) {
    if (layer < 1) fail(ErrorKind::InvalidArgument, "mutation layer must be positive");
    PhiPair out = pair;
    MulChar mu(pair.E, RootOfUnity::one(), 0, TowerElement::monomial(pair.E, 0, -layer));
    out.phi2 = pair.phi2 * mu;
    out.mutation_layer = layer;
    return out;
}

bool PhiCheck::ok(unsigned N) const {
    const int c = 2 * static_cast<int>(N) - 1;
    return conductor1 == c && conductor2 == c && scanned1 == c && scanned2 == c && quotient_conductor == 2 && agree_pi &&
           agree_teich && agree_p2 && differ_p1 && admissible1 && admissible2 && non_conjugate;
}

PhiCheck check_phi_pair(const PhiPair& pair) {
    PhiCheck ch;
    const FieldPtr& E = pair.E;
    const int bound = 2 * static_cast<int>(pair.config.N) + 1;
    ch.conductor1 = pair.phi1.conductor();
    ch.conductor2 = pair.phi2.conductor();
    ch.scanned1 = chars::conductor_by_scan(pair.phi1, bound);
    ch.scanned2 = chars::conductor_by_scan(pair.phi2, bound);
    ch.quotient_conductor = (pair.phi1 * pair.phi2.inv()).conductor();
    const TowerElement pi = TowerElement::uniformizer(E);
    ch.agree_pi = pair.phi1.eval(pi) == pair.phi2.eval(pi);
    ch.agree_teich = true;
    for (u64 i = 0; i + 1 < E->q(); ++i) {
        TowerElement z = TowerElement::monomial(E, static_cast<i64>(i), 0);
        ch.agree_teich = ch.agree_teich && pair.phi1.eval(z) == pair.phi2.eval(z);
    }
    ch.agree_p2 = epsilon::agree_on_layer(pair.phi1, pair.phi2, 2);
    const TowerElement one = TowerElement::from_int(E, 1);
    for (u64 i = 0; i + 1 < E->q() && !ch.differ_p1; ++i) {
        TowerElement x = one + TowerElement::monomial(E, static_cast<i64>(i), 1);
        ch.differ_p1 = !(pair.phi1.eval(x) == pair.phi2.eval(x));
    }
    Subfield F = local::prime_subfield(E);
    ch.admissible1 = chars::is_admissible(pair.phi1, F);
    ch.admissible2 = chars::is_admissible(pair.phi2, F);
    ch.non_conjugate = !is_conjugate(pair.phi1, pair.phi2);
    return ch;
}

} // namespace lcs::lab
