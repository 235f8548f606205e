#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lcs/chars/character.hpp"

namespace lcs::lab {

using chars::MulChar;
using exact::RootOfUnity;
using local::Embedding;
using local::FieldPtr;
using local::RelativeExtension;
using local::Subfield;
using local::TowerElement;
using nt::i64;
using nt::u64;

// ---------------------------------------------------------------------------
// Configuration and the twin characters

struct SharpnessConfig {
    u64 p = 7;
    unsigned N = 5;
    unsigned ell = 0;          // required iff N is even
    i64 selector = -1;         // Teichmueller exponent j of the separating twist; -1 = search
    int conductor_bound = 3;   // for lambda (or chi at r = 1)
    int precision = 0;         // pi_E-adic; 0 = automatic
    u64 seed = 1;

    /// Throws ConfigInvalid.
    void validate() const;
    /// Storage digits: ceil(precision / N); when automatic, enough for conductor_bound and
    /// for the symmetric-function route at r <= 2.
    unsigned digits() const;
};

struct PhiPair {
    SharpnessConfig config;
    FieldPtr E;
    TowerElement beta;   // shared leading datum of both characters
    MulChar phi1;
    MulChar phi2;        // phi1 * eta
    MulChar eta;         // conductor 2 on E, gamma = zeta^j pi^-1
    u64 selector = 0;
    int mutation_layer = 0;  // 0 = unmutated
};

/// Twin characters of conductor 2N - 1 on E = Q_p(p^(1/N)).
PhiPair build_phi_pair(const SharpnessConfig& config);
/// True when some automorphism of E carries theta1 to theta2.
bool is_conjugate(const MulChar& theta1, const MulChar& theta2);
/// phi2 multiplied by a character that is nontrivial on 1 + P_E^layer and trivial on 1 + P_E^(layer+1).
PhiPair mutate_pair(const PhiPair& pair, int layer);

struct PhiCheck {
    int conductor1 = 0, conductor2 = 0, scanned1 = 0, scanned2 = 0, quotient_conductor = 0;
    bool agree_pi = false, agree_teich = false, agree_p2 = false, differ_p1 = false;
    bool admissible1 = false, admissible2 = false, non_conjugate = false;
    bool ok(unsigned N) const;
};
PhiCheck check_phi_pair(const PhiPair& pair);

// ---------------------------------------------------------------------------
// Twisting pairs (L/F, lambda)

/// Tame extensions of Q_p of degree r up to isomorphism, at the given digits.
std::vector<FieldPtr> tame_extensions(u64 p, unsigned r, unsigned digits);
/// Shapes whose compositum with E needs gcd(e_L, N) > 1 are not supported.
bool supported_shape(unsigned N, const FieldPtr& L);

struct AdmissiblePair {
    FieldPtr L;
    MulChar lambda;
    int m = 0;              // conductor - 1
    TowerElement alpha;     // lambda(1+x) = psi_L(alpha x) on P_L^(floor(m/2)+1); zero when m = 0
    std::string id;
};

/// All admissible lambda on the fields of tame_extensions(p, r) with conductor <= bound,
/// one per class of alpha = c_lambda under Aut(L/F).
std::vector<AdmissiblePair> enumerate_tame_pairs(u64 p, unsigned r, int conductor_bound, unsigned digits);
/// The same for one field and one m.
std::vector<AdmissiblePair> enumerate_pairs_on(const FieldPtr& L, int m);

// ---------------------------------------------------------------------------
// Valuation cases and exponents

enum class ValCase { BetaDominates, AlphaDominates, EqualVal };
const char* to_string(ValCase c);

struct CaseData {
    ValCase vcase = ValCase::BetaDominates;
    unsigned eK = 0, e = 0, Nprime = 0;
    i64 val_beta = 0, val_alpha = 0;  // in K
};
/// Classification for E totally ramified of degree N and L with ramification e_L,
/// E and L meeting in F.  m = 0 means alpha = 0 (always BetaDominates).
/// Throws InternalContradiction on equal valuations when 2 r < N - 1.
CaseData classify_case(unsigned N, unsigned eL, unsigned r, int m);

/// A = i(2N-2) + e2 e2' ceil(-i m / (e1 e2')), with N = e2 e2'.  Checks A = -2i mod N;
/// throws RangeViolation when A < 2 although 2 <= 2s < N - 1.
i64 a_exponent(i64 i, unsigned N, int m, unsigned e1, unsigned e2p, unsigned s);
/// Valuation bound for beta^i e_i(alpha^-1) in the alpha-dominant case:
/// -i(2N-2) + N ceil(i m / e_L).
i64 a_exponent_case3(i64 i, unsigned N, int m, unsigned eL);

struct CaseScanReport {
    std::size_t rows = 0, case2 = 0, case3 = 0, equal_val = 0;
    std::size_t direct_checks = 0, direct_failures = 0;  // N does not divide 2 e_L
    std::size_t a_checks = 0, a_failures = 0;            // congruence and A >= 2
    std::size_t a3_checks = 0, a3_failures = 0;          // corrected mirror bound
    std::size_t a3_negated_below_two = 0;                // the naive -A mirror below 2
    std::vector<std::string> notes;
    bool case1_ok() const { return equal_val == 0 && direct_failures == 0 && rows > 0; }
    bool congruence_ok() const { return a_failures == 0 && a3_failures == 0 && a_checks > 0; }
};
/// Scan over r with 2r < N - 1, tame shapes (f_L, e_L) with f_L e_L = r and gcd(e_L, N) = 1,
/// and 0 <= m <= max_m.
CaseScanReport case_scan(const std::vector<unsigned>& Ns, int max_m);

// ---------------------------------------------------------------------------
// Double cosets

struct CosetDatum {
    Embedding ell;        // representative L -> M (structure level)
    unsigned orbit_size = 0;
    FieldPtr K;           // E ell(L), working precision
    std::shared_ptr<const RelativeExtension> relE, relL;  // E -> K, L -> K
    unsigned e = 0, Nprime = 0, e1 = 0, e2 = 0, e2p = 0;
};

struct CosetSystem {
    FieldPtr M;           // ambient, one digit
    std::size_t gal_size = 0, stabilizer_size = 0;
    std::vector<CosetDatum> cosets;
    bool mackey_ok = false;
};

/// Orbits of Gal(M/E) on Emb(L, M), each with its compositum.  E and L must share digits.
CosetSystem double_cosets(const FieldPtr& E, const FieldPtr& L);

// ---------------------------------------------------------------------------
// Verification

struct CosetValue {
    std::string K;
    unsigned orbit_size = 0;
    RootOfUnity v1, v2;
    bool conductor_ok = true, cdata_ok = true, layer_ok = true, epsilon_ok = true;
    bool deep = false;
};

struct Equ6Report {
    std::string pair_id;
    ValCase vcase = ValCase::BetaDominates;
    std::vector<CosetValue> cosets;
    RootOfUnity routeA1, routeA2, routeB1, routeB2;
    i64 arg_valuation = 0;  // of (argument - 1) in E
    i64 min_a = 0;          // predicted lower bound
    bool routeA_equal = false, routeB_member = false, routes_agree = false, bound_ok = false;
    double seconds = 0;
    bool invariants_ok() const;
    bool pass() const { return routeA_equal && routeB_member && routes_agree && bound_ok && invariants_ok(); }
};

struct Equ6Options {
    /// Run the compositum invariants (conductor, c-data, layer, epsilon ratio) on every
    /// `deep_every`-th instance; 0 disables them.
    std::size_t deep_every = 1;
    unsigned jobs = 1;
};

struct EquContext;  // caches cosets per field L
std::shared_ptr<EquContext> make_equ_context(const PhiPair& pair);

Equ6Report verify_equ6(const PhiPair& pair, const AdmissiblePair& pr, EquContext& ctx, bool deep);
Equ6Report verify_equ6(const PhiPair& pair, const AdmissiblePair& pr);
/// Route A only: the two coset products.
std::pair<RootOfUnity, RootOfUnity> route_a(const PhiPair& pair, const AdmissiblePair& pr, EquContext& ctx);

struct FamilyReport {
    std::vector<Equ6Report> reports;
    std::size_t passed = 0, failed = 0, deep = 0;
    double seconds = 0;
    bool pass() const { return failed == 0 && !reports.empty(); }
};
FamilyReport verify_equ6_family(const PhiPair& pair, const std::vector<AdmissiblePair>& pairs, const Equ6Options& opt = {});

struct R1Report {
    std::size_t characters = 0, equal = 0, ratio_ok = 0, ramified = 0;
    std::vector<std::string> failures;  // first few
    double seconds = 0;
    bool pass() const { return characters > 0 && equal == characters && ratio_ok == characters && ramified == characters; }
};
/// Every chi of F^x with conductor <= bound: chi(p) in mu_{p-1}, all tame parts, all gamma classes.
R1Report verify_r1_gamma(const PhiPair& pair, int conductor_bound, unsigned jobs = 1);

struct SearchReport {
    std::size_t examined = 0;
    std::optional<AdmissiblePair> found;
    RootOfUnity ratio;
    bool reverified = false;             // Route A recomputed from scratch
    bool r1_shape_distinguishes = false; // lambda restricted to F
    double seconds = 0;
};
SearchReport search_distinguisher(const PhiPair& pair, unsigned r, int conductor_bound);

} // namespace lcs::lab
