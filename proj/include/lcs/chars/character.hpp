#pragma once

#include <memory>
#include <random>
#include <vector>

#include "lcs/exact/cyclotomic.hpp"
#include "lcs/local/embedding.hpp"

namespace lcs::chars {

using exact::RootOfUnity;
using local::Embedding;
using local::FieldPtr;
using local::RelativeExtension;
using local::Subfield;
using local::TowerElement;
using nt::i64;
using nt::u64;

/// psi_T = psi_F o tr_{T/F}, where psi_F(y) = exp(2 pi i {y/p}) has level one.
/// Requires x known modulo P_T.
RootOfUnity psi(const TowerElement& x);

/// Multiplicative character of T^x.
class Character {
public:
    virtual ~Character() = default;
    virtual const FieldPtr& field() const = 0;
    /// theta(x); x must be certified to relative precision >= conductor().
    virtual RootOfUnity eval(const TowerElement& x) const = 0;
    virtual int conductor() const = 0;
    /// Exact representative of c_theta: theta(1+x) = psi(c_theta x) on P^r,
    /// r = floor((c+1)/2).  Requires conductor >= 2.
    virtual TowerElement c_theta() const = 0;
};

/// theta(pi^v zeta^s (1+w)) = wvalue^v * zeta_{q-1}^(t s) * psi(gamma log(1+w)),
/// with gamma kept modulo O_T.  Needs p - 1 > e when gamma is nonzero.
class MulChar : public Character {
public:
    MulChar() = default;
    MulChar(FieldPtr T, RootOfUnity wvalue, u64 tame, TowerElement gamma);
    static MulChar trivial(const FieldPtr& T);
    /// Random character with the given conductor and a random root of unity of order dividing q-1 on pi.
    static MulChar random(const FieldPtr& T, int conductor, std::mt19937_64& rng);

    const FieldPtr& field() const override { return T_; }
    RootOfUnity eval(const TowerElement& x) const override;
    int conductor() const override;
    TowerElement c_theta() const override;

    const RootOfUnity& wvalue() const { return w_; }
    u64 tame() const { return t_; }
    const TowerElement& gamma() const { return gamma_; }
    /// Leading monomial zeta^a pi^v of gamma, as (a, v).
    std::pair<u64, i64> standard_rep() const;
    TowerElement standard_rep_element() const;

    MulChar inv() const;
    MulChar pow(i64 n) const;
    bool is_trivial() const;
    friend MulChar operator*(const MulChar& a, const MulChar& b);
    friend bool operator==(const MulChar& a, const MulChar& b);
    friend bool operator!=(const MulChar& a, const MulChar& b) { return !(a == b); }

private:
    FieldPtr T_;
    RootOfUnity w_;
    u64 t_ = 0;
    TowerElement gamma_;
};

/// theta o N_{K/S} for theta on S, given rel : S -> K.
MulChar inflate(const MulChar& theta, const RelativeExtension& rel);
/// theta o iota for theta on K, given rel : B -> K.
MulChar restrict_to(const MulChar& theta, const RelativeExtension& rel);

/// Product of characters chi_k o N_{K/S_k} on a field K where log may be unavailable.
class NormComposite : public Character {
public:
    struct Part {
        MulChar chi;
        std::shared_ptr<const RelativeExtension> rel;  // S_k -> K
    };
    NormComposite(FieldPtr K, std::vector<Part> parts);

    const FieldPtr& field() const override { return K_; }
    RootOfUnity eval(const TowerElement& x) const override;
    int conductor() const override { return conductor_; }
    /// Sum of the images of the component gammas, truncated modulo P^(1-r).
    TowerElement c_theta() const override;

private:
    FieldPtr K_;
    std::vector<Part> parts_;
    int conductor_ = 0;
};

/// Conductor by scanning theta on 1 + zeta^i pi^n, layer by layer, up to `bound`.
int conductor_by_scan(const Character& theta, int bound);
/// Checks theta(1+x) = psi(c x) on the additive spanning set zeta^i pi^n, r <= n < c.
bool check_c_theta(const Character& theta, const TowerElement& c);

// Admissibility and the Howe factorization.

/// True when theta = eta o N_{E/S} for some character eta of S.
bool comes_from(const MulChar& theta, const Subfield& S);
/// True when theta restricted to 1 + P_E factors through N_{E/S}.
bool principal_comes_from(const MulChar& theta, const Subfield& S);

/// Subfields S with B <= S <= E (B included, E included).
std::vector<Subfield> intermediate_fields(const FieldPtr& E, const Subfield& B);

/// theta on E, generic over the subfield B.  Conductor one is supported only for
/// unramified E/B; ramified conductor-one inputs throw UnsupportedShape.
bool is_generic(const MulChar& theta, const Subfield& B);
/// (E/B, theta) admissible.
bool is_admissible(const MulChar& theta, const Subfield& B);

struct HoweFactor {
    Subfield field;       // F_k inside E
    MulChar phi;          // on F_k, generic over F_{k-1}
    int conductor_on_E;   // conductor of phi o N_{E/F_k}
};

struct HoweFactorization {
    Subfield base;
    MulChar chi;                      // on the base
    std::vector<HoweFactor> factors;  // increasing fields, decreasing conductors
};

/// theta = chi o N * prod phi_k o N.  Only the last factor carries the value on
/// pi_E and the tame part; every other factor is trivial on both.
HoweFactorization howe_factorize(const MulChar& theta, const Subfield& B);
/// The product of the inflated factors, for round-trip checks.
MulChar howe_product(const HoweFactorization& h, const FieldPtr& E);

} // namespace lcs::chars
