#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lcs/local/residue.hpp"

namespace lcs::local {

/// Shape of a tame field in standard form:
///   O_T = W(F_q)[pi] / (pi^e - zeta^u p),
/// where zeta is the Teichmueller lift of the class of x in F_p[x]/(g0).
struct FieldSpec {
    u64 p = 0;
    unsigned f = 1;
    unsigned e = 1;
    u64 u = 0;
    Poly g0;

    u64 q() const { return nt::ipow(p, f); }
    unsigned degree() const { return f * e; }
    bool operator==(const FieldSpec& o) const = default;
};

/// One step of a tower over the current top field.
struct Step {
    enum class Kind { Unramified, TameRamified };
    Kind kind = Kind::Unramified;
    unsigned degree = 1;
    /// TameRamified only: new_pi^degree = zeta^unit_exp * old_pi.
    i64 unit_exp = 0;

    static Step unramified(unsigned f) { return {Kind::Unramified, f, 0}; }
    static Step ramified(unsigned e, i64 unit_exp = 0) { return {Kind::TameRamified, e, unit_exp}; }
};

/// Raw ring element: slot j*f + i holds the Z/p^K coefficient of pi^j zeta^i.
using Raw = std::vector<u64>;

class TowerField;
using FieldPtr = std::shared_ptr<const TowerField>;

/// A truncated tame extension of Q_p.  Immutable after construction.
class TowerField {
public:
    /// Build the field of the given spec, storing p-adic coefficients to `digits` digits.
    static FieldPtr make(FieldSpec spec, unsigned digits);

    const FieldSpec& spec() const { return spec_; }
    u64 p() const { return spec_.p; }
    unsigned f() const { return spec_.f; }
    unsigned e() const { return spec_.e; }
    u64 u() const { return spec_.u; }
    u64 q() const { return q_; }
    unsigned degree() const { return spec_.e * spec_.f; }
    unsigned digits() const { return K_; }
    u64 pK() const { return pK_; }
    /// Largest relative precision (in powers of the maximal ideal) an element can carry.
    int max_precision() const { return static_cast<int>(spec_.e * K_); }
    const ResidueField& residue() const { return res_; }
    std::string name() const;
    bool same_as(const TowerField& o) const { return spec_ == o.spec_ && K_ == o.K_; }

    // --- unramified ring W = (Z/p^K)[zeta]/(g) -----------------------------
    const Poly& witt_modulus() const { return g_; }
    Poly w_mul(const Poly& a, const Poly& b) const;
    Poly w_add(const Poly& a, const Poly& b) const;
    /// zeta^k, k any integer.
    Poly zeta_pow(i64 k) const;
    /// Trace from W to Z_p of zeta^i, i < f.
    u64 witt_trace(unsigned i) const { return trW_[i]; }

    // --- raw ring O_T / p^K -------------------------------------------------
    std::size_t raw_size() const { return spec_.e * spec_.f; }
    Raw raw_zero() const { return Raw(raw_size(), 0); }
    Raw raw_one() const;
    Raw raw_from_int(i64 n) const;
    /// zeta^a pi^j for 0 <= j < e.
    Raw raw_monomial(i64 a, unsigned j) const;
    Raw raw_mul(const Raw& a, const Raw& b) const;
    Raw raw_add(const Raw& a, const Raw& b) const;
    Raw raw_sub(const Raw& a, const Raw& b) const;
    Raw raw_neg(const Raw& a) const;
    Raw raw_scale(const Raw& a, u64 s) const;
    Raw raw_mul_zeta(const Raw& a, i64 k) const;
    /// Multiply by pi^k, k >= 0.
    Raw raw_shift(const Raw& a, unsigned k) const;
    /// Divide by pi^k; requires valuation >= k.  The result is exact modulo P^(r-k)
    /// when the input was exact modulo P^r.
    Raw raw_unshift(const Raw& a, unsigned k) const;
    /// Reduce modulo P^r (r may exceed the storage precision, then no-op).
    void raw_truncate(Raw& a, int r) const;
    /// Valuation in powers of pi; returns max_precision() for zero.
    int raw_val(const Raw& a) const;
    /// Residue class of a (its slot-0 coefficients mod p).
    Poly raw_residue(const Raw& a) const;
    /// Integer trace to Z_p of a raw element (mod p^K).
    u64 raw_trace(const Raw& a) const;

    // --- residue field helpers ----------------------------------------------
    /// Discrete log of a nonzero residue with respect to the class of zeta.
    u64 dlog(const Poly& r) const;

private:
    TowerField() = default;

    FieldSpec spec_;
    unsigned K_ = 1;
    u64 pK_ = 1;
    u64 q_ = 1;
    ResidueField res_;
    Poly g_;
    std::vector<u64> trW_;
    std::vector<Poly> zeta_table_;  // zeta^k for k < q-1 when q is small
    std::vector<std::uint32_t> dlog_table_;
    Poly zeta_u_p_;                 // zeta^u * p in W
};

/// Compose a tower over Q_p into a standard-form field.  The precision k is the
/// minimum relative precision (in powers of the top uniformizer) to support.
FieldPtr make_tower(u64 p, const std::vector<Step>& steps, int k);
/// As make_tower, with the storage precision given directly in p-adic digits.
FieldPtr make_tower_digits(u64 p, const std::vector<Step>& steps, unsigned digits);

/// Field of the given spec with the standard residue polynomial of degree f.
FieldSpec standard_spec(u64 p, unsigned f, unsigned e, u64 u);

/// Lift of a monic F_p polynomial to the minimal polynomial over Z/p^K of the
/// Teichmueller lift of its root.
Poly teichmuller_modulus(u64 p, const Poly& g0, unsigned K);

} // namespace lcs::local
