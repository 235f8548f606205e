#pragma once

#include <string>

#include "lcs/local/field.hpp"

namespace lcs::local {

/// x = pi^v * unit, with unit known modulo P^relprec; or a zero known modulo P^absprec.
class TowerElement {
public:
    /// Absolute precision of an exact zero.
    static constexpr int kExact = 1 << 28;

    TowerElement() = default;

    static TowerElement zero(FieldPtr F, int absprec = kExact);
    static TowerElement from_int(FieldPtr F, i64 n);
    /// zeta^a * pi^v, exact.
    static TowerElement monomial(FieldPtr F, i64 a, i64 v);
    static TowerElement uniformizer(FieldPtr F) { return monomial(F, 0, 1); }
    /// 1/p as a monomial.
    static TowerElement p_inverse(FieldPtr F);
    /// Element with integral raw representation known modulo P^absprec.
    static TowerElement from_raw(FieldPtr F, const Raw& raw, int absprec);
    /// pi^v * unit with unit given in raw form (must have nonzero residue).
    static TowerElement from_unit(FieldPtr F, i64 v, Raw unit, int relprec);
    /// Teichmueller lift of a residue class (zero maps to exact zero).
    static TowerElement teichmuller(FieldPtr F, const Poly& residue);

    const FieldPtr& field() const { return F_; }
    bool is_zero() const { return zero_; }
    /// Valuation; for a zero returns its absolute precision.
    i64 valuation() const { return v_; }
    int relprec() const { return zero_ ? 0 : rel_; }
    i64 absprec() const { return zero_ ? v_ : v_ + rel_; }
    const Raw& unit() const { return unit_; }
    /// Residue of the unit part.
    Poly unit_residue() const;

    /// Integral raw representation modulo P^min(absprec, a); requires valuation >= 0.
    Raw raw(int a = kExact) const;
    /// Reduce to absolute precision a.
    TowerElement truncated(i64 a) const;

    TowerElement inv() const;
    TowerElement pow(i64 n) const;
    TowerElement mul_zeta(i64 k) const;

    friend TowerElement operator+(const TowerElement& x, const TowerElement& y);
    friend TowerElement operator-(const TowerElement& x, const TowerElement& y);
    friend TowerElement operator-(const TowerElement& x);
    friend TowerElement operator*(const TowerElement& x, const TowerElement& y);
    friend TowerElement operator/(const TowerElement& x, const TowerElement& y) { return x * y.inv(); }
    /// Equality at the common precision.
    friend bool operator==(const TowerElement& x, const TowerElement& y) { return (x - y).is_zero(); }
    friend bool operator!=(const TowerElement& x, const TowerElement& y) { return !(x == y); }

    std::string to_string() const;

private:
    FieldPtr F_;
    bool zero_ = true;
    i64 v_ = kExact;
    int rel_ = 0;
    Raw unit_;
};

/// x = pi^v * zeta^t * (1 + w).
struct UnitDecomposition {
    i64 v = 0;
    u64 t = 0;
    TowerElement principal;
};

UnitDecomposition decompose(const TowerElement& x);

/// log on 1 + P; requires p - 1 > e.
TowerElement log_principal(const TowerElement& u);
/// exp on P; requires p - 1 > e.
TowerElement exp_principal(const TowerElement& x);

} // namespace lcs::local
