#pragma once

#include <cstdint>
#include <vector>

#include "lcs/exact/numtheory.hpp"

namespace lcs::local {

using nt::i64;
using nt::u64;

/// Polynomial over Z/m, lowest degree first.
using Poly = std::vector<u64>;

/// The finite field F_p[x]/(g0) with g0 monic of degree f.  Elements are
/// coefficient vectors of length f.  No tables: usable for large q.
class ResidueField {
public:
    ResidueField() = default;
    ResidueField(u64 p, Poly g0);

    /// Field of degree f over F_p defined by the smallest primitive polynomial
    /// (for f = 1: x - g with g the smallest primitive root).
    static ResidueField standard(u64 p, unsigned f);

    u64 p() const { return p_; }
    unsigned degree() const { return f_; }
    u64 size() const { return q_; }
    const Poly& modulus() const { return g0_; }

    Poly zero() const { return Poly(f_, 0); }
    Poly one() const;
    /// The class of x, a primitive element.
    Poly generator() const;
    Poly from_int(i64 a) const;

    Poly add(const Poly& a, const Poly& b) const;
    Poly sub(const Poly& a, const Poly& b) const;
    Poly mul(const Poly& a, const Poly& b) const;
    Poly pow(const Poly& a, u64 e) const;
    Poly scale(const Poly& a, u64 s) const;
    bool is_zero(const Poly& a) const;

    /// generator()^k
    Poly gen_pow(u64 k) const { return pow(generator(), k); }
    /// Monic minimal polynomial over F_p of a.
    Poly minpoly(const Poly& a) const;
    /// Evaluate a polynomial with F_p coefficients at a.
    Poly eval(const Poly& poly, const Poly& a) const;
    /// Multiplicative order of a nonzero element.
    u64 order(const Poly& a) const;

    /// Integer code sum a_i p^i, for table lookups in small fields.
    u64 encode(const Poly& a) const;
    Poly decode(u64 code) const;

private:
    u64 p_ = 2;
    unsigned f_ = 1;
    u64 q_ = 2;
    Poly g0_;
    std::vector<u64> order_factors_;
};

/// True when the monic polynomial g (degree f) over F_p is primitive.
bool is_primitive_poly(u64 p, const Poly& g);

/// Smallest primitive root modulo the prime p.
u64 primitive_root(u64 p);

} // namespace lcs::local
