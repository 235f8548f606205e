#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "lcs/exact/numtheory.hpp"

namespace lcs::exact {

using BigInt = mpz_class;
using nt::u64;
using nt::i64;

/// A root of unity zeta_order^exp, kept with the smallest order that represents it.
struct RootOfUnity {
    u64 order = 1;
    u64 exp = 0;

    static RootOfUnity make(u64 order, i64 exp);
    static RootOfUnity one() { return {}; }

    bool is_one() const { return exp == 0; }
    RootOfUnity inv() const { return make(order, -static_cast<i64>(exp)); }
    RootOfUnity pow(i64 n) const;
    /// Exponent of this root relative to a primitive `m`-th root; `order` must divide m.
    u64 exponent_in(u64 m) const;

    friend RootOfUnity operator*(const RootOfUnity& a, const RootOfUnity& b);
    friend RootOfUnity operator/(const RootOfUnity& a, const RootOfUnity& b) { return a * b.inv(); }
    friend bool operator==(const RootOfUnity& a, const RootOfUnity& b) { return a.order == b.order && a.exp == b.exp; }
};

std::ostream& operator<<(std::ostream& os, const RootOfUnity& r);

/// Integer coefficients of the M-th cyclotomic polynomial, lowest degree first.
const std::vector<i64>& cyclotomic_polynomial(u64 M);

/// Element of Z[zeta_M], stored in the power basis 1, zeta, ..., zeta^{phi(M)-1}
/// reduced modulo the M-th cyclotomic polynomial.
class CycNumber {
public:
    CycNumber() : modulus_(1), coeffs_(1) {}

    static CycNumber zero(u64 M = 1);
    static CycNumber from_int(const BigInt& n, u64 M = 1);
    /// zeta_M^k
    static CycNumber root(u64 M, i64 k);
    static CycNumber from_root(const RootOfUnity& r) { return root(r.order, static_cast<i64>(r.exp)); }
    /// Sum of counts[k] * zeta_M^k for k in [0, M).
    static CycNumber from_group_ring(u64 M, const std::vector<i64>& counts);
    static CycNumber from_group_ring(u64 M, const std::vector<BigInt>& counts);
    /// Build from an already reduced coefficient list of length phi(M).
    static CycNumber from_coeffs(u64 M, std::vector<BigInt> coeffs);

    u64 modulus() const { return modulus_; }
    const std::vector<BigInt>& coeffs() const { return coeffs_; }

    /// Same number expressed over a multiple of the modulus.
    CycNumber lift(u64 M) const;

    bool is_zero() const;
    /// True when the value is an ordinary integer.
    bool is_integer() const;
    BigInt constant_term() const { return coeffs_[0]; }

    CycNumber conj() const;
    CycNumber mul_root(const RootOfUnity& r) const;
    CycNumber scale(const BigInt& s) const;
    bool divisible_by(const BigInt& d) const;
    CycNumber exact_div(const BigInt& d) const;

    friend CycNumber operator+(const CycNumber& a, const CycNumber& b);
    friend CycNumber operator-(const CycNumber& a, const CycNumber& b);
    friend CycNumber operator-(const CycNumber& a);
    friend CycNumber operator*(const CycNumber& a, const CycNumber& b);
    friend bool operator==(const CycNumber& a, const CycNumber& b);
    friend bool operator!=(const CycNumber& a, const CycNumber& b) { return !(a == b); }

    std::string to_string() const;

private:
    CycNumber(u64 M, std::vector<BigInt> c) : modulus_(M), coeffs_(std::move(c)) {}
    std::vector<BigInt> group_ring(u64 M) const;

    u64 modulus_;
    std::vector<BigInt> coeffs_;
};

struct ComplexApprox {
    std::complex<double> value;
    double error_bound = 0.0;
    std::string re;
    std::string im;
};

/// num * q^(qhalf/2): the value domain of Gauss sums and epsilon factors.
struct ScaledCyc {
    CycNumber num;
    int qhalf = 0;
    u64 q = 1;

    ScaledCyc() = default;
    ScaledCyc(CycNumber n, int qh, u64 qq) : num(std::move(n)), qhalf(qh), q(qq) { normalize(); }
    static ScaledCyc one() { return ScaledCyc(CycNumber::from_int(1), 0, 1); }

    void normalize();
    bool is_zero() const { return num.is_zero(); }
    ScaledCyc conj() const { return ScaledCyc(num.conj(), qhalf, q); }
    ScaledCyc mul_root(const RootOfUnity& r) const { return ScaledCyc(num.mul_root(r), qhalf, q); }

    friend ScaledCyc operator*(const ScaledCyc& a, const ScaledCyc& b);
    friend ScaledCyc operator+(const ScaledCyc& a, const ScaledCyc& b);
    /// Exact quotient a/b, using b * conj(b); requires that product to be an integer times a power of q^(1/2).
    friend ScaledCyc operator/(const ScaledCyc& a, const ScaledCyc& b);
    friend bool operator==(const ScaledCyc& a, const ScaledCyc& b);
    friend bool operator!=(const ScaledCyc& a, const ScaledCyc& b) { return !(a == b); }
};

/// Complex value at the principal embedding zeta_M -> exp(2 pi i / M), computed with MPFR.
ComplexApprox embed_complex(const CycNumber& a, int precision_bits = 128);
ComplexApprox embed_complex(const ScaledCyc& a, int precision_bits = 128);

} // namespace lcs::exact
