#include "lcs/exact/cyclotomic.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>

#include <mpfr.h>

namespace lcs::exact {

namespace {

constexpr u64 kMaxModulus = 1u << 22;

void check_modulus(u64 M) {
    if (M == 0) fail(ErrorKind::InvalidArgument, "cyclotomic modulus must be positive");
    if (M > kMaxModulus) fail(ErrorKind::Capacity, "cyclotomic modulus " + std::to_string(M) + " too large");
}

// Exact division of a by the monic polynomial d (both lowest degree first).
std::vector<i64> poly_exact_div(std::vector<i64> a, const std::vector<i64>& d) {
    const std::size_t dn = d.size() - 1;
    std::vector<i64> q(a.size() - dn, 0);
    for (std::size_t i = a.size(); i-- > dn;) {
        i64 c = a[i];
        q[i - dn] = c;
        if (c == 0) continue;
        for (std::size_t k = 0; k <= dn; ++k) a[i - dn + k] -= c * d[k];
    }
    return q;
}

// Nonzero terms of Phi_M below the leading one.  Phi_M(x) = Phi_rad(M)(x^(M/rad M)) is sparse.
std::vector<std::pair<std::size_t, i64>> sparse_tail(const std::vector<i64>& phi) {
    std::vector<std::pair<std::size_t, i64>> out;
    for (std::size_t k = 0; k + 1 < phi.size(); ++k)
        if (phi[k] != 0) out.emplace_back(k, phi[k]);
    return out;
}

// Reduce a group-ring vector in place modulo Phi_M using 64-bit arithmetic.
// Returns false on overflow, leaving `a` unspecified.
bool reduce_i64(u64 M, std::vector<i64>& a) {
    const auto& phi = cyclotomic_polynomial(M);
    const std::size_t deg = phi.size() - 1;
    const auto tail = sparse_tail(phi);
    for (std::size_t i = a.size(); i-- > deg;) {
        i64 c = a[i];
        if (c == 0) continue;
        a[i] = 0;
        for (const auto& [k, pk] : tail) {
            i64 prod, res;
            if (__builtin_mul_overflow(c, pk, &prod)) return false;
            if (__builtin_sub_overflow(a[i - deg + k], prod, &res)) return false;
            a[i - deg + k] = res;
        }
    }
    a.resize(deg);
    return true;
}

std::vector<BigInt> reduce_big(u64 M, std::vector<BigInt> a) {
    const auto& phi = cyclotomic_polynomial(M);
    const std::size_t deg = phi.size() - 1;
    const auto tail = sparse_tail(phi);
    BigInt prod;
    for (std::size_t i = a.size(); i-- > deg;) {
        if (a[i] == 0) continue;
        BigInt c = a[i];
        a[i] = 0;
        for (const auto& [k, pk] : tail) {
            prod = c * pk;
            a[i - deg + k] -= prod;
        }
    }
    a.resize(deg);
    return a;
}

std::vector<BigInt> reduce_any(u64 M, const std::vector<BigInt>& a) {
    std::vector<i64> small(a.size());
    bool fits = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].fits_slong_p()) {
            fits = false;
            break;
        }
        small[i] = a[i].get_si();
    }
    if (fits && reduce_i64(M, small)) {
        std::vector<BigInt> out(small.size());
        for (std::size_t i = 0; i < small.size(); ++i) out[i] = static_cast<long>(small[i]);
        return out;
    }
    return reduce_big(M, a);
}

} // namespace

RootOfUnity RootOfUnity::make(u64 order, i64 exp) {
    if (order == 0) fail(ErrorKind::InvalidArgument, "root of unity of order 0");
    u64 e = nt::mod(exp, order);
    u64 g = std::gcd(e, order);
    if (e == 0) return {};
    return {order / g, e / g};
}

RootOfUnity RootOfUnity::pow(i64 n) const {
    nt::i64 e = static_cast<i64>(nt::mulmod(exp, nt::mod(n, order), order));
    return make(order, e);
}

u64 RootOfUnity::exponent_in(u64 m) const {
    if (m % order != 0) fail(ErrorKind::InvalidArgument, "root order does not divide target modulus");
    return exp * (m / order);
}

RootOfUnity operator*(const RootOfUnity& a, const RootOfUnity& b) {
    u64 m = nt::lcm(a.order, b.order);
    u64 e = (a.exponent_in(m) + b.exponent_in(m)) % m;
    return RootOfUnity::make(m, static_cast<i64>(e));
}

std::ostream& operator<<(std::ostream& os, const RootOfUnity& r) {
    return os << "zeta_" << r.order << "^" << r.exp;
}

const std::vector<i64>& cyclotomic_polynomial(u64 M) {
    static std::mutex mu;
    static std::map<u64, std::vector<i64>> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(M);
        if (it != cache.end()) return it->second;
    }
    check_modulus(M);
    std::vector<i64> poly(M + 1, 0);
    poly[0] = -1;
    poly[M] = 1;
    for (u64 d : nt::divisors(M)) {
        if (d == M) continue;
        poly = poly_exact_div(std::move(poly), cyclotomic_polynomial(d));
    }
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(M, std::move(poly)).first->second;
}

CycNumber CycNumber::zero(u64 M) {
    check_modulus(M);
    return CycNumber(M, std::vector<BigInt>(nt::euler_phi(M)));
}

CycNumber CycNumber::from_int(const BigInt& n, u64 M) {
    CycNumber z = zero(M);
    z.coeffs_[0] = n;
    return z;
}

CycNumber CycNumber::root(u64 M, i64 k) {
    check_modulus(M);
    std::vector<i64> gr(M, 0);
    gr[nt::mod(k, M)] = 1;
    return from_group_ring(M, gr);
}

CycNumber CycNumber::from_group_ring(u64 M, const std::vector<i64>& counts) {
    check_modulus(M);
    if (counts.size() != M) fail(ErrorKind::InvalidArgument, "group ring vector has wrong length");
    std::vector<i64> a = counts;
    if (reduce_i64(M, a)) {
        std::vector<BigInt> out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = static_cast<long>(a[i]);
        return CycNumber(M, std::move(out));
    }
    std::vector<BigInt> big(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) big[i] = static_cast<long>(counts[i]);
    return CycNumber(M, reduce_big(M, std::move(big)));
}

CycNumber CycNumber::from_group_ring(u64 M, const std::vector<BigInt>& counts) {
    check_modulus(M);
    if (counts.size() != M) fail(ErrorKind::InvalidArgument, "group ring vector has wrong length");
    return CycNumber(M, reduce_any(M, counts));
}

CycNumber CycNumber::from_coeffs(u64 M, std::vector<BigInt> coeffs) {
    check_modulus(M);
    if (coeffs.size() != nt::euler_phi(M)) fail(ErrorKind::InvalidArgument, "coefficient list must have length phi(M)");
    return CycNumber(M, std::move(coeffs));
}

std::vector<BigInt> CycNumber::group_ring(u64 M) const {
    if (M % modulus_ != 0) fail(ErrorKind::InvalidArgument, "group ring modulus must be a multiple");
    std::vector<BigInt> gr(M);
    u64 step = M / modulus_;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) gr[i * step] = coeffs_[i];
    return gr;
}

CycNumber CycNumber::lift(u64 M) const {
    if (M == modulus_) return *this;
    check_modulus(M);
    return CycNumber(M, reduce_any(M, group_ring(M)));
}

bool CycNumber::is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const BigInt& c) { return c == 0; });
}

bool CycNumber::is_integer() const {
    return std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](const BigInt& c) { return c == 0; });
}

CycNumber CycNumber::conj() const {
    std::vector<BigInt> gr(modulus_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) gr[(modulus_ - i) % modulus_] = coeffs_[i];
    return CycNumber(modulus_, reduce_any(modulus_, gr));
}

CycNumber CycNumber::mul_root(const RootOfUnity& r) const {
    if (r.is_one()) return *this;
    u64 M = nt::lcm(modulus_, r.order);
    check_modulus(M);
    std::vector<BigInt> gr(M);
    u64 step = M / modulus_;
    u64 shift = r.exponent_in(M);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) gr[(i * step + shift) % M] = coeffs_[i];
    return CycNumber(M, reduce_any(M, gr));
}

CycNumber CycNumber::scale(const BigInt& s) const {
    CycNumber out = *this;
    for (auto& c : out.coeffs_) c *= s;
    return out;
}

bool CycNumber::divisible_by(const BigInt& d) const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [&](const BigInt& c) { return mpz_divisible_p(c.get_mpz_t(), d.get_mpz_t()) != 0; });
}

CycNumber CycNumber::exact_div(const BigInt& d) const {
    if (!divisible_by(d)) fail(ErrorKind::InvalidArgument, "inexact division of cyclotomic number");
    CycNumber out = *this;
    for (auto& c : out.coeffs_) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), d.get_mpz_t());
    return out;
}

CycNumber operator+(const CycNumber& a, const CycNumber& b) {
    u64 M = nt::lcm(a.modulus_, b.modulus_);
    CycNumber x = a.lift(M), y = b.lift(M);
    for (std::size_t i = 0; i < x.coeffs_.size(); ++i) x.coeffs_[i] += y.coeffs_[i];
    return x;
}

CycNumber operator-(const CycNumber& a) {
    CycNumber x = a;
    for (auto& c : x.coeffs_) c = -c;
    return x;
}

CycNumber operator-(const CycNumber& a, const CycNumber& b) { return a + (-b); }

CycNumber operator*(const CycNumber& a, const CycNumber& b) {
    u64 M = nt::lcm(a.modulus_, b.modulus_);
    CycNumber x = a.lift(M), y = b.lift(M);
    const std::size_t n = x.coeffs_.size();
    // Fast path: 64-bit convolution when the operands are small.
    bool small = true;
    std::vector<i64> xs(n), ys(n);
    for (std::size_t i = 0; i < n && small; ++i) {
        if (!x.coeffs_[i].fits_slong_p() || !y.coeffs_[i].fits_slong_p()) small = false;
        else {
            xs[i] = x.coeffs_[i].get_si();
            ys[i] = y.coeffs_[i].get_si();
        }
    }
    if (small) {
        std::vector<i64> gr(M, 0);
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            if (xs[i] == 0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (ys[j] == 0) continue;
                i64 prod, sum;
                if (__builtin_mul_overflow(xs[i], ys[j], &prod) || __builtin_add_overflow(gr[(i + j) % M], prod, &sum)) {
                    ok = false;
                    break;
                }
                gr[(i + j) % M] = sum;
            }
        }
        if (ok && reduce_i64(M, gr)) {
            std::vector<BigInt> out(gr.size());
            for (std::size_t i = 0; i < gr.size(); ++i) out[i] = static_cast<long>(gr[i]);
            return CycNumber(M, std::move(out));
        }
    }
    std::vector<BigInt> gr(M);
    for (std::size_t i = 0; i < n; ++i) {
        if (x.coeffs_[i] == 0) continue;
        for (std::size_t j = 0; j < n; ++j) gr[(i + j) % M] += x.coeffs_[i] * y.coeffs_[j];
    }
    return CycNumber(M, reduce_big(M, std::move(gr)));
}

bool operator==(const CycNumber& a, const CycNumber& b) {
    if (a.modulus_ == b.modulus_) return a.coeffs_ == b.coeffs_;
    u64 M = nt::lcm(a.modulus_, b.modulus_);
    return a.lift(M).coeffs_ == b.lift(M).coeffs_;
}

std::string CycNumber::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i] == 0) continue;
        if (!first) os << " + ";
        first = false;
        os << coeffs_[i];
        if (i > 0) os << "*z" << modulus_ << "^" << i;
    }
    if (first) os << "0";
    return os.str();
}

// ---------------------------------------------------------------------------

void ScaledCyc::normalize() {
    if (num.is_zero()) {
        qhalf = 0;
        return;
    }
    if (q <= 1) return;
    BigInt bq = static_cast<unsigned long>(q);
    while (num.divisible_by(bq)) {
        num = num.exact_div(bq);
        qhalf += 2;
    }
}

namespace {

u64 common_q(const ScaledCyc& a, const ScaledCyc& b) {
    if (a.q == b.q) return a.q;
    if (a.q <= 1 || (a.qhalf == 0 && b.q > 1)) return b.q;
    if (b.q <= 1 || b.qhalf == 0) return a.q;
    fail(ErrorKind::InvalidArgument, "scaled values refer to different residue field sizes");
}

BigInt qpow(u64 q, int e) {
    BigInt r = 1;
    for (int i = 0; i < e; ++i) r *= static_cast<unsigned long>(q);
    return r;
}

} // namespace

ScaledCyc operator*(const ScaledCyc& a, const ScaledCyc& b) {
    u64 q = common_q(a, b);
    return ScaledCyc(a.num * b.num, a.qhalf + b.qhalf, q);
}

ScaledCyc operator+(const ScaledCyc& a, const ScaledCyc& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    u64 q = common_q(a, b);
    if ((a.qhalf - b.qhalf) % 2 != 0) fail(ErrorKind::InvalidArgument, "cannot add values with different q^(1/2) parity");
    int lo = std::min(a.qhalf, b.qhalf);
    CycNumber x = a.num.scale(qpow(q, (a.qhalf - lo) / 2));
    CycNumber y = b.num.scale(qpow(q, (b.qhalf - lo) / 2));
    return ScaledCyc(x + y, lo, q);
}

ScaledCyc operator/(const ScaledCyc& a, const ScaledCyc& b) {
    if (b.is_zero()) fail(ErrorKind::DivisionByZero, "division by zero scaled value");
    ScaledCyc d = b * b.conj();
    if (!d.num.is_integer()) fail(ErrorKind::Capacity, "denominator norm is not rational; exact quotient unsupported");
    ScaledCyc n = a * b.conj();
    BigInt den = d.num.constant_term();
    if (!n.num.divisible_by(den)) fail(ErrorKind::Capacity, "quotient has non-integral coefficients");
    u64 q = common_q(n, d);
    return ScaledCyc(n.num.exact_div(den), n.qhalf - d.qhalf, q);
}

bool operator==(const ScaledCyc& a, const ScaledCyc& b) {
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
    u64 q = common_q(a, b);
    ScaledCyc x(a.num, a.qhalf, q), y(b.num, b.qhalf, q);
    if ((x.qhalf - y.qhalf) % 2 == 0) return x.qhalf == y.qhalf && x.num == y.num;
    // Parities differ: compare squares exactly, then fix the sign numerically.
    ScaledCyc x2 = x * x, y2 = y * y;
    if (!(x2.qhalf == y2.qhalf && x2.num == y2.num)) return false;
    ComplexApprox ex = embed_complex(x, 160), ey = embed_complex(y, 160);
    double tol = ex.error_bound + ey.error_bound;
    return std::abs(ex.value - ey.value) <= std::max(tol, 1e-30) * 16 + 1e-9 * std::abs(ex.value);
}

// ---------------------------------------------------------------------------

namespace {

struct Mpfr {
    mpfr_t v;
    explicit Mpfr(int prec) { mpfr_init2(v, prec); mpfr_set_zero(v, 1); }
    ~Mpfr() { mpfr_clear(v); }
    Mpfr(const Mpfr&) = delete;
    Mpfr& operator=(const Mpfr&) = delete;
};

std::string mpfr_str(const mpfr_t x, int digits) {
    char buf[256];
    mpfr_snprintf(buf, sizeof buf, "%.*Re", digits - 1, x);
    return buf;
}

} // namespace

ComplexApprox embed_complex(const CycNumber& a, int precision_bits) {
    ScaledCyc s;
    s.num = a;
    s.qhalf = 0;
    s.q = 1;
    return embed_complex(s, precision_bits);
}

ComplexApprox embed_complex(const ScaledCyc& a, int precision_bits) {
    if (precision_bits < 64) fail(ErrorKind::InvalidArgument, "embedding precision must be at least 64 bits");
    const int prec = precision_bits + 16;
    const u64 M = a.num.modulus();
    Mpfr re(prec), im(prec), ang(prec), s(prec), c(prec), pi2(prec), coef(prec), tmp(prec), scale(prec);
    mpfr_const_pi(pi2.v, MPFR_RNDN);
    mpfr_mul_ui(pi2.v, pi2.v, 2, MPFR_RNDN);
    double abs_sum = 0.0;
    const auto& co = a.num.coeffs();
    for (std::size_t i = 0; i < co.size(); ++i) {
        if (co[i] == 0) continue;
        abs_sum += std::abs(co[i].get_d());
        mpfr_mul_ui(ang.v, pi2.v, static_cast<unsigned long>(i), MPFR_RNDN);
        mpfr_div_ui(ang.v, ang.v, static_cast<unsigned long>(M), MPFR_RNDN);
        mpfr_sin_cos(s.v, c.v, ang.v, MPFR_RNDN);
        mpfr_set_z(coef.v, co[i].get_mpz_t(), MPFR_RNDN);
        mpfr_mul(tmp.v, c.v, coef.v, MPFR_RNDN);
        mpfr_add(re.v, re.v, tmp.v, MPFR_RNDN);
        mpfr_mul(tmp.v, s.v, coef.v, MPFR_RNDN);
        mpfr_add(im.v, im.v, tmp.v, MPFR_RNDN);
    }
    // scale = q^(qhalf/2)
    mpfr_set_ui(scale.v, static_cast<unsigned long>(std::max<u64>(a.q, 1)), MPFR_RNDN);
    mpfr_set_si(tmp.v, a.qhalf, MPFR_RNDN);
    mpfr_div_ui(tmp.v, tmp.v, 2, MPFR_RNDN);
    mpfr_pow(scale.v, scale.v, tmp.v, MPFR_RNDN);
    mpfr_mul(re.v, re.v, scale.v, MPFR_RNDN);
    mpfr_mul(im.v, im.v, scale.v, MPFR_RNDN);

    ComplexApprox out;
    out.value = {mpfr_get_d(re.v, MPFR_RNDN), mpfr_get_d(im.v, MPFR_RNDN)};
    const double sc = mpfr_get_d(scale.v, MPFR_RNDN);
    // Each term carries O(1) ulp of error at working precision, plus the final double rounding.
    out.error_bound = (abs_sum + static_cast<double>(co.size()) + 1.0) * sc * std::ldexp(1.0, -(prec - 4)) +
                      std::abs(out.value) * std::ldexp(1.0, -52);
    out.re = mpfr_str(re.v, 15);
    out.im = mpfr_str(im.v, 15);
    return out;
}

} // namespace lcs::exact
