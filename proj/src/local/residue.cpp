#include "lcs/local/residue.hpp"

#include <algorithm>

namespace lcs::local {

namespace {

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& g, u64 p) {
    const std::size_t f = g.size() - 1;
    std::vector<u64> prod(2 * f, 0);
    for (std::size_t i = 0; i < f; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < f; ++j) prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
    }
    for (std::size_t i = 2 * f - 1; i-- > f;) {
        u64 c = prod[i];
        if (c == 0) continue;
        prod[i] = 0;
        for (std::size_t k = 0; k < f; ++k) prod[i - f + k] = (prod[i - f + k] + (p - c) * g[k]) % p;
    }
    prod.resize(f);
    return prod;
}

Poly poly_powmod(Poly a, u64 e, const Poly& g, u64 p) {
    Poly r(g.size() - 1, 0);
    r[0] = 1 % p;
    while (e) {
        if (e & 1) r = poly_mulmod(r, a, g, p);
        a = poly_mulmod(a, a, g, p);
        e >>= 1;
    }
    return r;
}

Poly x_mod(const Poly& g, u64 p) {
    const std::size_t f = g.size() - 1;
    Poly x(f, 0);
    if (f == 1) x[0] = (p - g[0]) % p;
    else x[1] = 1;
    return x;
}

bool is_one(const Poly& a) {
    if (a.empty() || a[0] != 1) return false;
    return std::all_of(a.begin() + 1, a.end(), [](u64 c) { return c == 0; });
}

} // namespace

bool is_primitive_poly(u64 p, const Poly& g) {
    const unsigned f = static_cast<unsigned>(g.size() - 1);
    if (g.back() != 1 || g[0] == 0) return false;
    u64 q1 = nt::ipow(p, f) - 1;
    Poly x = x_mod(g, p);
    if (!is_one(poly_powmod(x, q1, g, p))) return false;
    for (u64 l : nt::prime_factors(q1))
        if (is_one(poly_powmod(x, q1 / l, g, p))) return false;
    return true;
}

u64 primitive_root(u64 p) {
    if (p == 2) return 1;
    auto fac = nt::prime_factors(p - 1);
    for (u64 g = 2; g < p; ++g) {
        bool ok = true;
        for (u64 l : fac)
            if (nt::powmod(g, (p - 1) / l, p) == 1) ok = false;
        if (ok) return g;
    }
    fail(ErrorKind::InvalidArgument, "no primitive root modulo " + std::to_string(p));
}

ResidueField::ResidueField(u64 p, Poly g0) : p_(p), g0_(std::move(g0)) {
    if (g0_.size() < 2) fail(ErrorKind::InvalidArgument, "residue modulus must have positive degree");
    f_ = static_cast<unsigned>(g0_.size() - 1);
    q_ = nt::ipow(p_, f_);
    order_factors_ = nt::prime_factors(q_ - 1);
}

ResidueField ResidueField::standard(u64 p, unsigned f) {
    if (!nt::is_prime(p)) fail(ErrorKind::InvalidArgument, std::to_string(p) + " is not prime");
    if (f == 1) return ResidueField(p, Poly{(p - primitive_root(p)) % p, 1});
    u64 count = nt::ipow(p, f);
    for (u64 code = 1; code < count; ++code) {
        Poly g(f + 1, 0);
        u64 c = code;
        for (unsigned i = 0; i < f; ++i) {
            g[i] = c % p;
            c /= p;
        }
        g[f] = 1;
        if (is_primitive_poly(p, g)) return ResidueField(p, g);
    }
    fail(ErrorKind::InternalContradiction, "no primitive polynomial found");
}

Poly ResidueField::one() const {
    Poly r(f_, 0);
    r[0] = 1 % p_;
    return r;
}

Poly ResidueField::generator() const { return x_mod(g0_, p_); }

Poly ResidueField::from_int(i64 a) const {
    Poly r(f_, 0);
    r[0] = nt::mod(a, p_);
    return r;
}

Poly ResidueField::add(const Poly& a, const Poly& b) const {
    Poly r(f_);
    for (unsigned i = 0; i < f_; ++i) r[i] = (a[i] + b[i]) % p_;
    return r;
}

Poly ResidueField::sub(const Poly& a, const Poly& b) const {
    Poly r(f_);
    for (unsigned i = 0; i < f_; ++i) r[i] = (a[i] + p_ - b[i]) % p_;
    return r;
}

Poly ResidueField::mul(const Poly& a, const Poly& b) const { return poly_mulmod(a, b, g0_, p_); }

Poly ResidueField::pow(const Poly& a, u64 e) const { return poly_powmod(a, e, g0_, p_); }

Poly ResidueField::scale(const Poly& a, u64 s) const {
    Poly r(f_);
    for (unsigned i = 0; i < f_; ++i) r[i] = nt::mulmod(a[i], s % p_, p_);
    return r;
}

bool ResidueField::is_zero(const Poly& a) const {
    return std::all_of(a.begin(), a.end(), [](u64 c) { return c == 0; });
}

Poly ResidueField::eval(const Poly& poly, const Poly& a) const {
    Poly r = zero();
    for (std::size_t i = poly.size(); i-- > 0;) r = add(mul(r, a), from_int(static_cast<i64>(poly[i] % p_)));
    return r;
}

Poly ResidueField::minpoly(const Poly& a) const {
    // Gaussian elimination on the powers 1, a, a^2, ... until they become dependent.
    // rows[k] holds a reduced vector and the combination of powers producing it.
    std::vector<Poly> basis;  // reduced vectors, each with a pivot
    std::vector<unsigned> pivots;
    std::vector<Poly> combos; // coefficients over powers of a
    Poly power = one();
    for (unsigned d = 0; d <= f_; ++d) {
        Poly vec = power;
        Poly combo(d + 1, 0);
        combo[d] = 1;
        for (std::size_t k = 0; k < basis.size(); ++k) {
            u64 c = vec[pivots[k]];
            if (c == 0) continue;
            for (unsigned i = 0; i < f_; ++i) vec[i] = (vec[i] + (p_ - c) * basis[k][i]) % p_;
            for (std::size_t i = 0; i < combos[k].size(); ++i) combo[i] = (combo[i] + (p_ - c) * combos[k][i]) % p_;
        }
        auto it = std::find_if(vec.begin(), vec.end(), [](u64 c) { return c != 0; });
        if (it == vec.end()) return combo; // monic: leading coefficient is 1
        unsigned piv = static_cast<unsigned>(it - vec.begin());
        u64 inv = nt::invmod(vec[piv], p_);
        for (auto& c : vec) c = nt::mulmod(c, inv, p_);
        for (auto& c : combo) c = nt::mulmod(c, inv, p_);
        basis.push_back(vec);
        pivots.push_back(piv);
        combos.push_back(combo);
        power = mul(power, a);
    }
    fail(ErrorKind::InternalContradiction, "minimal polynomial degree exceeds field degree");
}

u64 ResidueField::order(const Poly& a) const {
    if (is_zero(a)) fail(ErrorKind::DivisionByZero, "order of zero");
    u64 n = q_ - 1;
    for (u64 l : order_factors_)
        while (n % l == 0 && is_one(pow(a, n / l))) n /= l;
    return n;
}

u64 ResidueField::encode(const Poly& a) const {
    u64 c = 0;
    for (unsigned i = f_; i-- > 0;) c = c * p_ + a[i];
    return c;
}

Poly ResidueField::decode(u64 code) const {
    Poly r(f_);
    for (unsigned i = 0; i < f_; ++i) {
        r[i] = code % p_;
        code /= p_;
    }
    return r;
}

} // namespace lcs::local
