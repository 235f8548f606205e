#include "lcs/local/field.hpp"

#include <algorithm>
#include <sstream>

namespace lcs::local {

namespace {

using nt::u128;

constexpr u64 kMaxModulus = u64(1) << 60;
constexpr u64 kDlogTableLimit = u64(1) << 22;
constexpr u64 kZetaTableLimit = u64(1) << 16;

inline u64 addm(u64 a, u64 b, u64 m) {
    u64 s = a + b;
    return s >= m ? s - m : s;
}

inline u64 subm(u64 a, u64 b, u64 m) { return a >= b ? a - b : a + m - b; }

// a*b mod (g, m) for g monic of degree f; a, b of length f.
Poly mul_mod_poly(const Poly& a, const Poly& b, const Poly& g, u64 m) {
    const std::size_t f = g.size() - 1;
    if (f == 1) return Poly{nt::mulmod(a[0], b[0], m)};
    std::vector<u128> acc(2 * f - 1, 0);
    for (std::size_t i = 0; i < f; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < f; ++j) acc[i + j] += static_cast<u128>(a[i]) * b[j];
    }
    Poly prod(2 * f - 1);
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = static_cast<u64>(acc[i] % m);
    for (std::size_t i = prod.size(); i-- > f;) {
        u64 c = prod[i];
        if (c == 0) continue;
        for (std::size_t k = 0; k < f; ++k) prod[i - f + k] = subm(prod[i - f + k], nt::mulmod(c, g[k], m), m);
    }
    prod.resize(f);
    return prod;
}

Poly pow_mod_poly(Poly a, u64 e, const Poly& g, u64 m) {
    Poly r(g.size() - 1, 0);
    r[0] = 1 % m;
    while (e) {
        if (e & 1) r = mul_mod_poly(r, a, g, m);
        a = mul_mod_poly(a, a, g, m);
        e >>= 1;
    }
    return r;
}

int vp_mod(u64 c, u64 p, unsigned K) {
    if (c == 0) return static_cast<int>(K);
    int v = 0;
    while (c % p == 0) {
        c /= p;
        ++v;
    }
    return v;
}

} // namespace

Poly teichmuller_modulus(u64 p, const Poly& g0, unsigned K) {
    const std::size_t f = g0.size() - 1;
    const u64 m = nt::ipow(p, K);
    const u64 q = nt::ipow(p, static_cast<unsigned>(f));
    Poly x(f, 0);
    if (f == 1) x[0] = (p - g0[0]) % p;
    else x[1] = 1;
    // omega = lim x^(q^n): K rounds of raising to the q-th power fix it modulo p^K.
    Poly omega = x;
    for (unsigned i = 0; i < K; ++i) omega = pow_mod_poly(omega, q, g0, m);
    // prod_{i<f} (Y - omega^(p^i)), coefficients in (Z/p^K)[x]/(g0).
    std::vector<Poly> poly{Poly(f, 0)};
    poly[0][0] = 1 % m;
    Poly conj = omega;
    for (std::size_t i = 0; i < f; ++i) {
        std::vector<Poly> next(poly.size() + 1, Poly(f, 0));
        for (std::size_t k = 0; k < poly.size(); ++k) {
            for (std::size_t t = 0; t < f; ++t) next[k + 1][t] = addm(next[k + 1][t], poly[k][t], m);
            Poly prod = mul_mod_poly(poly[k], conj, g0, m);
            for (std::size_t t = 0; t < f; ++t) next[k][t] = subm(next[k][t], prod[t], m);
        }
        poly = std::move(next);
        conj = pow_mod_poly(conj, p, g0, m);
    }
    Poly g(f + 1);
    for (std::size_t k = 0; k <= f; ++k) {
        for (std::size_t t = 1; t < f; ++t)
            if (poly[k][t] != 0) fail(ErrorKind::InternalContradiction, "Teichmueller minimal polynomial is not defined over Z_p");
        g[k] = poly[k][0];
    }
    return g;
}

FieldSpec standard_spec(u64 p, unsigned f, unsigned e, u64 u) {
    FieldSpec s;
    s.p = p;
    s.f = f;
    s.e = e;
    s.g0 = ResidueField::standard(p, f).modulus();
    s.u = u % (s.q() - 1);
    return s;
}

FieldPtr TowerField::make(FieldSpec spec, unsigned digits) {
    if (!nt::is_prime(spec.p) || spec.p == 2) fail(ErrorKind::InvalidArgument, "residue characteristic must be an odd prime");
    if (spec.e == 0 || spec.f == 0) fail(ErrorKind::InvalidArgument, "field degrees must be positive");
    if (spec.e % spec.p == 0) fail(ErrorKind::WildRamification, "ramification index divisible by p");
    if (spec.g0.size() != spec.f + 1) fail(ErrorKind::InvalidArgument, "residue polynomial has wrong degree");
    if (digits == 0) fail(ErrorKind::InvalidArgument, "storage precision must be positive");
    if (spec.e * spec.f > 256) fail(ErrorKind::Capacity, "field degree too large");

    auto F = std::shared_ptr<TowerField>(new TowerField());
    F->spec_ = spec;
    F->K_ = digits;
    u64 pK = 1;
    for (unsigned i = 0; i < digits; ++i) {
        if (pK > kMaxModulus / spec.p) fail(ErrorKind::Capacity, "p^K exceeds 2^60");
        pK *= spec.p;
    }
    F->pK_ = pK;
    F->q_ = spec.q();
    F->spec_.u = spec.u % (F->q_ - 1);
    F->res_ = ResidueField(spec.p, spec.g0);
    if (!is_primitive_poly(spec.p, spec.g0)) fail(ErrorKind::InvalidArgument, "residue polynomial is not primitive");
    F->g_ = teichmuller_modulus(spec.p, spec.g0, digits);

    const unsigned f = spec.f;
    if (F->q_ - 1 <= kZetaTableLimit) {
        F->zeta_table_.reserve(F->q_ - 1);
        Poly z(f, 0);
        z[0] = 1 % pK;
        Poly zeta(f, 0);
        if (f == 1) zeta[0] = (pK - F->g_[0]) % pK;
        else zeta[1] = 1;
        for (u64 k = 0; k + 1 < F->q_; ++k) {
            F->zeta_table_.push_back(z);
            z = mul_mod_poly(z, zeta, F->g_, pK);
        }
    }
    F->trW_.resize(f);
    for (unsigned i = 0; i < f; ++i) {
        Poly s(f, 0);
        Poly c = F->zeta_pow(i);
        for (unsigned k = 0; k < f; ++k) {
            s = F->w_add(s, c);
            c = pow_mod_poly(c, spec.p, F->g_, pK);
        }
        for (unsigned t = 1; t < f; ++t)
            if (s[t] != 0) fail(ErrorKind::InternalContradiction, "trace of zeta power is not rational");
        F->trW_[i] = s[0];
    }
    if (F->q_ <= kDlogTableLimit) {
        F->dlog_table_.assign(F->q_, 0);
        Poly r = F->res_.one();
        Poly gen = F->res_.generator();
        for (u64 k = 0; k + 1 < F->q_; ++k) {
            F->dlog_table_[F->res_.encode(r)] = static_cast<std::uint32_t>(k);
            r = F->res_.mul(r, gen);
        }
    }
    Poly zu = F->zeta_pow(static_cast<i64>(F->spec_.u));
    for (auto& c : zu) c = nt::mulmod(c, spec.p, pK);
    F->zeta_u_p_ = zu;
    return F;
}

std::string TowerField::name() const {
    std::ostringstream os;
    os << "Q" << spec_.p << "(f=" << spec_.f << ",e=" << spec_.e << ",u=" << spec_.u << ",g0=[";
    for (std::size_t i = 0; i < spec_.g0.size(); ++i) os << (i ? "," : "") << spec_.g0[i];
    os << "])";
    return os.str();
}

Poly TowerField::w_mul(const Poly& a, const Poly& b) const { return mul_mod_poly(a, b, g_, pK_); }

Poly TowerField::w_add(const Poly& a, const Poly& b) const {
    Poly r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = addm(a[i], b[i], pK_);
    return r;
}

Poly TowerField::zeta_pow(i64 k) const {
    u64 kk = nt::mod(k, q_ - 1);
    if (!zeta_table_.empty()) return zeta_table_[kk];
    Poly zeta(spec_.f, 0);
    if (spec_.f == 1) zeta[0] = (pK_ - g_[0]) % pK_;
    else zeta[1] = 1;
    return pow_mod_poly(zeta, kk, g_, pK_);
}

Raw TowerField::raw_one() const { return raw_from_int(1); }

Raw TowerField::raw_from_int(i64 n) const {
    Raw r = raw_zero();
    r[0] = nt::mod(n, pK_);
    return r;
}

Raw TowerField::raw_monomial(i64 a, unsigned j) const {
    if (j >= spec_.e) fail(ErrorKind::InvalidArgument, "monomial pi-exponent out of range");
    Raw r = raw_zero();
    Poly z = zeta_pow(a);
    std::copy(z.begin(), z.end(), r.begin() + j * spec_.f);
    return r;
}

Raw TowerField::raw_mul(const Raw& a, const Raw& b) const {
    const unsigned e = spec_.e, f = spec_.f;
    const std::size_t W = 2 * f - 1;
    std::vector<u128> acc((2 * e - 1) * W, 0);
    for (unsigned j1 = 0; j1 < e; ++j1) {
        for (unsigned i1 = 0; i1 < f; ++i1) {
            u64 x = a[j1 * f + i1];
            if (x == 0) continue;
            for (unsigned j2 = 0; j2 < e; ++j2) {
                u128* row = &acc[(j1 + j2) * W + i1];
                const u64* bb = &b[j2 * f];
                for (unsigned i2 = 0; i2 < f; ++i2) row[i2] += static_cast<u128>(x) * bb[i2];
            }
        }
    }
    std::vector<Poly> slots(2 * e - 1);
    for (unsigned j = 0; j < 2 * e - 1; ++j) {
        Poly s(W);
        bool nz = false;
        for (std::size_t i = 0; i < W; ++i) {
            s[i] = static_cast<u64>(acc[j * W + i] % pK_);
            nz |= s[i] != 0;
        }
        if (!nz) {
            slots[j] = Poly(f, 0);
            continue;
        }
        for (std::size_t i = W; i-- > f;) {
            u64 c = s[i];
            if (c == 0) continue;
            for (unsigned k = 0; k < f; ++k) s[i - f + k] = subm(s[i - f + k], nt::mulmod(c, g_[k], pK_), pK_);
        }
        s.resize(f);
        slots[j] = std::move(s);
    }
    Raw r(e * f);
    for (unsigned j = 0; j < e; ++j) {
        Poly s = slots[j];
        if (j + e < 2 * e - 1) {
            const Poly& hi = slots[j + e];
            if (std::any_of(hi.begin(), hi.end(), [](u64 c) { return c != 0; })) s = w_add(s, w_mul(hi, zeta_u_p_));
        }
        std::copy(s.begin(), s.end(), r.begin() + j * f);
    }
    return r;
}

Raw TowerField::raw_add(const Raw& a, const Raw& b) const {
    Raw r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = addm(a[i], b[i], pK_);
    return r;
}

Raw TowerField::raw_sub(const Raw& a, const Raw& b) const {
    Raw r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = subm(a[i], b[i], pK_);
    return r;
}

Raw TowerField::raw_neg(const Raw& a) const {
    Raw r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] == 0 ? 0 : pK_ - a[i];
    return r;
}

Raw TowerField::raw_scale(const Raw& a, u64 s) const {
    Raw r(a.size());
    s %= pK_;
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = nt::mulmod(a[i], s, pK_);
    return r;
}

Raw TowerField::raw_mul_zeta(const Raw& a, i64 k) const {
    if (nt::mod(k, q_ - 1) == 0) return a;
    const unsigned e = spec_.e, f = spec_.f;
    Poly z = zeta_pow(k);
    Raw r(a.size());
    for (unsigned j = 0; j < e; ++j) {
        Poly s(a.begin() + j * f, a.begin() + (j + 1) * f);
        Poly t = w_mul(s, z);
        std::copy(t.begin(), t.end(), r.begin() + j * f);
    }
    return r;
}

Raw TowerField::raw_shift(const Raw& a, unsigned k) const {
    const unsigned e = spec_.e, f = spec_.f;
    Raw cur = a;
    unsigned full = k / e, rest = k % e;
    if (full > 0) {
        // pi^e = zeta^u p: multiply by (zeta^u p)^full.
        Poly mult(f, 0);
        mult[0] = 1 % pK_;
        for (unsigned i = 0; i < full; ++i) mult = w_mul(mult, zeta_u_p_);
        for (unsigned j = 0; j < e; ++j) {
            Poly s(cur.begin() + j * f, cur.begin() + (j + 1) * f);
            Poly t = w_mul(s, mult);
            std::copy(t.begin(), t.end(), cur.begin() + j * f);
        }
    }
    if (rest == 0) return cur;
    Raw r(cur.size(), 0);
    for (unsigned j = 0; j < e; ++j) {
        Poly s(cur.begin() + j * f, cur.begin() + (j + 1) * f);
        unsigned t = j + rest;
        if (t >= e) {
            s = w_mul(s, zeta_u_p_);
            t -= e;
        }
        std::copy(s.begin(), s.end(), r.begin() + t * f);
    }
    return r;
}

Raw TowerField::raw_unshift(const Raw& a, unsigned k) const {
    const unsigned e = spec_.e, f = spec_.f;
    const u64 p = spec_.p;
    Raw cur = a;
    Poly zinv = zeta_pow(-static_cast<i64>(spec_.u));
    for (unsigned step = 0; step < k; ++step) {
        Poly low(cur.begin(), cur.begin() + f);
        for (auto& c : low) {
            if (c % p != 0) fail(ErrorKind::InternalContradiction, "division by pi of a unit");
            c /= p;
        }
        low = w_mul(low, zinv);
        Raw r(cur.size());
        std::copy(cur.begin() + f, cur.end(), r.begin());
        std::copy(low.begin(), low.end(), r.begin() + (e - 1) * f);
        cur = std::move(r);
    }
    return cur;
}

void TowerField::raw_truncate(Raw& a, int r) const {
    const unsigned e = spec_.e, f = spec_.f;
    if (r >= max_precision()) return;
    for (unsigned j = 0; j < e; ++j) {
        i64 d = nt::ceil_div(static_cast<i64>(r) - j, e);
        if (d >= static_cast<i64>(K_)) continue;
        u64 m = d <= 0 ? 1 : nt::ipow(spec_.p, static_cast<unsigned>(d));
        for (unsigned i = 0; i < f; ++i) a[j * f + i] %= m;
    }
}

int TowerField::raw_val(const Raw& a) const {
    const unsigned e = spec_.e, f = spec_.f;
    int best = max_precision();
    for (unsigned j = 0; j < e; ++j) {
        int mv = static_cast<int>(K_);
        for (unsigned i = 0; i < f; ++i) mv = std::min(mv, vp_mod(a[j * f + i], spec_.p, K_));
        if (mv < static_cast<int>(K_)) best = std::min(best, static_cast<int>(e) * mv + static_cast<int>(j));
    }
    return best;
}

Poly TowerField::raw_residue(const Raw& a) const {
    Poly r(spec_.f);
    for (unsigned i = 0; i < spec_.f; ++i) r[i] = a[i] % spec_.p;
    return r;
}

u64 TowerField::raw_trace(const Raw& a) const {
    u128 acc = 0;
    for (unsigned i = 0; i < spec_.f; ++i) acc += static_cast<u128>(a[i]) * trW_[i] % pK_;
    return nt::mulmod(static_cast<u64>(acc % pK_), spec_.e, pK_);
}

u64 TowerField::dlog(const Poly& r) const {
    if (res_.is_zero(r)) fail(ErrorKind::DivisionByZero, "discrete log of zero residue");
    if (dlog_table_.empty()) fail(ErrorKind::Capacity, "residue field too large for discrete log table");
    return dlog_table_[res_.encode(r)];
}

FieldPtr make_tower(u64 p, const std::vector<Step>& steps, int k) {
    unsigned e = 1;
    for (const auto& s : steps)
        if (s.kind == Step::Kind::TameRamified) e *= s.degree;
    return make_tower_digits(p, steps, static_cast<unsigned>(std::max<i64>(1, nt::ceil_div(k, e))));
}

FieldPtr make_tower_digits(u64 p, const std::vector<Step>& steps, unsigned digits) {
    if (!nt::is_prime(p) || p == 2) fail(ErrorKind::InvalidArgument, "p must be an odd prime");
    unsigned f = 1, e = 1;
    u64 u = 0;
    ResidueField res = ResidueField::standard(p, 1);
    for (const Step& s : steps) {
        if (s.degree == 0) fail(ErrorKind::InvalidArgument, "step degree must be positive");
        if (s.degree % p == 0) fail(ErrorKind::WildRamification, "step degree divisible by p");
        if (s.kind == Step::Kind::Unramified) {
            if (s.degree == 1) continue;
            ResidueField next = ResidueField::standard(p, f * s.degree);
            u64 qn = next.size(), qo = res.size();
            u64 k0 = (qn - 1) / (qo - 1);
            // zeta_old = zeta_new^j with j = k0 * t, t a unit mod q_old - 1.
            u64 j = 0;
            for (u64 t = 1; t < qo; ++t) {
                if (std::gcd(t, qo - 1) != 1) continue;
                Poly cand = next.gen_pow(k0 * t);
                if (next.is_zero(next.eval(res.modulus(), cand))) {
                    j = k0 * t;
                    break;
                }
            }
            if (j == 0) fail(ErrorKind::InternalContradiction, "no embedding of residue field");
            u = nt::mulmod(u, j, qn - 1);
            f *= s.degree;
            res = next;
        } else {
            u64 q1 = res.size() - 1;
            u = (u + nt::mulmod(nt::mod(s.unit_exp, q1), e, q1)) % q1;
            e *= s.degree;
        }
    }
    FieldSpec spec{p, f, e, u, res.modulus()};
    return TowerField::make(spec, digits);
}

} // namespace lcs::local
