#include "lcs/local/element.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lcs::local {

namespace {

i64 sat_add(i64 a, i64 b) {
    i64 s = a + b;
    return std::min<i64>(s, TowerElement::kExact);
}

// Inverse of a unit given in raw form, modulo P^relprec.
Raw unit_inverse(const TowerField& F, const Raw& a, int relprec) {
    Poly r = F.raw_residue(a);
    u64 k = F.dlog(r);
    Raw z = F.raw_monomial(-static_cast<i64>(k), 0);
    Raw two = F.raw_from_int(2);
    for (int prec = 1; prec < relprec; prec *= 2) z = F.raw_mul(z, F.raw_sub(two, F.raw_mul(a, z)));
    F.raw_truncate(z, relprec);
    return z;
}

} // namespace

TowerElement TowerElement::zero(FieldPtr F, int absprec) {
    TowerElement x;
    x.F_ = std::move(F);
    x.zero_ = true;
    x.v_ = absprec;
    return x;
}

TowerElement TowerElement::from_unit(FieldPtr F, i64 v, Raw unit, int relprec) {
    relprec = std::min(relprec, F->max_precision());
    if (relprec <= 0) return zero(F, static_cast<int>(v));
    F->raw_truncate(unit, relprec);
    if (F->residue().is_zero(F->raw_residue(unit))) fail(ErrorKind::InternalContradiction, "unit part has zero residue");
    TowerElement x;
    x.F_ = std::move(F);
    x.zero_ = false;
    x.v_ = v;
    x.rel_ = relprec;
    x.unit_ = std::move(unit);
    return x;
}

TowerElement TowerElement::from_raw(FieldPtr F, const Raw& raw, int absprec) {
    absprec = std::min(absprec, F->max_precision());
    Raw r = raw;
    F->raw_truncate(r, absprec);
    int w = F->raw_val(r);
    if (w >= absprec) return zero(F, absprec);
    Raw u = F->raw_unshift(r, static_cast<unsigned>(w));
    return from_unit(F, w, std::move(u), absprec - w);
}

TowerElement TowerElement::monomial(FieldPtr F, i64 a, i64 v) {
    Raw u = F->raw_monomial(a, 0);
    int prec = F->max_precision();
    return from_unit(std::move(F), v, std::move(u), prec);
}

TowerElement TowerElement::p_inverse(FieldPtr F) {
    i64 u = static_cast<i64>(F->u());
    i64 e = F->e();
    return monomial(std::move(F), u, -e);
}

TowerElement TowerElement::from_int(FieldPtr F, i64 n) {
    if (n == 0) return zero(F);
    u64 p = F->p();
    i64 s = 0;
    while (n % static_cast<i64>(p) == 0) {
        n /= static_cast<i64>(p);
        ++s;
    }
    // p^s = zeta^(-u s) pi^(e s)
    Raw u = F->raw_mul_zeta(F->raw_from_int(n), -static_cast<i64>(F->u()) * s);
    int prec = F->max_precision();
    i64 v = s * F->e();
    return from_unit(std::move(F), v, std::move(u), prec);
}

TowerElement TowerElement::teichmuller(FieldPtr F, const Poly& residue) {
    if (F->residue().is_zero(residue)) return zero(F);
    u64 k = F->dlog(residue);
    return monomial(std::move(F), static_cast<i64>(k), 0);
}

Poly TowerElement::unit_residue() const {
    if (zero_) fail(ErrorKind::DivisionByZero, "residue of zero element's unit part");
    return F_->raw_residue(unit_);
}

Raw TowerElement::raw(int a) const {
    if (zero_) return F_->raw_zero();
    if (v_ < 0) fail(ErrorKind::InvalidArgument, "raw form of a non-integral element");
    i64 abs = std::min<i64>(absprec(), a);
    if (v_ >= abs) return F_->raw_zero();
    Raw r = F_->raw_shift(unit_, static_cast<unsigned>(v_));
    F_->raw_truncate(r, static_cast<int>(std::min<i64>(abs, F_->max_precision())));
    return r;
}

TowerElement TowerElement::truncated(i64 a) const {
    if (zero_) return zero(F_, static_cast<int>(std::min<i64>(v_, a)));
    if (a <= v_) return zero(F_, static_cast<int>(a));
    if (a >= absprec()) return *this;
    return from_unit(F_, v_, unit_, static_cast<int>(a - v_));
}

TowerElement operator-(const TowerElement& x) {
    if (x.zero_) return x;
    TowerElement r = x;
    r.unit_ = x.F_->raw_neg(x.unit_);
    return r;
}

TowerElement operator+(const TowerElement& x, const TowerElement& y) {
    if (!x.F_ || !y.F_) fail(ErrorKind::InvalidArgument, "arithmetic on an unset element");
    if (x.F_.get() != y.F_.get() && !x.F_->same_as(*y.F_)) fail(ErrorKind::InvalidArgument, "elements of different fields");
    const TowerField& F = *x.F_;
    i64 a = std::min(x.absprec(), y.absprec());
    if (x.zero_ && y.zero_) return TowerElement::zero(x.F_, static_cast<int>(a));
    i64 m = TowerElement::kExact;
    if (!x.zero_) m = std::min(m, x.v_);
    if (!y.zero_) m = std::min(m, y.v_);
    if (m >= a) return TowerElement::zero(x.F_, static_cast<int>(a));
    int span = static_cast<int>(a - m);
    Raw acc = F.raw_zero();
    for (const TowerElement* t : {&x, &y}) {
        if (t->zero_ || t->v_ >= a) continue;
        Raw s = F.raw_shift(t->unit_, static_cast<unsigned>(t->v_ - m));
        acc = F.raw_add(acc, s);
    }
    F.raw_truncate(acc, span);
    int w = F.raw_val(acc);
    if (w >= span) return TowerElement::zero(x.F_, static_cast<int>(a));
    Raw u = F.raw_unshift(acc, static_cast<unsigned>(w));
    return TowerElement::from_unit(x.F_, m + w, std::move(u), span - w);
}

TowerElement operator-(const TowerElement& x, const TowerElement& y) { return x + (-y); }

TowerElement operator*(const TowerElement& x, const TowerElement& y) {
    if (!x.F_ || !y.F_) fail(ErrorKind::InvalidArgument, "arithmetic on an unset element");
    if (x.F_.get() != y.F_.get() && !x.F_->same_as(*y.F_)) fail(ErrorKind::InvalidArgument, "elements of different fields");
    if (x.zero_ || y.zero_) {
        i64 a = sat_add(x.v_, y.v_);
        if (x.zero_ && x.v_ >= TowerElement::kExact) a = TowerElement::kExact;
        if (y.zero_ && y.v_ >= TowerElement::kExact) a = TowerElement::kExact;
        return TowerElement::zero(x.F_, static_cast<int>(a));
    }
    int rel = std::min(x.rel_, y.rel_);
    Raw u = x.F_->raw_mul(x.unit_, y.unit_);
    return TowerElement::from_unit(x.F_, x.v_ + y.v_, std::move(u), rel);
}

TowerElement TowerElement::inv() const {
    if (zero_) fail(ErrorKind::DivisionByZero, "inverse of zero");
    return from_unit(F_, -v_, unit_inverse(*F_, unit_, rel_), rel_);
}

TowerElement TowerElement::pow(i64 n) const {
    if (n < 0) return inv().pow(-n);
    TowerElement r = from_int(F_, 1);
    TowerElement b = *this;
    while (n) {
        if (n & 1) r = r * b;
        n >>= 1;
        if (n) b = b * b;
    }
    return r;
}

TowerElement TowerElement::mul_zeta(i64 k) const {
    if (zero_) return *this;
    return from_unit(F_, v_, F_->raw_mul_zeta(unit_, k), rel_);
}

std::string TowerElement::to_string() const {
    std::ostringstream os;
    if (zero_) {
        if (v_ >= kExact) return "0";
        os << "O(pi^" << v_ << ")";
        return os.str();
    }
    os << "pi^" << v_ << "*[";
    for (std::size_t i = 0; i < unit_.size(); ++i) os << (i ? "," : "") << unit_[i];
    os << "]+O(pi^" << absprec() << ")";
    return os.str();
}

UnitDecomposition decompose(const TowerElement& x) {
    if (x.is_zero()) fail(ErrorKind::DivisionByZero, "decomposition of zero");
    const FieldPtr& F = x.field();
    UnitDecomposition d;
    d.v = x.valuation();
    d.t = F->dlog(x.unit_residue());
    Raw w = F->raw_mul_zeta(x.unit(), -static_cast<i64>(d.t));
    d.principal = TowerElement::from_unit(F, 0, std::move(w), x.relprec());
    return d;
}

namespace {

void require_radius(const TowerField& F) {
    if (F.p() - 1 <= F.e()) fail(ErrorKind::ExpLogRadius, "exp/log need p - 1 > e");
}

// Divide by a positive integer k exactly: k = p^s k'.
TowerElement div_int(const TowerElement& x, u64 k) {
    const FieldPtr& F = x.field();
    u64 p = F->p();
    int s = 0;
    while (k % p == 0) {
        k /= p;
        ++s;
    }
    TowerElement r = x * TowerElement::from_int(F, static_cast<i64>(nt::invmod(k % F->pK(), F->pK())));
    if (s > 0) r = r * TowerElement::p_inverse(F).pow(s);
    return r;
}

} // namespace

TowerElement log_principal(const TowerElement& u) {
    const FieldPtr& F = u.field();
    require_radius(*F);
    TowerElement w = u - TowerElement::from_int(F, 1);
    if (w.is_zero()) return TowerElement::zero(F, static_cast<int>(w.absprec()));
    if (w.valuation() < 1) fail(ErrorKind::InvalidArgument, "log argument is not a principal unit");
    const i64 a = w.absprec();
    const i64 vw = w.valuation();
    const i64 e = F->e();
    const double lp = std::log(static_cast<double>(F->p()));
    auto term_val = [&](u64 k) { return static_cast<i64>(k) * vw - e * nt::vp(k, F->p()); };
    // Past k* = e / (vw ln p) the bound k vw - e log_p k increases.
    u64 kmax = 1;
    while (true) {
        double bound = static_cast<double>(kmax) * vw - e * std::log(static_cast<double>(kmax)) / lp;
        if (static_cast<double>(kmax) > e / (vw * lp) && bound >= static_cast<double>(a) + 1) break;
        ++kmax;
    }
    TowerElement sum = TowerElement::zero(F, static_cast<int>(a));
    TowerElement power = w;
    for (u64 k = 1; k <= kmax; ++k) {
        if (term_val(k) < a) {
            TowerElement t = div_int(power, k);
            sum = (k % 2 == 1) ? sum + t : sum - t;
        }
        power = power * w;
    }
    return sum.truncated(a);
}

TowerElement exp_principal(const TowerElement& x) {
    const FieldPtr& F = x.field();
    require_radius(*F);
    TowerElement one = TowerElement::from_int(F, 1);
    if (x.is_zero()) return one.truncated(x.absprec());
    if (x.valuation() < 1) fail(ErrorKind::InvalidArgument, "exp argument must lie in P");
    const i64 a = x.absprec();
    const i64 vx = x.valuation();
    const i64 e = F->e();
    const i64 pm1 = static_cast<i64>(F->p()) - 1;
    TowerElement sum = one;
    TowerElement term = one;
    // v(x^k/k!) >= k (vx - e/(p-1)) + e/(p-1).
    for (u64 k = 1; static_cast<i64>(k) * (pm1 * vx - e) + e < a * pm1 + pm1; ++k) {
        term = div_int(term * x, k);
        sum = sum + term;
    }
    return sum.truncated(a);
}

} // namespace lcs::local
