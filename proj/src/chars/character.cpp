#include "lcs/chars/character.hpp"

#include <algorithm>
#include <numeric>

#include "lcs/error.hpp"

namespace lcs::chars {

using local::TowerField;

namespace {

TowerElement exact_rep(const TowerElement& x) {
    if (x.is_zero()) return TowerElement::zero(x.field());
    return TowerElement::from_unit(x.field(), x.valuation(), x.unit(), x.field()->max_precision());
}

TowerElement reduce_mod_O(const TowerElement& g) {
    if (g.is_zero() || g.valuation() >= 0) return TowerElement::zero(g.field(), 0);
    return g.truncated(0);
}

bool same_field(const FieldPtr& a, const FieldPtr& b) { return a.get() == b.get() || a->same_as(*b); }

} // namespace

RootOfUnity psi(const TowerElement& x) {
    if (x.absprec() < 1) fail(ErrorKind::PrecisionLoss, "psi needs its argument modulo P");
    if (x.is_zero() || x.valuation() >= 1) return RootOfUnity::one();
    const TowerField& T = *x.field();
    i64 v = x.valuation();
    i64 s = v < 0 ? nt::ceil_div(-v, static_cast<i64>(T.e())) : 0;
    if (static_cast<unsigned>(s) + 1 > T.digits()) fail(ErrorKind::PrecisionLoss, "psi argument below the stored precision");
    TowerElement y = x * TowerElement::from_int(x.field(), static_cast<i64>(nt::ipow(T.p(), static_cast<unsigned>(s))));
    u64 m = nt::ipow(T.p(), static_cast<unsigned>(s + 1));
    return RootOfUnity::make(m, static_cast<i64>(T.raw_trace(y.raw()) % m));
}

MulChar::MulChar(FieldPtr T, RootOfUnity wvalue, u64 tame, TowerElement gamma)
    : T_(std::move(T)), w_(wvalue), t_(tame % (T_->q() - 1)) {
    if (!gamma.field()) gamma = TowerElement::zero(T_, 0);
    if (!same_field(gamma.field(), T_)) fail(ErrorKind::InvalidArgument, "gamma lives in another field");
    gamma_ = reduce_mod_O(gamma);
    if (!gamma_.is_zero() && T_->p() - 1 <= T_->e())
        fail(ErrorKind::ExpLogRadius, "wild part needs p - 1 > e; use a norm composite");
}

MulChar MulChar::trivial(const FieldPtr& T) { return MulChar(T, RootOfUnity::one(), 0, TowerElement::zero(T, 0)); }

MulChar MulChar::random(const FieldPtr& T, int conductor, std::mt19937_64& rng) {
    const u64 qm1 = T->q() - 1;
    std::uniform_int_distribution<u64> unit_dist(0, qm1 - 1);
    RootOfUnity w = RootOfUnity::make(qm1, static_cast<i64>(unit_dist(rng)));
    if (conductor <= 0) return MulChar(T, w, 0, TowerElement::zero(T, 0));
    u64 t = 1 + std::uniform_int_distribution<u64>(0, qm1 - 2)(rng);
    if (qm1 == 1) fail(ErrorKind::InvalidArgument, "no tamely ramified characters when q = 2");
    if (conductor == 1) return MulChar(T, w, t, TowerElement::zero(T, 0));
    std::uniform_int_distribution<u64> digit(0, T->pK() - 1);
    local::Raw r(T->degree());
    for (auto& c : r) c = digit(rng);
    TowerElement tail = TowerElement::from_raw(T, r, T->max_precision());
    TowerElement unit = TowerElement::monomial(T, static_cast<i64>(unit_dist(rng)), 0) +
                        tail * TowerElement::uniformizer(T);
    TowerElement g = unit * TowerElement::monomial(T, 0, 1 - conductor);
    return MulChar(T, w, t, g);
}

RootOfUnity MulChar::eval(const TowerElement& x) const {
    if (!same_field(x.field(), T_)) fail(ErrorKind::InvalidArgument, "character evaluated outside its field");
    if (x.is_zero()) fail(ErrorKind::DivisionByZero, "character at zero");
    local::UnitDecomposition d = decompose(x);
    const u64 qm1 = T_->q() - 1;
    RootOfUnity r = w_.pow(d.v) * RootOfUnity::make(qm1, static_cast<i64>(nt::mulmod(t_, d.t, qm1)));
    if (!gamma_.is_zero()) {
        int c = conductor();
        if (x.relprec() < c) fail(ErrorKind::PrecisionLoss, "argument known to fewer digits than the conductor");
        r = r * psi(gamma_ * log_principal(d.principal.truncated(c)));
    }
    return r;
}

int MulChar::conductor() const {
    if (!gamma_.is_zero()) return static_cast<int>(1 - gamma_.valuation());
    return t_ != 0 ? 1 : 0;
}

TowerElement MulChar::c_theta() const {
    int c = conductor();
    if (c < 2) fail(ErrorKind::ConductorTooSmall, "c_theta needs conductor >= 2");
    int r = (c + 1) / 2;
    return exact_rep(gamma_.truncated(1 - r));
}

std::pair<u64, i64> MulChar::standard_rep() const {
    if (conductor() < 2) fail(ErrorKind::ConductorTooSmall, "standard representative needs conductor >= 2");
    return {T_->dlog(gamma_.unit_residue()), gamma_.valuation()};
}

TowerElement MulChar::standard_rep_element() const {
    auto [a, v] = standard_rep();
    return TowerElement::monomial(T_, static_cast<i64>(a), v);
}

MulChar MulChar::inv() const {
    u64 qm1 = T_->q() - 1;
    return MulChar(T_, w_.inv(), (qm1 - t_) % qm1, -gamma_);
}

MulChar MulChar::pow(i64 n) const {
    if (n < 0) return inv().pow(-n);
    MulChar r = trivial(T_);
    MulChar b = *this;
    while (n) {
        if (n & 1) r = r * b;
        n >>= 1;
        if (n) b = b * b;
    }
    return r;
}

bool MulChar::is_trivial() const { return w_.is_one() && t_ == 0 && gamma_.is_zero(); }

MulChar operator*(const MulChar& a, const MulChar& b) {
    if (!same_field(a.T_, b.T_)) fail(ErrorKind::InvalidArgument, "product of characters on different fields");
    return MulChar(a.T_, a.w_ * b.w_, (a.t_ + b.t_) % (a.T_->q() - 1), a.gamma_ + b.gamma_);
}

bool operator==(const MulChar& a, const MulChar& b) {
    return same_field(a.T_, b.T_) && a.w_ == b.w_ && a.t_ == b.t_ && (a.gamma_ - b.gamma_).truncated(0).is_zero();
}

MulChar inflate(const MulChar& theta, const RelativeExtension& rel) {
    if (!same_field(theta.field(), rel.base())) fail(ErrorKind::InvalidArgument, "inflation from the wrong field");
    const FieldPtr& K = rel.top();
    RootOfUnity w = theta.eval(rel.norm_uniformizer());
    u64 t = theta.eval(rel.norm_zeta()).exponent_in(K->q() - 1);
    TowerElement g = theta.gamma().is_zero() ? TowerElement::zero(K, 0) : rel.embedding().apply(theta.gamma());
    return MulChar(K, w, t, g);
}

MulChar restrict_to(const MulChar& theta, const RelativeExtension& rel) {
    if (!same_field(theta.field(), rel.top())) fail(ErrorKind::InvalidArgument, "restriction from the wrong field");
    const FieldPtr& B = rel.base();
    const Embedding& e = rel.embedding();
    RootOfUnity w = theta.eval(e.apply(TowerElement::uniformizer(B)));
    u64 t = theta.eval(e.apply(TowerElement::monomial(B, 1, 0))).exponent_in(B->q() - 1);
    TowerElement g = theta.gamma().is_zero() ? TowerElement::zero(B, 0) : rel.trace(theta.gamma());
    return MulChar(B, w, t, g);
}

// Norm composites.

NormComposite::NormComposite(FieldPtr K, std::vector<Part> parts) : K_(std::move(K)), parts_(std::move(parts)) {
    int bound = 1;
    for (const auto& part : parts_) {
        if (!same_field(part.rel->top(), K_) || !same_field(part.rel->base(), part.chi.field()))
            fail(ErrorKind::InvalidArgument, "norm composite part does not map into the field");
        int c = part.chi.conductor();
        bound = std::max(bound, static_cast<int>(part.rel->ramification()) * std::max(c - 1, 0) + 1);
    }
    conductor_ = conductor_by_scan(*this, bound);
}

RootOfUnity NormComposite::eval(const TowerElement& x) const {
    RootOfUnity r = RootOfUnity::one();
    for (const auto& part : parts_) r = r * part.chi.eval(part.rel->norm(x));
    return r;
}

TowerElement NormComposite::c_theta() const {
    if (conductor_ < 2) fail(ErrorKind::ConductorTooSmall, "c_theta needs conductor >= 2");
    TowerElement g = TowerElement::zero(K_, 0);
    for (const auto& part : parts_)
        if (!part.chi.gamma().is_zero()) g = g + part.rel->embedding().apply(part.chi.gamma());
    int r = (conductor_ + 1) / 2;
    return exact_rep(g.truncated(1 - r));
}

int conductor_by_scan(const Character& theta, int bound) {
    const FieldPtr& T = theta.field();
    const TowerElement one = TowerElement::from_int(T, 1);
    for (int n = bound; n >= 1; --n)
        for (unsigned i = 0; i < T->f(); ++i)
            if (!theta.eval(one + TowerElement::monomial(T, i, n)).is_one()) {
                if (n == bound) fail(ErrorKind::RangeViolation, "character is nontrivial at the scan bound");
                return n + 1;
            }
    return theta.eval(TowerElement::monomial(T, 1, 0)).is_one() ? 0 : 1;
}

bool check_c_theta(const Character& theta, const TowerElement& c) {
    const FieldPtr& T = theta.field();
    int f = theta.conductor();
    int r = (f + 1) / 2;
    const TowerElement one = TowerElement::from_int(T, 1);
    for (int n = r; n < f; ++n)
        for (unsigned i = 0; i < T->f(); ++i) {
            TowerElement x = TowerElement::monomial(T, i, n);
            if (!(theta.eval(one + x) == psi(c * x))) return false;
        }
    return true;
}

// Admissibility.

bool principal_comes_from(const MulChar& theta, const Subfield& S) {
    if (theta.gamma().is_zero()) return true;
    RelativeExtension rel(S.emb);
    auto coords = rel.coordinates_any(theta.gamma());
    for (std::size_t k = 1; k < coords.size(); ++k)
        if (!coords[k].is_zero() && coords[k].valuation() < 0) return false;
    return true;
}

bool comes_from(const MulChar& theta, const Subfield& S) {
    const FieldPtr& E = theta.field();
    u64 qe = E->q() - 1;
    u64 qs = S.field->q() - 1;
    u64 n0 = nt::mulmod(S.emb.d, qe / qs, qe);
    u64 g = std::gcd(n0, qe);
    if (theta.tame() % g != 0) return false;
    return principal_comes_from(theta, S);
}

std::vector<Subfield> intermediate_fields(const FieldPtr& E, const Subfield& B) {
    std::vector<Subfield> out;
    for (auto& S : local::enumerate_subfields(E))
        if (local::subfield_contains(S, B)) out.push_back(std::move(S));
    return out;
}

bool is_generic(const MulChar& theta, const Subfield& B) {
    const FieldPtr& E = theta.field();
    auto fields = intermediate_fields(E, B);
    if (theta.conductor() >= 2) {
        auto [a, v] = theta.standard_rep();
        for (const auto& S : fields)
            if (S.degree() < E->degree() && local::monomial_in_subfield(S, static_cast<i64>(a), v)) return false;
        return true;
    }
    if (B.emb.d != 1) fail(ErrorKind::UnsupportedShape, "conductor-one genericity over a ramified extension");
    for (const auto& S : fields)
        if (S.degree() < E->degree() && comes_from(theta, S)) return false;
    return true;
}

bool is_admissible(const MulChar& theta, const Subfield& B) {
    const FieldPtr& E = theta.field();
    for (const auto& S : intermediate_fields(E, B)) {
        bool proper = S.degree() < E->degree();
        if (proper && comes_from(theta, S)) return false;
        if (S.emb.d != 1 && principal_comes_from(theta, S)) return false;
    }
    return true;
}

HoweFactorization howe_factorize(const MulChar& theta, const Subfield& B) {
    const FieldPtr& E = theta.field();
    if (!is_admissible(theta, B)) fail(ErrorKind::NotAdmissible, "character is not admissible over the base");
    auto fields = intermediate_fields(E, B);

    struct Pending {
        Subfield S;
        TowerElement gamma;
        int cond;
    };
    std::vector<Pending> pend;
    TowerElement chi_gamma = TowerElement::zero(B.field, 0);
    Subfield cur = B;
    TowerElement rest = theta.gamma();
    while (!rest.is_zero()) {
        i64 v = rest.valuation();
        i64 a = static_cast<i64>(E->dlog(rest.unit_residue()));
        const Subfield* best = nullptr;
        for (const auto& S : fields)
            if (local::subfield_contains(S, cur) && local::monomial_in_subfield(S, a, v) &&
                (!best || S.degree() < best->degree()))
                best = &S;
        if (!best) fail(ErrorKind::InternalContradiction, "no intermediate field contains the leading term");
        TowerElement pre = local::monomial_preimage(*best, a, v);
        if (best->degree() == cur.degree()) {
            if (pend.empty()) chi_gamma = chi_gamma + pre;
            else pend.back().gamma = pend.back().gamma + pre;
        } else {
            pend.push_back({*best, pre, static_cast<int>(1 - v)});
            cur = *best;
        }
        rest = (rest - TowerElement::monomial(E, a, v)).truncated(0);
    }

    HoweFactorization h;
    h.base = B;
    const bool top_reached = cur.degree() == E->degree();
    if (pend.empty() && top_reached) {
        // E = B: theta itself.
        h.chi = MulChar(B.field, theta.wvalue(), theta.tame(), chi_gamma);
        return h;
    }
    h.chi = MulChar(B.field, RootOfUnity::one(), 0, chi_gamma);
    for (std::size_t k = 0; k < pend.size(); ++k) {
        bool last = top_reached && k + 1 == pend.size();
        MulChar phi = last ? MulChar(pend[k].S.field, theta.wvalue(), theta.tame(), pend[k].gamma)
                           : MulChar(pend[k].S.field, RootOfUnity::one(), 0, pend[k].gamma);
        h.factors.push_back({pend[k].S, phi, pend[k].cond});
    }
    if (!top_reached) {
        MulChar rho(E, theta.wvalue(), theta.tame(), TowerElement::zero(E, 0));
        Subfield below{cur.field, cur.emb};
        if (cur.emb.d != 1 || rho.conductor() != 1 || !is_generic(rho, below))
            fail(ErrorKind::NotAdmissible, "tame remainder is not generic");
        h.factors.push_back({fields.back(), rho, 1});
    }
    return h;
}

MulChar howe_product(const HoweFactorization& h, const FieldPtr& E) {
    MulChar out = inflate(h.chi, RelativeExtension(h.base.emb));
    for (const auto& f : h.factors) out = out * inflate(f.phi, RelativeExtension(f.field.emb));
    if (!same_field(out.field(), E)) fail(ErrorKind::InternalContradiction, "factor product lands in another field");
    return out;
}

} // namespace lcs::chars
