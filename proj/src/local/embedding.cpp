#include "lcs/local/embedding.hpp"

#include <algorithm>

namespace lcs::local {

std::pair<u64, i64> Embedding::monomial_image(i64 a, i64 v) const {
    u64 m = target->q() - 1;
    u64 ex = (nt::mulmod(j, nt::mod(a, m), m) + nt::mulmod(c, nt::mod(v, m), m)) % m;
    return {ex, v * static_cast<i64>(d)};
}

TowerElement Embedding::apply(const TowerElement& x) const {
    const TowerField& S = *source;
    const TowerField& T = *target;
    if (x.is_zero()) {
        i64 a = x.valuation() >= TowerElement::kExact ? TowerElement::kExact : x.valuation() * d;
        return TowerElement::zero(target, static_cast<int>(std::min<i64>(a, TowerElement::kExact)));
    }
    const unsigned fS = S.f(), fT = T.f();
    const u64 pK = T.pK();
    const u64 m = T.q() - 1;
    Raw out = T.raw_zero();
    const Raw& u = x.unit();
    for (unsigned l = 0; l < S.e(); ++l) {
        for (unsigned i = 0; i < fS; ++i) {
            u64 a = u[l * fS + i] % pK;
            if (a == 0) continue;
            u64 ex = (nt::mulmod(c, l, m) + nt::mulmod(j, i, m)) % m;
            Poly z = T.zeta_pow(static_cast<i64>(ex));
            u64* slot = &out[d * l * fT];
            for (unsigned t = 0; t < fT; ++t) slot[t] = (slot[t] + nt::mulmod(z[t], a, pK)) % pK;
        }
    }
    i64 v = x.valuation();
    out = T.raw_mul_zeta(out, static_cast<i64>(nt::mulmod(c, nt::mod(v, m), m)));
    return TowerElement::from_unit(target, v * d, std::move(out), x.relprec() * static_cast<int>(d));
}

Embedding Embedding::after(const Embedding& inner) const {
    if (inner.target.get() != source.get() && !inner.target->same_as(*source))
        fail(ErrorKind::InvalidArgument, "embedding composition mismatch");
    u64 m = target->q() - 1;
    Embedding r;
    r.source = inner.source;
    r.target = target;
    r.j = nt::mulmod(inner.j, j, m);
    r.c = (nt::mulmod(inner.c, j, m) + nt::mulmod(c, inner.d, m)) % m;
    r.d = inner.d * d;
    return r;
}

Embedding identity_embedding(const FieldPtr& T) { return Embedding{T, T, 1, 0, 1}; }

std::vector<Embedding> embeddings(const FieldPtr& S, const FieldPtr& T) {
    std::vector<Embedding> out;
    if (S->p() != T->p()) fail(ErrorKind::InvalidArgument, "fields over different primes");
    if (T->f() % S->f() != 0 || T->e() % S->e() != 0) return out;
    const ResidueField& R = T->residue();
    const u64 qT1 = T->q() - 1, qS1 = S->q() - 1;
    const u64 k = qT1 / qS1;
    Poly zk = R.gen_pow(k);
    Poly cur = R.one();
    for (u64 t = 0; t < qS1; ++t, cur = R.mul(cur, zk)) {
        if (!R.is_zero(R.eval(S->residue().modulus(), cur))) continue;
        u64 jj = nt::mulmod(k, t, qT1);
        u64 rhs = (nt::mulmod(jj, S->u(), qT1) + qT1 - T->u()) % qT1;
        for (u64 cc : nt::solve_linear(S->e(), rhs, qT1)) out.push_back(Embedding{S, T, jj, cc, T->e() / S->e()});
    }
    return out;
}

std::vector<Embedding> all_embeddings(const FieldPtr& S, const FieldPtr& T) {
    auto out = embeddings(S, T);
    if (out.size() != S->degree())
        fail(ErrorKind::AmbientTooSmall, "target field holds " + std::to_string(out.size()) + " of " + std::to_string(S->degree()) + " embeddings");
    return out;
}

std::vector<Embedding> automorphisms(const FieldPtr& T) { return embeddings(T, T); }

std::vector<Subfield> enumerate_subfields(const FieldPtr& T) {
    std::vector<Subfield> out;
    const u64 qT1 = T->q() - 1;
    for (u64 fS : nt::divisors(T->f())) {
        for (u64 eS : nt::divisors(T->e())) {
            if (fS == T->f() && eS == T->e()) continue;
            const u64 qS1 = nt::ipow(T->p(), static_cast<unsigned>(fS)) - 1;
            const u64 k = qT1 / qS1;
            Poly g0 = T->residue().minpoly(T->residue().gen_pow(k));
            for (u64 c = 0; c < k; ++c) {
                u64 val = (nt::mulmod(c, eS, qT1) + T->u()) % qT1;
                if (val % k != 0) continue;
                FieldSpec spec{T->p(), static_cast<unsigned>(fS), static_cast<unsigned>(eS), (val / k) % qS1, g0};
                FieldPtr S = TowerField::make(spec, T->digits());
                out.push_back(Subfield{S, Embedding{S, T, k, c, static_cast<unsigned>(T->e() / eS)}});
            }
        }
    }
    out.push_back(Subfield{T, identity_embedding(T)});
    std::stable_sort(out.begin(), out.end(), [](const Subfield& a, const Subfield& b) { return a.degree() < b.degree(); });
    return out;
}

Subfield prime_subfield(const FieldPtr& T) {
    FieldPtr F = TowerField::make(standard_spec(T->p(), 1, 1, 0), T->digits());
    return Subfield{F, embeddings(F, T).at(0)};
}

namespace {

// For S embedded with zeta_S -> zeta_T^j, returns k = (q_T-1)/(q_S-1) and t = j/k.
std::pair<u64, u64> residue_index(const Embedding& em) {
    u64 k = (em.target->q() - 1) / (em.source->q() - 1);
    return {k, (em.j / k) % (em.source->q() - 1)};
}

} // namespace

bool monomial_in_subfield(const Subfield& S, i64 a, i64 v) {
    const Embedding& em = S.emb;
    if (v % static_cast<i64>(em.d) != 0) return false;
    u64 m = em.target->q() - 1;
    i64 vs = v / static_cast<i64>(em.d);
    u64 rest = (nt::mod(a, m) + m - nt::mulmod(em.c, nt::mod(vs, m), m)) % m;
    return rest % residue_index(em).first == 0;
}

bool subfield_contains(const Subfield& big, const Subfield& small) {
    const Embedding& e = small.emb;
    return monomial_in_subfield(big, static_cast<i64>(e.j), 0) && monomial_in_subfield(big, static_cast<i64>(e.c), e.d);
}

Embedding relative_embedding(const Subfield& big, const Subfield& small) {
    for (const auto& cand : embeddings(small.field, big.field))
        if (big.emb.after(cand) == small.emb) return cand;
    fail(ErrorKind::InvalidArgument, "subfield is not contained in the larger subfield");
}

TowerElement monomial_preimage(const Subfield& S, i64 a, i64 v) {
    if (!monomial_in_subfield(S, a, v)) fail(ErrorKind::InvalidArgument, "monomial not in subfield");
    const Embedding& em = S.emb;
    u64 m = em.target->q() - 1;
    u64 qS1 = S.field->q() - 1;
    i64 vs = v / static_cast<i64>(em.d);
    u64 rest = (nt::mod(a, m) + m - nt::mulmod(em.c, nt::mod(vs, m), m)) % m;
    auto [k, t] = residue_index(em);
    u64 b = qS1 == 1 ? 0 : nt::mulmod((rest / k) % qS1, nt::invmod(t, qS1), qS1);
    return TowerElement::monomial(S.field, static_cast<i64>(b), vs);
}

// ---------------------------------------------------------------------------

RelativeExtension::RelativeExtension(Embedding emb) : emb_(std::move(emb)) {
    const TowerField& S = *emb_.source;
    const TowerField& T = *emb_.target;
    if (S.digits() != T.digits()) fail(ErrorKind::InvalidArgument, "relative extension needs equal storage precision");
    nf_ = T.f() / S.f();
    n_ = nf_ * emb_.d;
    const std::size_t N = T.raw_size();
    const std::size_t sS = S.raw_size();
    const u64 pK = T.pK(), p = T.p();
    const u64 m = T.q() - 1;
    // Column (b, s): image of the S-slot s times basis element b.
    std::vector<std::vector<u64>> A(N, std::vector<u64>(2 * N, 0));
    for (unsigned b = 0; b < n_; ++b) {
        unsigned l = b / nf_, i = b % nf_;
        for (unsigned lp = 0; lp < S.e(); ++lp) {
            for (unsigned ip = 0; ip < S.f(); ++ip) {
                std::size_t col = b * sS + lp * S.f() + ip;
                u64 ex = (nt::mulmod(emb_.c, lp, m) + nt::mulmod(emb_.j, ip, m) + i) % m;
                Raw r = T.raw_monomial(static_cast<i64>(ex), emb_.d * lp + l);
                for (std::size_t row = 0; row < N; ++row) A[row][col] = r[row];
            }
        }
    }
    for (std::size_t row = 0; row < N; ++row) A[row][N + row] = 1 % pK;
    // Gauss-Jordan with unit pivots over Z/p^K.
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t piv = col;
        while (piv < N && A[piv][col] % p == 0) ++piv;
        if (piv == N) fail(ErrorKind::InternalContradiction, "relative basis is not unimodular");
        std::swap(A[piv], A[col]);
        u64 inv = nt::invmod(A[col][col], pK);
        for (auto& x : A[col]) x = nt::mulmod(x, inv, pK);
        for (std::size_t row = 0; row < N; ++row) {
            if (row == col || A[row][col] == 0) continue;
            u64 f = A[row][col];
            for (std::size_t t = 0; t < 2 * N; ++t) A[row][t] = (A[row][t] + pK - nt::mulmod(f, A[col][t], pK)) % pK;
        }
    }
    inverse_.assign(N, std::vector<u64>(N));
    for (std::size_t row = 0; row < N; ++row)
        for (std::size_t t = 0; t < N; ++t) inverse_[row][t] = A[row][N + t];
    // Both norms are monomials; snap the computed values to exact ones.
    auto snap = [&](const TowerElement& x) {
        TowerElement y = berkowitz(mult_matrix(x), emb_.source)[0];
        if (n_ % 2 == 1) y = -y;
        UnitDecomposition dec = decompose(y);
        if (dec.principal != TowerElement::from_int(emb_.source, 1))
            fail(ErrorKind::InternalContradiction, "norm of a monomial is not a monomial");
        return TowerElement::monomial(emb_.source, static_cast<i64>(dec.t), dec.v);
    };
    norm_pi_ = snap(TowerElement::uniformizer(emb_.target));
    norm_zeta_ = snap(TowerElement::monomial(emb_.target, 1, 0));
}

std::vector<TowerElement> RelativeExtension::coordinates_any(const TowerElement& y) const {
    i64 s;
    TowerElement z = scale_to_integral(y, s);
    auto out = coordinates(z);
    if (s > 0) {
        TowerElement back = TowerElement::uniformizer(emb_.source).pow(-s);
        for (auto& c : out) c = c * back;
    }
    return out;
}

TowerElement RelativeExtension::basis(unsigned k) const {
    unsigned l = k / nf_, i = k % nf_;
    return TowerElement::monomial(emb_.target, i, l);
}

std::vector<TowerElement> RelativeExtension::coordinates(const TowerElement& y) const {
    const TowerField& T = *emb_.target;
    const std::size_t N = T.raw_size();
    const std::size_t sS = emb_.source->raw_size();
    i64 a = std::min<i64>(y.absprec(), T.max_precision());
    if (!y.is_zero() && y.valuation() < 0) fail(ErrorKind::InvalidArgument, "coordinates of a non-integral element");
    Raw r = y.raw(static_cast<int>(a));
    const u64 pK = T.pK();
    std::vector<u64> x(N, 0);
    for (std::size_t row = 0; row < N; ++row) {
        nt::u128 acc = 0;
        for (std::size_t t = 0; t < N; ++t) acc += static_cast<nt::u128>(inverse_[row][t]) * r[t] % pK;
        x[row] = static_cast<u64>(acc % pK);
    }
    int prec = static_cast<int>(nt::floor_div(a, emb_.d));
    std::vector<TowerElement> out;
    out.reserve(n_);
    for (unsigned b = 0; b < n_; ++b) {
        Raw s(x.begin() + b * sS, x.begin() + (b + 1) * sS);
        out.push_back(TowerElement::from_raw(emb_.source, s, prec));
    }
    return out;
}

Matrix RelativeExtension::mult_matrix(const TowerElement& x) const {
    Matrix M(n_, std::vector<TowerElement>(n_));
    for (unsigned k = 0; k < n_; ++k) {
        auto col = coordinates(x * basis(k));
        for (unsigned r = 0; r < n_; ++r) M[r][k] = col[r];
    }
    return M;
}

TowerElement RelativeExtension::scale_to_integral(const TowerElement& x, i64& s) const {
    s = 0;
    if (x.is_zero() || x.valuation() >= 0) return x;
    s = nt::ceil_div(-x.valuation(), emb_.d);
    auto [ex, v] = emb_.monomial_image(0, s);
    return x * TowerElement::monomial(emb_.target, static_cast<i64>(ex), v);
}

TowerElement RelativeExtension::norm(const TowerElement& x) const {
    if (x.is_zero()) {
        i64 a = x.valuation();
        return TowerElement::zero(emb_.source, static_cast<int>(a >= TowerElement::kExact ? a : a * nf_));
    }
    TowerElement unit = TowerElement::from_unit(emb_.target, 0, x.unit(), x.relprec());
    TowerElement nu = berkowitz(mult_matrix(unit), emb_.source)[0];
    if (n_ % 2 == 1) nu = -nu;
    return nu * norm_pi_.pow(x.valuation());
}

TowerElement RelativeExtension::trace(const TowerElement& x) const {
    i64 s;
    TowerElement y = scale_to_integral(x, s);
    if (y.is_zero()) {
        i64 a = y.valuation();
        return TowerElement::zero(emb_.source, static_cast<int>(a >= TowerElement::kExact ? a : nt::floor_div(a, emb_.d)));
    }
    Matrix M = mult_matrix(y);
    TowerElement t = TowerElement::zero(emb_.source);
    for (unsigned k = 0; k < n_; ++k) t = t + M[k][k];
    if (s > 0) t = t * TowerElement::uniformizer(emb_.source).pow(-s);
    return t;
}

std::vector<TowerElement> RelativeExtension::charpoly(const TowerElement& x) const {
    i64 s;
    TowerElement y = scale_to_integral(x, s);
    auto cp = berkowitz(mult_matrix(y), emb_.source);
    if (s > 0) {
        TowerElement lam_inv = TowerElement::uniformizer(emb_.source).pow(-s);
        TowerElement factor = TowerElement::from_int(emb_.source, 1);
        for (unsigned i = 1; i <= n_; ++i) {
            factor = factor * lam_inv;
            cp[n_ - i] = cp[n_ - i] * factor;
        }
    }
    return cp;
}

std::vector<TowerElement> berkowitz(const Matrix& A, const FieldPtr& F) {
    const std::size_t n = A.size();
    const TowerElement one = TowerElement::from_int(F, 1);
    std::vector<TowerElement> p{one};  // highest degree first
    for (std::size_t k = 1; k <= n; ++k) {
        std::vector<TowerElement> t(k + 1, TowerElement::zero(F));
        t[0] = one;
        t[1] = -A[k - 1][k - 1];
        std::vector<TowerElement> v(k - 1);
        for (std::size_t r = 0; r + 1 < k; ++r) v[r] = A[r][k - 1];
        for (std::size_t jj = 0; jj + 1 < k; ++jj) {
            TowerElement dot = TowerElement::zero(F);
            for (std::size_t r = 0; r + 1 < k; ++r) dot = dot + A[k - 1][r] * v[r];
            t[jj + 2] = -dot;
            if (jj + 2 < k) {
                std::vector<TowerElement> w(k - 1, TowerElement::zero(F));
                for (std::size_t r = 0; r + 1 < k; ++r)
                    for (std::size_t cidx = 0; cidx + 1 < k; ++cidx) w[r] = w[r] + A[r][cidx] * v[cidx];
                v = std::move(w);
            }
        }
        std::vector<TowerElement> q(k + 1, TowerElement::zero(F));
        for (std::size_t i = 0; i <= k; ++i)
            for (std::size_t m = 0; m < k && m <= i; ++m) q[i] = q[i] + t[i - m] * p[m];
        p = std::move(q);
    }
    std::reverse(p.begin(), p.end());
    return p;
}

} // namespace lcs::local
