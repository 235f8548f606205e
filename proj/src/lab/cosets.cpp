#include <numeric>

#include "lcs/error.hpp"
#include "lcs/lab/sharpness.hpp"

namespace lcs::lab {

namespace {

// A subfield of M in monomial form: generated by zeta_M^k and zeta_M^c pi_M^d.
struct Shape {
    unsigned f = 1, e = 1;
    u64 k = 1, c = 0;
    unsigned d = 1;
    unsigned degree() const { return f * e; }
};

bool holds(const FieldPtr& M, const Shape& S, u64 a, i64 v) {
    if (v % static_cast<i64>(S.d) != 0) return false;
    const u64 m = M->q() - 1;
    const u64 vs = nt::mod(v / static_cast<i64>(S.d), m);
    return (nt::mod(static_cast<i64>(a), m) + m - nt::mulmod(S.c, vs, m)) % m % S.k == 0;
}

bool holds(const FieldPtr& M, const Shape& big, const Shape& small) {
    return holds(M, big, small.k, 0) && holds(M, big, small.c, small.d);
}

Shape image_shape(const Embedding& x) {
    const FieldPtr& M = x.target;
    return Shape{x.source->f(), x.source->e(), (M->q() - 1) / (x.source->q() - 1), x.c, x.d};
}

std::vector<Shape> all_shapes(const FieldPtr& M) {
    std::vector<Shape> out;
    const u64 m = M->q() - 1;
    for (u64 f : nt::divisors(M->f()))
        for (u64 e : nt::divisors(M->e())) {
            const u64 k = m / (nt::ipow(M->p(), static_cast<unsigned>(f)) - 1);
            for (u64 c = 0; c < k; ++c)
                if ((nt::mulmod(c, e, m) + M->u()) % m % k == 0)
                    out.push_back(Shape{static_cast<unsigned>(f), static_cast<unsigned>(e), k, c, static_cast<unsigned>(M->e() / e)});
        }
    return out;
}

FieldPtr realize(const FieldPtr& M, const Shape& S, unsigned digits) {
    const u64 m = M->q() - 1;
    const u64 qS1 = nt::ipow(M->p(), S.f) - 1;
    const u64 val = (nt::mulmod(S.c, S.e, m) + M->u()) % m;
    local::FieldSpec spec{M->p(), S.f, S.e, (val / S.k) % qS1, M->residue().minpoly(M->residue().gen_pow(S.k))};
    return local::TowerField::make(spec, digits);
}

// X -> K at working precision, from X1 -> M and K1 -> M at one digit.
std::shared_ptr<const RelativeExtension> transplant(const FieldPtr& X, const FieldPtr& X1, const Embedding& intoM,
                                                    const FieldPtr& K, const Embedding& K1M) {
    for (const auto& cand : local::embeddings(X1, K1M.source))
        if (K1M.after(cand) == intoM) return std::make_shared<RelativeExtension>(Embedding{X, K, cand.j, cand.c, cand.d});
    fail(ErrorKind::InternalContradiction, "compositum does not contain the field");
}

FieldPtr ambient(const FieldPtr& E, const FieldPtr& L, const FieldPtr& E1, const FieldPtr& L1) {
    const u64 p = E->p();
    const unsigned eM = static_cast<unsigned>(nt::lcm(E->e(), L->e()));
    const unsigned f0 = static_cast<unsigned>(nt::lcm(E->f(), L->f()));
    for (unsigned f = f0; f <= 64; f += f0) {
        long double q = 1;
        for (unsigned i = 0; i < f; ++i) q *= static_cast<long double>(p);
        if (q > static_cast<long double>(1u << 22)) break;
        const u64 qm1 = nt::ipow(p, f) - 1;
        if (qm1 % eM != 0) continue;
        FieldPtr M = local::TowerField::make(local::standard_spec(p, f, eM, 0), 1);
        if (local::embeddings(E1, M).size() == E->degree() && local::embeddings(L1, M).size() == L->degree()) return M;
    }
    fail(ErrorKind::AmbientTooSmall, "no ambient field within the residue-table limit");
}

} // namespace

CosetSystem double_cosets(const FieldPtr& E, const FieldPtr& L) {
    if (E->digits() != L->digits()) fail(ErrorKind::InvalidArgument, "E and L must share digits");
    if (E->p() != L->p()) fail(ErrorKind::InvalidArgument, "fields over different primes");
    const unsigned D = E->digits();
    FieldPtr E1 = local::TowerField::make(E->spec(), 1);
    FieldPtr L1 = local::TowerField::make(L->spec(), 1);
    CosetSystem out;
    out.M = ambient(E, L, E1, L1);
    const FieldPtr& M = out.M;

    const Embedding iE = local::embeddings(E1, M).front();
    auto embL = local::all_embeddings(L1, M);
    auto gal = local::automorphisms(M);
    out.gal_size = gal.size();
    if (gal.size() != M->degree()) fail(ErrorKind::AmbientTooSmall, "ambient field is not Galois");
    std::vector<Embedding> stab;
    for (const auto& s : gal)
        if (s.after(iE) == iE) stab.push_back(s);
    out.stabilizer_size = stab.size();

    const auto shapes = all_shapes(M);
    const Shape sE = image_shape(iE);
    std::vector<bool> used(embL.size(), false);
    std::size_t total = 0;
    bool sizes_ok = true;
    for (std::size_t i = 0; i < embL.size(); ++i) {
        if (used[i]) continue;
        CosetDatum cd;
        cd.ell = embL[i];
        for (const auto& s : stab) {
            Embedding img = s.after(embL[i]);
            for (std::size_t k = 0; k < embL.size(); ++k)
                if (!used[k] && embL[k] == img) {
                    used[k] = true;
                    ++cd.orbit_size;
                }
        }
        const Shape sL = image_shape(cd.ell);
        const Shape* best = nullptr;
        const Shape* meet = nullptr;
        for (const auto& S : shapes) {
            if (holds(M, S, sE) && holds(M, S, sL) && (!best || S.degree() < best->degree())) best = &S;
            if (holds(M, sE, S) && holds(M, sL, S) && (!meet || S.degree() > meet->degree())) meet = &S;
        }
        if (!best || !meet) fail(ErrorKind::InternalContradiction, "subfield lattice of the ambient field is incomplete");
        FieldPtr K1 = realize(M, *best, 1);
        cd.K = realize(M, *best, D);
        const Embedding K1M{K1, M, best->k, best->c, best->d};
        cd.relE = transplant(E, E1, iE, cd.K, K1M);
        cd.relL = transplant(L, L1, cd.ell, cd.K, K1M);
        cd.e = cd.K->e() / E->e();
        cd.Nprime = cd.K->e() / L->e();
        cd.e2p = meet->e;
        cd.e1 = L->e() / meet->e;
        cd.e2 = E->e() / meet->e;
        sizes_ok = sizes_ok && cd.orbit_size * E->degree() == cd.K->degree();
        total += cd.orbit_size;
        out.cosets.push_back(std::move(cd));
    }
    std::size_t weighted = 0;
    for (const auto& cd : out.cosets) weighted += cd.K->degree();
    out.mackey_ok = sizes_ok && total == L->degree() && weighted == static_cast<std::size_t>(E->degree()) * L->degree() &&
                    stab.size() * E->degree() == gal.size();
    return out;
}

} // namespace lcs::lab
