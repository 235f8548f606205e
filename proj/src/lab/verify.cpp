#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "lcs/epsilon/epsilon.hpp"
#include "lcs/error.hpp"
#include "lcs/lab/sharpness.hpp"

namespace lcs::lab {

using exact::CycNumber;
using exact::ScaledCyc;

namespace {

double since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// The same element viewed in another copy of the same field.
TowerElement rehome(const TowerElement& x, const FieldPtr& F) {
    if (x.is_zero()) return TowerElement::zero(F, static_cast<int>(std::min<i64>(x.valuation(), TowerElement::kExact)));
    return TowerElement::from_unit(F, x.valuation(), x.unit(), x.relprec());
}

template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn fn) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

} // namespace

const char* to_string(ValCase c) {
    switch (c) {
    case ValCase::BetaDominates: return "beta-dominates";
    case ValCase::AlphaDominates: return "alpha-dominates";
    case ValCase::EqualVal: return "equal-valuation";
    }
    return "?";
}

CaseData classify_case(unsigned N, unsigned eL, unsigned r, int m) {
    CaseData d;
    d.eK = static_cast<unsigned>(nt::lcm(N, eL));
    d.e = d.eK / N;
    d.Nprime = d.eK / eL;
    d.val_beta = -static_cast<i64>(d.e) * (2 * static_cast<i64>(N) - 2);
    if (m <= 0) {
        d.val_alpha = TowerElement::kExact;
        d.vcase = ValCase::BetaDominates;
        return d;
    }
    d.val_alpha = -static_cast<i64>(m) * d.Nprime;
    if (d.val_beta < d.val_alpha) d.vcase = ValCase::BetaDominates;
    else if (d.val_beta > d.val_alpha) d.vcase = ValCase::AlphaDominates;
    else {
        d.vcase = ValCase::EqualVal;
        // e(2N-2) = m N' forces N | 2 e_L, impossible once e_L <= r < (N-1)/2.
        if ((2 * eL) % N != 0) fail(ErrorKind::InternalContradiction, "equal valuations without N | 2 e_L");
        if (2 * r < N - 1) fail(ErrorKind::InternalContradiction, "equal valuations with 2r < N - 1");
    }
    return d;
}

i64 a_exponent(i64 i, unsigned N, int m, unsigned e1, unsigned e2p, unsigned s) {
    if (i < 1 || i > static_cast<i64>(s)) fail(ErrorKind::RangeViolation, "i outside [1, s]");
    if (N % e2p != 0) fail(ErrorKind::RangeViolation, "e2' must divide N");
    const i64 n = N;
    const i64 A = i * (2 * n - 2) + n * nt::ceil_div(-i * m, static_cast<i64>(e1) * e2p);
    if (nt::mod(A + 2 * i, N) != 0) fail(ErrorKind::InternalContradiction, "A is not -2i modulo N");
    if (2 * s < N - 1 && A < 2) fail(ErrorKind::RangeViolation, "A below 2");
    return A;
}

i64 a_exponent_case3(i64 i, unsigned N, int m, unsigned eL) {
    const i64 n = N;
    return -i * (2 * n - 2) + n * nt::ceil_div(i * m, static_cast<i64>(eL));
}

CaseScanReport case_scan(const std::vector<unsigned>& Ns, int max_m) {
    CaseScanReport rep;
    for (unsigned N : Ns) {
        for (unsigned eL = 1; 2 * eL < N - 1; ++eL) {
            ++rep.direct_checks;
            if ((2 * eL) % N == 0) ++rep.direct_failures;
        }
        for (unsigned r = 1; 2 * r < N - 1; ++r) {
            for (u64 f : nt::divisors(r)) {
                const unsigned eL = static_cast<unsigned>(r / f);
                if (std::gcd(eL, N) != 1) continue;
                for (int m = 0; m <= max_m; ++m) {
                    ++rep.rows;
                    CaseData d;
                    try {
                        d = classify_case(N, eL, r, m);
                    } catch (const Error& err) {
                        ++rep.equal_val;
                        rep.notes.push_back(err.what());
                        continue;
                    }
                    if (d.vcase == ValCase::EqualVal) {
                        ++rep.equal_val;
                        continue;
                    }
                    if (m == 0) continue;
                    for (unsigned i = 1; i <= r; ++i) {
                        if (d.vcase == ValCase::BetaDominates) {
                            ++rep.case2;
                            ++rep.a_checks;
                            try {
                                i64 A = a_exponent(i, N, m, eL, 1, r);
                                if (A < 2 || nt::mod(A + 2 * static_cast<i64>(i), N) != 0) ++rep.a_failures;
                            } catch (const Error& err) {
                                ++rep.a_failures;
                                rep.notes.push_back(err.what());
                            }
                        } else {
                            ++rep.case3;
                            ++rep.a3_checks;
                            i64 A3 = a_exponent_case3(i, N, m, eL);
                            if (A3 < 2 || nt::mod(A3 - 2 * static_cast<i64>(i), N) != 0) ++rep.a3_failures;
                            const i64 naive = -(static_cast<i64>(i) * (2 * static_cast<i64>(N) - 2) +
                                                static_cast<i64>(N) * nt::ceil_div(-static_cast<i64>(i) * m, eL));
                            if (naive < 2) ++rep.a3_negated_below_two;
                        }
                    }
                }
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------

struct LData {
    CosetSystem cosets;
    std::shared_ptr<RelativeExtension> FL;  // Q_p -> L
};

struct EquContext {
    PhiPair pair;
    Subfield FE;
    std::mutex mu;
    std::map<std::string, std::shared_ptr<const LData>> cache;

    std::shared_ptr<const LData> get(const FieldPtr& L) {
        const std::string key = L->name() + "/" + std::to_string(L->u()) + "/" + std::to_string(L->digits());
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        auto d = std::make_shared<LData>();
        d->cosets = double_cosets(pair.E, L);
        d->FL = std::make_shared<RelativeExtension>(local::prime_subfield(L).emb);
        cache.emplace(key, d);
        return d;
    }
};

std::shared_ptr<EquContext> make_equ_context(const PhiPair& pair) {
    auto ctx = std::make_shared<EquContext>();
    ctx->pair = pair;
    ctx->FE = local::prime_subfield(pair.E);
    return ctx;
}

namespace {

TowerElement coset_argument(const PhiPair& pair, const AdmissiblePair& pr, const CosetDatum& cd) {
    TowerElement x = cd.relE->embedding().apply(pair.beta);
    if (!pr.alpha.is_zero()) x = x + cd.relL->embedding().apply(pr.alpha);
    return x;
}

// Elementary symmetric functions e_1..e_r of the conjugates of a over Q_p.
std::vector<TowerElement> elementary(const RelativeExtension& FL, const TowerElement& a) {
    const FieldPtr& L = FL.top();
    const unsigned r = FL.degree();
    i64 s = 0;
    TowerElement scaled = a;
    if (a.valuation() < 0) {
        s = nt::ceil_div(-a.valuation(), static_cast<i64>(L->e()));
        scaled = a * TowerElement::from_int(L, static_cast<i64>(nt::ipow(L->p(), static_cast<unsigned>(s))));
    }
    auto cp = FL.charpoly(scaled);
    const TowerElement pinv = TowerElement::p_inverse(FL.base());
    std::vector<TowerElement> out(r + 1);
    for (unsigned i = 1; i <= r; ++i) {
        TowerElement ei = cp[r - i];
        if (i % 2 == 1) ei = -ei;
        if (s > 0) ei = ei * pinv.pow(s * static_cast<i64>(i));
        out[i] = ei;
    }
    return out;
}

} // namespace

std::pair<RootOfUnity, RootOfUnity> route_a(const PhiPair& pair, const AdmissiblePair& pr, EquContext& ctx) {
    auto ld = ctx.get(pr.L);
    RootOfUnity a1 = RootOfUnity::one(), a2 = RootOfUnity::one();
    for (const auto& cd : ld->cosets.cosets) {
        TowerElement y = cd.relE->norm(coset_argument(pair, pr, cd));
        a1 = a1 * pair.phi1.eval(y);
        a2 = a2 * pair.phi2.eval(y);
    }
    return {a1, a2};
}

bool Equ6Report::invariants_ok() const {
    for (const auto& c : cosets)
        if (!c.conductor_ok || !c.cdata_ok || !c.layer_ok || !c.epsilon_ok) return false;
    return true;
}

Equ6Report verify_equ6(const PhiPair& pair, const AdmissiblePair& pr, EquContext& ctx, bool deep) {
    const auto t0 = std::chrono::steady_clock::now();
    Equ6Report rep;
    rep.pair_id = pr.id;
    auto ld = ctx.get(pr.L);
    const auto& cs = ld->cosets;
    if (!cs.mackey_ok) fail(ErrorKind::InternalContradiction, "double coset count failed the Mackey check");
    const unsigned N = pair.config.N;
    const unsigned r = pr.L->degree();
    const CosetDatum& c0 = cs.cosets.front();
    const i64 vb = -static_cast<i64>(c0.e) * (2 * static_cast<i64>(N) - 2);
    const i64 va = pr.alpha.is_zero() ? TowerElement::kExact : -static_cast<i64>(pr.m) * c0.Nprime;
    rep.vcase = vb < va ? ValCase::BetaDominates : vb > va ? ValCase::AlphaDominates : ValCase::EqualVal;
    if (rep.vcase == ValCase::EqualVal) fail(ErrorKind::UnsupportedShape, "equal valuations of beta and alpha");

    // Route A: one norm per double coset.
    rep.routeA1 = rep.routeA2 = RootOfUnity::one();
    for (const auto& cd : cs.cosets) {
        CosetValue cv;
        cv.K = cd.K->name();
        cv.orbit_size = cd.orbit_size;
        const TowerElement x = coset_argument(pair, pr, cd);
        const TowerElement y = cd.relE->norm(x);
        cv.v1 = pair.phi1.eval(y);
        cv.v2 = pair.phi2.eval(y);
        rep.routeA1 = rep.routeA1 * cv.v1;
        rep.routeA2 = rep.routeA2 * cv.v2;
        if (deep) {
            cv.deep = true;
            chars::NormComposite th1(cd.K, {{pair.phi1, cd.relE}, {pr.lambda, cd.relL}});
            chars::NormComposite th2(cd.K, {{pair.phi2, cd.relE}, {pr.lambda, cd.relL}});
            const int f = static_cast<int>(std::max<i64>(-vb, pr.alpha.is_zero() ? 0 : -va)) + 1;
            cv.conductor_ok = th1.conductor() == f && th2.conductor() == f;
            const int rr = (f + 1) / 2;
            cv.cdata_ok = (th1.c_theta() - x).truncated(1 - rr).is_zero() && (th2.c_theta() - x).truncated(1 - rr).is_zero();
            cv.layer_ok = epsilon::agree_on_layer(th1, th2, f / 2);
            if (cv.conductor_ok && cv.cdata_ok) {
                const TowerElement c = th1.c_theta();
                RootOfUnity quotient = th2.eval(c) / th1.eval(c);
                ScaledCyc expect(CycNumber::from_root(quotient), 0, cd.K->q());
                cv.epsilon_ok = epsilon::epsilon_ratio(th1, th2).value == expect;
            } else {
                cv.epsilon_ok = false;
            }
        }
        rep.cosets.push_back(cv);
    }
    rep.routeA_equal = rep.routeA1 == rep.routeA2;

    // Route B: factor out the dominant term, reduce to symmetric functions over Q_p.
    const FieldPtr& E = pair.E;
    const TowerElement one = TowerElement::from_int(E, 1);
    TowerElement arg = one;
    rep.bound_ok = true;
    rep.min_a = TowerElement::kExact;
    RootOfUnity lead1 = RootOfUnity::one(), lead2 = RootOfUnity::one();
    if (rep.vcase == ValCase::BetaDominates) {
        lead1 = pair.phi1.eval(pair.beta).pow(r);
        lead2 = pair.phi2.eval(pair.beta).pow(r);
        if (!pr.alpha.is_zero()) {
            auto el = elementary(*ld->FL, pr.alpha);
            const TowerElement binv = pair.beta.inv();
            for (unsigned i = 1; i <= r; ++i) {
                TowerElement t = binv.pow(i) * ctx.FE.emb.apply(rehome(el[i], ctx.FE.field));
                const i64 A = a_exponent(i, N, pr.m, c0.e1, c0.e2p, r);
                rep.min_a = std::min(rep.min_a, A);
                if (!t.is_zero() && t.valuation() < A) rep.bound_ok = false;
                arg = arg + t;
            }
        }
    } else {
        auto el = elementary(*ld->FL, pr.alpha.inv());
        auto ea = elementary(*ld->FL, pr.alpha);
        TowerElement normA = ctx.FE.emb.apply(rehome(ea[r], ctx.FE.field));  // e_r(alpha) = N_{L/F}(alpha)
        lead1 = pair.phi1.eval(normA);
        lead2 = pair.phi2.eval(normA);
        for (unsigned i = 1; i <= r; ++i) {
            TowerElement t = pair.beta.pow(i) * ctx.FE.emb.apply(rehome(el[i], ctx.FE.field));
            const i64 A = a_exponent_case3(i, N, pr.m, pr.L->e());
            rep.min_a = std::min(rep.min_a, A);
            if (!t.is_zero() && t.valuation() < A) rep.bound_ok = false;
            arg = arg + t;
        }
    }
    TowerElement dev = arg - one;
    rep.arg_valuation = dev.valuation();
    rep.routeB_member = rep.arg_valuation >= 2;
    rep.routeB1 = lead1 * pair.phi1.eval(arg);
    rep.routeB2 = lead2 * pair.phi2.eval(arg);
    rep.routes_agree = rep.routeA1 == rep.routeB1 && rep.routeA2 == rep.routeB2;
    rep.seconds = since(t0);
    return rep;
}

Equ6Report verify_equ6(const PhiPair& pair, const AdmissiblePair& pr) {
    auto ctx = make_equ_context(pair);
    return verify_equ6(pair, pr, *ctx, true);
}

FamilyReport verify_equ6_family(const PhiPair& pair, const std::vector<AdmissiblePair>& pairs, const Equ6Options& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    FamilyReport fam;
    fam.reports.resize(pairs.size());
    auto ctx = make_equ_context(pair);
    for (const auto& pr : pairs) ctx->get(pr.L);  // build coset systems up front
    parallel_for(pairs.size(), opt.jobs, [&](std::size_t i) {
        const bool deep = opt.deep_every > 0 && i % opt.deep_every == 0;
        try {
            fam.reports[i] = verify_equ6(pair, pairs[i], *ctx, deep);
        } catch (const Error&) {
            fam.reports[i].pair_id = pairs[i].id;
            fam.reports[i].bound_ok = false;
        }
    });
    for (const auto& r : fam.reports) {
        if (r.pass()) ++fam.passed;
        else ++fam.failed;
        if (!r.cosets.empty() && r.cosets.front().deep) ++fam.deep;
    }
    fam.seconds = since(t0);
    return fam;
}

R1Report verify_r1_gamma(const PhiPair& pair, int conductor_bound, unsigned jobs) {
    const auto t0 = std::chrono::steady_clock::now();
    R1Report rep;
    const FieldPtr& E = pair.E;
    Subfield FS = local::prime_subfield(E);
    const FieldPtr& F = FS.field;
    RelativeExtension rel(FS.emb);
    const u64 p = F->p();
    // gamma classes: sum over v in [1 - bound, -1] of a_v p^v, a_v in Teich u {0}.
    std::vector<TowerElement> gammas{TowerElement::zero(F, 0)};
    for (int v = -1; v >= 1 - conductor_bound; --v) {
        std::vector<TowerElement> next;
        for (const auto& g : gammas) {
            next.push_back(g);
            for (u64 a = 0; a + 1 < p; ++a) next.push_back(g + TowerElement::monomial(F, static_cast<i64>(a), v));
        }
        gammas = std::move(next);
    }
    struct Item {
        u64 w, t;
        std::size_t g;
    };
    std::vector<Item> items;
    for (u64 w = 0; w + 1 < p; ++w)
        for (u64 t = 0; t + 1 < p; ++t)
            for (std::size_t g = 0; g < gammas.size(); ++g) items.push_back({w, t, g});

    std::vector<int> eq(items.size()), rat(items.size()), ram(items.size());
    std::vector<std::string> why(items.size());
    parallel_for(items.size(), jobs, [&](std::size_t k) {
        const Item& it = items[k];
        MulChar chi(F, RootOfUnity::make(p - 1, static_cast<i64>(it.w)), it.t, gammas[it.g]);
        try {
            MulChar up = chars::inflate(chi, rel);
            MulChar th1 = pair.phi1 * up, th2 = pair.phi2 * up;
            ram[k] = th1.conductor() >= 1 && th2.conductor() >= 1;
            auto e1 = epsilon::moy_epsilon(th1), e2 = epsilon::moy_epsilon(th2);
            eq[k] = e1.value == e2.value;
            const TowerElement c = th1.c_theta();
            RootOfUnity quotient = th2.eval(c) / th1.eval(c);
            ScaledCyc expect(CycNumber::from_root(quotient), 0, E->q());
            rat[k] = epsilon::epsilon_ratio(th1, th2).value == expect && quotient.is_one();
        } catch (const Error& err) {
            why[k] = err.what();
        }
        if (!eq[k] || !rat[k]) {
            if (why[k].empty()) why[k] = "epsilon values differ";
            why[k] = "chi(p)=z^" + std::to_string(it.w) + " t=" + std::to_string(it.t) + " gamma=" + gammas[it.g].to_string() + ": " + why[k];
        }
    });
    for (std::size_t k = 0; k < items.size(); ++k) {
        ++rep.characters;
        rep.equal += eq[k];
        rep.ratio_ok += rat[k];
        rep.ramified += ram[k];
        if ((!eq[k] || !rat[k]) && rep.failures.size() < 5) rep.failures.push_back(why[k]);
    }
    rep.seconds = since(t0);
    return rep;
}

SearchReport search_distinguisher(const PhiPair& pair, unsigned r, int conductor_bound) {
    const auto t0 = std::chrono::steady_clock::now();
    SearchReport rep;
    auto ctx = make_equ_context(pair);
    const FieldPtr& E = pair.E;
    std::vector<FieldPtr> fields;
    for (const auto& L : tame_extensions(E->p(), r, E->digits()))
        if (supported_shape(pair.config.N, L)) fields.push_back(L);
    for (int m = 0; m + 1 <= conductor_bound && !rep.found; ++m) {
        for (const auto& L : fields) {
            for (const auto& pr : enumerate_pairs_on(L, m)) {
                ++rep.examined;
                auto [a1, a2] = route_a(pair, pr, *ctx);
                if (a1 == a2) continue;
                rep.found = pr;
                rep.ratio = a1 / a2;
                break;
            }
            if (rep.found) break;
        }
    }
    if (rep.found) {
        auto fresh = make_equ_context(pair);
        auto [a1, a2] = route_a(pair, *rep.found, *fresh);
        rep.reverified = a1 / a2 == rep.ratio && !(a1 == a2);
        // lambda restricted to Q_p is an r = 1 twist, which cannot distinguish.
        Subfield FL = local::prime_subfield(rep.found->L);
        MulChar chi = chars::restrict_to(rep.found->lambda, RelativeExtension(FL.emb));
        FieldPtr F = local::prime_subfield(E).field;
        MulChar chiF(F, chi.wvalue(), chi.tame(), rehome(chi.gamma(), F));
        const int m = std::max(0, chiF.conductor() - 1);
        // gamma is kept modulo O; any lift of it is a valid alpha.
        const TowerElement& g = chiF.gamma();
        TowerElement alpha = m >= 1 ? TowerElement::from_unit(F, g.valuation(), g.unit(), F->max_precision()) : TowerElement::zero(F, 0);
        AdmissiblePair down{F, chiF, m, alpha, "restriction of " + rep.found->id};
        auto [b1, b2] = route_a(pair, down, *fresh);
        rep.r1_shape_distinguishes = !(b1 == b2);
    }
    rep.seconds = since(t0);
    return rep;
}

} // namespace lcs::lab
