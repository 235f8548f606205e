#include "lcs/epsilon/epsilon.hpp"

#include <map>
#include <sstream>
#include <thread>

#include "lcs/error.hpp"

namespace lcs::epsilon {

using chars::psi;
using local::FieldPtr;
using local::Raw;
using nt::i64;

namespace {

constexpr u64 kMaxBins = u64{1} << 24;

TowerElement one_of(const FieldPtr& T) { return TowerElement::from_int(T, 1); }

u64 lcm_orders(u64 m, const RootOfUnity& r) {
    u64 l = nt::lcm(m, r.order);
    if (l > kMaxBins) fail(ErrorKind::Capacity, "character values need too large a cyclotomic modulus");
    return l;
}

// Sum of roots of unity accumulated as exponent counts.
ScaledCyc sum_roots(const std::vector<RootOfUnity>& roots, int qhalf, u64 q) {
    u64 M = 1;
    for (const auto& r : roots) M = lcm_orders(M, r);
    std::vector<i64> bins(M, 0);
    for (const auto& r : roots) ++bins[r.exponent_in(M)];
    return ScaledCyc(CycNumber::from_group_ring(M, bins), qhalf, q);
}

std::string scaled_string(const ScaledCyc& s) {
    std::ostringstream os;
    os << "(" << s.num.to_string() << ")*q^(" << s.qhalf << "/2)";
    return os.str();
}

} // namespace

const char* to_string(Provenance p) {
    switch (p) {
    case Provenance::Moy: return "moy";
    case Provenance::Oracle: return "oracle";
    case Provenance::Ratio: return "ratio";
    }
    return "?";
}

ScaledCyc gauss_sum(const Character& theta, const TowerElement& c) {
    int f = theta.conductor();
    if (f % 2 == 0) fail(ErrorKind::EvenConductor, "Gauss sum factor needs odd conductor");
    if (f < 3) fail(ErrorKind::ConductorTooSmall, "Gauss sum factor needs conductor >= 3");
    const FieldPtr& T = theta.field();
    const int n = (f - 1) / 2;
    const TowerElement one = one_of(T);
    std::vector<RootOfUnity> terms;
    terms.reserve(T->q());
    terms.push_back(RootOfUnity::one());  // a = 0
    for (u64 i = 0; i + 1 < T->q(); ++i) {
        TowerElement x = TowerElement::monomial(T, static_cast<i64>(i), n);
        terms.push_back(theta.eval(one + x).inv() * psi(c * x));
    }
    return sum_roots(terms, -1, T->q());
}

ScaledCyc gauss_sum(const Character& theta) { return gauss_sum(theta, theta.c_theta()); }

ScaledCyc moy_formula(const Character& theta, const TowerElement& c) {
    int f = theta.conductor();
    if (f < 2) fail(ErrorKind::ConductorTooSmall, "Moy's formula needs conductor >= 2");
    const u64 q = theta.field()->q();
    RootOfUnity lead = theta.eval(c).inv() * psi(c);
    ScaledCyc eps(CycNumber::from_root(lead), f - 1, q);
    if (f % 2 == 1) eps = eps * gauss_sum(theta, c);
    return eps;
}

EpsilonValue moy_epsilon(const Character& theta) {
    int f = theta.conductor();
    if (f < 2) fail(ErrorKind::ConductorTooSmall, "Moy's formula needs conductor >= 2");
    TowerElement c = theta.c_theta();
    int r = (f + 1) / 2;
    TowerElement c2 = c + TowerElement::monomial(theta.field(), 1, 1 - r);
    EpsilonValue out;
    out.value = moy_formula(theta, c);
    out.conductor = f;
    out.odd = f % 2 == 1;
    out.provenance = Provenance::Moy;
    out.representative_stable = moy_formula(theta, c2) == out.value;
    return out;
}

ScaledCyc oracle_sum(const Character& theta, const TowerElement& delta, const OracleOptions& opt) {
    const FieldPtr& T = theta.field();
    const int c = theta.conductor();
    if (c < 1) fail(ErrorKind::ConductorTooSmall, "oracle sum needs conductor >= 1");
    if (delta.is_zero()) fail(ErrorKind::DivisionByZero, "oracle sum at delta = 0");
    const i64 vd = delta.valuation();
    if (vd < 1 - c) fail(ErrorKind::InvalidArgument, "psi(u delta) is not defined modulo P^c");
    const u64 q = T->q();
    const u64 qm1 = q - 1;
    {
        long double terms = static_cast<long double>(qm1);
        for (int i = 1; i < c; ++i) terms *= static_cast<long double>(q);
        if (terms > static_cast<long double>(opt.budget)) fail(ErrorKind::Capacity, "oracle sum exceeds the term budget");
    }
    const TowerElement one = one_of(T);

    // theta^-1 on delta, zeta and the layer generators 1 + a pi^n (index 0 is a = 0).
    RootOfUnity delta_inv = theta.eval(delta).inv();
    RootOfUnity zeta_inv = theta.eval(TowerElement::monomial(T, 1, 0)).inv();
    std::vector<std::vector<RootOfUnity>> layer(static_cast<std::size_t>(c));
    for (int n = 1; n < c; ++n) {
        layer[n].push_back(RootOfUnity::one());
        for (u64 i = 0; i < qm1; ++i)
            layer[n].push_back(theta.eval(one + TowerElement::monomial(T, static_cast<i64>(i), n)).inv());
    }

    // psi(delta x) = zeta_mod^(L(x)), L linear in the raw coordinates of x.
    const i64 e = T->e();
    const i64 s = vd < 0 ? nt::ceil_div(-vd, e) : 0;
    if (static_cast<unsigned>(s) + 1 > T->digits()) fail(ErrorKind::PrecisionLoss, "delta below the stored precision");
    const u64 mod = nt::ipow(T->p(), static_cast<unsigned>(s + 1));
    const TowerElement scaled = delta * TowerElement::from_int(T, static_cast<i64>(nt::ipow(T->p(), static_cast<unsigned>(s))));
    const std::size_t slots = T->raw_size();
    std::vector<u64> ell(slots);
    for (std::size_t k = 0; k < slots; ++k) {
        unsigned j = static_cast<unsigned>(k / T->f()), i = static_cast<unsigned>(k % T->f());
        ell[k] = T->raw_trace((scaled * TowerElement::monomial(T, i, j)).raw()) % mod;
    }
    auto L = [&](const Raw& x) {
        unsigned __int128 acc = 0;
        for (std::size_t k = 0; k < slots; ++k) acc += static_cast<unsigned __int128>(x[k] % mod) * ell[k];
        return static_cast<u64>(acc % mod);
    };
    // Leaf layer: a pi^(c-1) u = a zeta^j pi^(c-1) mod P^c.
    std::vector<u64> last_L(qm1, 0);
    if (c >= 2)
        for (u64 m = 0; m < qm1; ++m) {
            Raw x = T->raw_shift(T->raw_monomial(static_cast<i64>(m), 0), static_cast<unsigned>(c - 1));
            last_L[m] = L(x);
        }

    u64 M = mod;
    M = lcm_orders(M, delta_inv);
    M = lcm_orders(M, zeta_inv);
    for (const auto& l : layer)
        for (const auto& r : l) M = lcm_orders(M, r);
    const u64 psi_scale = M / mod;
    std::vector<std::vector<u64>> lexp(layer.size());
    for (std::size_t n = 0; n < layer.size(); ++n)
        for (const auto& r : layer[n]) lexp[n].push_back(r.exponent_in(M));
    const u64 zexp = zeta_inv.exponent_in(M);

    auto worker = [&](u64 j_begin, u64 j_end, std::vector<i64>& bins) {
        for (u64 j = j_begin; j < j_end; ++j) {
            const u64 base = nt::mulmod(j, zexp, M);
            auto dfs = [&](auto&& self, int n, const Raw& u, u64 acc) -> void {
                if (c == 1) {
                    ++bins[(acc + nt::mulmod(psi_scale, L(u), M)) % M];
                    return;
                }
                if (n == c - 1) {
                    const u64 Lu = L(u);
                    const auto& le = lexp[n];
                    ++bins[(acc + le[0] + nt::mulmod(psi_scale, Lu, M)) % M];
                    for (u64 i = 0; i < qm1; ++i) {
                        u64 Lx = (Lu + last_L[(i + j) % qm1]) % mod;
                        ++bins[(acc + le[i + 1] + nt::mulmod(psi_scale, Lx, M)) % M];
                    }
                    return;
                }
                self(self, n + 1, u, (acc + lexp[n][0]) % M);
                Raw shifted = T->raw_shift(u, static_cast<unsigned>(n));
                T->raw_truncate(shifted, c);
                for (u64 i = 0; i < qm1; ++i) {
                    Raw next = T->raw_add(u, T->raw_mul_zeta(shifted, static_cast<i64>(i)));
                    T->raw_truncate(next, c);
                    self(self, n + 1, next, (acc + lexp[n][i + 1]) % M);
                }
            };
            Raw u = T->raw_monomial(static_cast<i64>(j), 0);
            dfs(dfs, 1, u, base);
        }
    };

    unsigned jobs = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(qm1)));
    std::vector<std::vector<i64>> bins(jobs, std::vector<i64>(M, 0));
    if (jobs == 1) {
        worker(0, qm1, bins[0]);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < jobs; ++w) {
            u64 b = qm1 * w / jobs, en = qm1 * (w + 1) / jobs;
            pool.emplace_back(worker, b, en, std::ref(bins[w]));
        }
        for (auto& t : pool) t.join();
        for (unsigned w = 1; w < jobs; ++w)
            for (u64 k = 0; k < M; ++k) bins[0][k] += bins[w][k];
    }
    CycNumber sum = CycNumber::from_group_ring(M, bins[0]).mul_root(delta_inv);
    return ScaledCyc(sum, -c, q);
}

EpsilonValue oracle_epsilon(const Character& theta, const OracleOptions& opt) {
    int c = theta.conductor();
    EpsilonValue out;
    out.value = oracle_sum(theta, TowerElement::monomial(theta.field(), 0, 1 - c), opt);
    out.conductor = c;
    out.odd = c % 2 == 1;
    out.provenance = Provenance::Oracle;
    return out;
}

EpsilonValue epsilon_ratio(const Character& theta1, const Character& theta2) {
    int f = theta1.conductor();
    if (theta2.conductor() != f) fail(ErrorKind::ConductorMismatch, "epsilon ratio of characters with different conductors");
    if (!theta1.field()->same_as(*theta2.field())) fail(ErrorKind::InvalidArgument, "epsilon ratio across fields");
    int r = (f + 1) / 2;
    if (!(theta1.c_theta() - theta2.c_theta()).truncated(1 - r).is_zero())
        fail(ErrorKind::ConductorMismatch, "c_theta differs at the shared truncation");
    EpsilonValue a = moy_epsilon(theta1);
    EpsilonValue b = moy_epsilon(theta2);
    EpsilonValue out;
    out.value = a.value / b.value;
    out.conductor = f;
    out.odd = f % 2 == 1;
    out.provenance = Provenance::Ratio;
    out.representative_stable = a.representative_stable && b.representative_stable;
    return out;
}

bool agree_on_layer(const Character& theta1, const Character& theta2, int n) {
    const FieldPtr& T = theta1.field();
    int top = std::max(theta1.conductor(), theta2.conductor());
    const TowerElement one = one_of(T);
    for (int m = std::max(n, 1); m < top; ++m)
        for (unsigned i = 0; i < T->f(); ++i) {
            TowerElement x = one + TowerElement::monomial(T, i, m);
            if (!(theta1.eval(x) == theta2.eval(x))) return false;
        }
    return true;
}

bool ConsistencyReport::ok() const {
    for (const auto& c : classes)
        if (!c.consistent || !c.representative_stable) return false;
    for (const auto& a : classes)
        for (const auto& b : classes)
            if (b.conductor == a.conductor + 2) {
                ScaledCyc shifted = a.constant * ScaledCyc(CycNumber::from_int(1), 2, a.constant.q);
                if (!(shifted == b.constant)) return false;
            }
    return true;
}

std::string ConsistencyReport::csv() const {
    std::ostringstream os;
    os << "conductor,parity,constant,samples,consistent,representative_stable\n";
    for (const auto& c : classes)
        os << c.conductor << ',' << (c.odd ? "odd" : "even") << ',' << scaled_string(c.constant) << ',' << c.samples
           << ',' << (c.consistent ? "yes" : "no") << ',' << (c.representative_stable ? "yes" : "no") << '\n';
    return os.str();
}

ConsistencyReport moy_oracle_consistency(const std::vector<const Character*>& family, const OracleOptions& opt) {
    std::map<int, ConsistencyClass> by_conductor;
    for (const Character* theta : family) {
        EpsilonValue moy = moy_epsilon(*theta);
        EpsilonValue orc = oracle_epsilon(*theta, opt);
        ScaledCyc ratio = moy.value / orc.value;
        auto [it, fresh] = by_conductor.try_emplace(moy.conductor);
        ConsistencyClass& cls = it->second;
        if (fresh) {
            cls.conductor = moy.conductor;
            cls.odd = moy.odd;
            cls.constant = ratio;
        } else if (!(cls.constant == ratio)) {
            cls.consistent = false;
        }
        cls.representative_stable = cls.representative_stable && moy.representative_stable;
        ++cls.samples;
    }
    ConsistencyReport rep;
    for (auto& [c, cls] : by_conductor) rep.classes.push_back(cls);
    return rep;
}

} // namespace lcs::epsilon
