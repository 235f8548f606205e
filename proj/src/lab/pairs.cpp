#include <algorithm>
#include <numeric>
#include <sstream>

#include "lcs/error.hpp"
#include "lcs/lab/sharpness.hpp"

namespace lcs::lab {

std::vector<FieldPtr> tame_extensions(u64 p, unsigned r, unsigned digits) {
    if (r == 0 || r % p == 0) fail(ErrorKind::UnsupportedShape, "degree must be positive and prime to p");
    std::vector<FieldPtr> out;
    auto divs = nt::divisors(r);
    std::reverse(divs.begin(), divs.end());  // unramified first
    for (u64 f : divs) {
        const unsigned e = static_cast<unsigned>(r / f);
        const u64 q1 = nt::ipow(p, static_cast<unsigned>(f)) - 1;
        const u64 classes = std::gcd(static_cast<u64>(e), q1);
        const std::size_t start = out.size();
        for (u64 u = 0; u < classes; ++u) {
            FieldPtr L = local::TowerField::make(local::standard_spec(p, static_cast<unsigned>(f), e, u), digits);
            bool seen = false;
            for (std::size_t k = start; k < out.size() && !seen; ++k) seen = !local::embeddings(L, out[k]).empty();
            if (!seen) out.push_back(L);
        }
    }
    return out;
}

bool supported_shape(unsigned N, const FieldPtr& L) { return std::gcd(L->e(), N) == 1; }

namespace {

std::string coeff_string(const std::vector<u64>& idx, u64 zero) {
    std::ostringstream os;
    os << '[';
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (k) os << ' ';
        if (idx[k] == zero) os << '0';
        else os << "z^" << idx[k];
    }
    os << ']';
    return os.str();
}

std::optional<MulChar> admissible_lambda(const FieldPtr& L, const TowerElement& alpha) {
    if (L->degree() == 1) return MulChar(L, RootOfUnity::one(), 0, alpha);
    // Conductor one needs an unramified L and a tame part that is generic.
    if (alpha.is_zero() && L->e() > 1) return std::nullopt;
    Subfield F = local::prime_subfield(L);
    for (u64 t = alpha.is_zero() ? 1 : 0; t + 1 < L->q(); ++t) {
        MulChar lam(L, RootOfUnity::one(), t, alpha);
        if (chars::is_admissible(lam, F)) return lam;
    }
    return std::nullopt;
}

} // namespace

std::vector<AdmissiblePair> enumerate_pairs_on(const FieldPtr& L, int m) {
    std::vector<AdmissiblePair> out;
    if (m < 0) return out;
    const u64 q = L->q();
    if (m == 0) {
        TowerElement zero = TowerElement::zero(L, 0);
        auto lam = admissible_lambda(L, zero);
        if (lam) out.push_back(AdmissiblePair{L, *lam, 0, zero, L->name() + ":m=0"});
        return out;
    }
    const int len = (m + 1) / 2;
    const TowerElement pim = TowerElement::uniformizer(L).pow(m);
    auto autos = local::automorphisms(L);
    auto key = [&](const TowerElement& x) { return (x * pim).truncated(len).raw(); };

    std::vector<u64> idx(static_cast<std::size_t>(len), 0);  // idx[k] == q - 1 stands for 0, k > 0
    while (true) {
        TowerElement alpha = TowerElement::zero(L);
        for (int k = 0; k < len; ++k)
            if (idx[k] != q - 1) alpha = alpha + TowerElement::monomial(L, static_cast<i64>(idx[k]), k - m);
        local::Raw own = key(alpha);
        bool minimal = true;
        for (const auto& s : autos) {
            local::Raw other = key(s.apply(alpha));
            if (other < own) {
                minimal = false;
                break;
            }
        }
        if (minimal) {
            if (auto lam = admissible_lambda(L, alpha))
                out.push_back(AdmissiblePair{L, *lam, m, alpha, L->name() + ":m=" + std::to_string(m) + ":" + coeff_string(idx, q - 1)});
        }
        int k = len - 1;
        for (; k >= 0; --k) {
            const u64 limit = k == 0 ? q - 1 : q;
            if (++idx[k] < limit) break;
            idx[k] = 0;
        }
        if (k < 0) break;
    }
    return out;
}

std::vector<AdmissiblePair> enumerate_tame_pairs(u64 p, unsigned r, int conductor_bound, unsigned digits) {
    std::vector<AdmissiblePair> out;
    for (const auto& L : tame_extensions(p, r, digits))
        for (int m = 0; m + 1 <= conductor_bound; ++m) {
            auto part = enumerate_pairs_on(L, m);
            out.insert(out.end(), part.begin(), part.end());
        }
    return out;
}

} // namespace lcs::lab
