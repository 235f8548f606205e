#pragma once

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "lcs/error.hpp"

namespace lcs::nt {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>((static_cast<u128>(a) * b) % m); }

inline u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

// Non-negative residue of a (possibly negative) integer.
inline u64 mod(i64 a, u64 m) {
    i64 r = a % static_cast<i64>(m);
    return static_cast<u64>(r < 0 ? r + static_cast<i64>(m) : r);
}

inline u64 lcm(u64 a, u64 b) {
    if (a == 0 || b == 0) return 0;
    u64 g = std::gcd(a, b);
    u64 q = a / g;
    if (q != 0 && b > UINT64_MAX / q) fail(ErrorKind::Capacity, "lcm overflow");
    return q * b;
}

inline u64 ipow(u64 b, unsigned e) {
    u64 r = 1;
    for (unsigned i = 0; i < e; ++i) {
        if (b != 0 && r > UINT64_MAX / b) fail(ErrorKind::Capacity, "integer power overflow");
        r *= b;
    }
    return r;
}

// Extended gcd: returns g and x, y with a*x + b*y = g.
inline i64 egcd(i64 a, i64 b, i64& x, i64& y) {
    if (b == 0) {
        x = a >= 0 ? 1 : -1;
        y = 0;
        return a >= 0 ? a : -a;
    }
    i64 x1, y1;
    i64 g = egcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

// Inverse of a modulo m; throws if not invertible.
inline u64 invmod(u64 a, u64 m) {
    i64 x, y;
    i64 g = egcd(static_cast<i64>(a % m), static_cast<i64>(m), x, y);
    if (g != 1) fail(ErrorKind::InvalidArgument, "element not invertible modulo " + std::to_string(m));
    return mod(x, m);
}

// Solve a*x == b (mod m). Returns all solutions in [0, m).
inline std::vector<u64> solve_linear(u64 a, u64 b, u64 m) {
    a %= m;
    b %= m;
    u64 g = std::gcd(a, m);
    if (g == 0) g = m;
    std::vector<u64> out;
    if (b % g != 0) return out;
    u64 mg = m / g;
    u64 x0 = mg == 1 ? 0 : mulmod((b / g) % mg, invmod((a / g) % mg, mg), mg);
    for (u64 t = 0; t < g; ++t) out.push_back(x0 + t * mg);
    return out;
}

inline std::vector<u64> prime_factors(u64 n) {
    std::vector<u64> f;
    for (u64 d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            f.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) f.push_back(n);
    return f;
}

inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline u64 euler_phi(u64 n) {
    u64 r = n;
    for (u64 q : prime_factors(n)) r = r / q * (q - 1);
    return r;
}

inline std::vector<u64> divisors(u64 n) {
    std::vector<u64> d;
    for (u64 i = 1; i <= n; ++i)
        if (n % i == 0) d.push_back(i);
    return d;
}

// p-adic valuation of a nonzero integer.
inline int vp(u64 n, u64 p) {
    int v = 0;
    while (n != 0 && n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

inline i64 floor_div(i64 a, i64 b) {
    i64 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline i64 ceil_div(i64 a, i64 b) { return -floor_div(-a, b); }

} // namespace lcs::nt
