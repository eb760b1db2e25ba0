// Copyright 2026 the nil2hsp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "hsp/errors.hpp"
#include "hsp/rng.hpp"

namespace hsp::fp {

using Fp = std::uint64_t;

namespace detail {

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p)
{
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t p)
{
    std::uint64_t acc = 1 % p;
    base %= p;
    while (exp != 0) {
        if (exp & 1) {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    return acc;
}

} // namespace detail

/// Deterministic Miller-Rabin, valid for all n < 3.3 * 10^24 (we cap at 2^61).
inline bool is_prime_u64(std::uint64_t n)
{
    if (n < 2) {
        return false;
    }
    for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % q == 0) {
            return n == q;
        }
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = detail::pow_mod(a, d, n);
        if (x == 1 || x == n - 1) {
            continue;
        }
        bool witness = true;
        for (int r = 1; r < s; ++r) {
            x = detail::mul_mod(x, x, n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) {
            return false;
        }
    }
    return true;
}

/**
 * A validated prime modulus. Field elements are plain uint64 residues in
 * [0, p); the modulus travels with the Prime, not with each value.
 */
class Prime {
  public:
    explicit Prime(std::uint64_t p) : p_(p)
    {
        if (p > (1ULL << 61)) {
            throw std::invalid_argument("Prime: modulus exceeds 2^61");
        }
        if (!is_prime_u64(p)) {
            throw std::invalid_argument("Prime: modulus is not prime");
        }
    }

    std::uint64_t value() const { return p_; }
    bool is_two() const { return p_ == 2; }

    Fp reduce(std::uint64_t x) const { return x % p_; }

    Fp reduce_signed(std::int64_t x) const
    {
        std::int64_t r = x % static_cast<std::int64_t>(p_);
        if (r < 0) {
            r += static_cast<std::int64_t>(p_);
        }
        return static_cast<Fp>(r);
    }

    Fp add(Fp a, Fp b) const
    {
        Fp s = a + b;
        return s >= p_ ? s - p_ : s;
    }

    Fp sub(Fp a, Fp b) const { return a >= b ? a - b : a + p_ - b; }
    Fp neg(Fp a) const { return a == 0 ? 0 : p_ - a; }
    Fp mul(Fp a, Fp b) const { return detail::mul_mod(a, b, p_); }
    Fp pow(Fp a, std::uint64_t e) const { return detail::pow_mod(a, e, p_); }

    Fp inv(Fp a) const
    {
        if (a == 0) {
            throw std::domain_error("Prime::inv: non-invertible");
        }
        return pow(a, p_ - 2);
    }

    bool operator==(const Prime& o) const { return p_ == o.p_; }
    bool operator!=(const Prime& o) const { return p_ != o.p_; }

  private:
    std::uint64_t p_;
};

/// Euler criterion. Defined for nonzero a and odd p only.
inline bool is_qr(Fp a, const Prime& p)
{
    if (p.is_two()) {
        throw std::domain_error("is_qr: p = 2 has no residue classes to test");
    }
    if (a == 0) {
        throw std::domain_error("is_qr: zero is neither residue nor nonresidue");
    }
    return p.pow(a, (p.value() - 1) / 2) == 1;
}

/// Las Vegas nonresidue search: random candidates through the Euler test.
/// Half of Z_p^* fails the test, so two draws are expected.
inline Fp find_nonresidue(const Prime& p, SplitRng& rng)
{
    if (p.is_two()) {
        throw std::domain_error("find_nonresidue: requires odd p");
    }
    if (p.value() == 3) {
        return 2;
    }
    for (;;) {
        Fp cand = 2 + rng.below(p.value() - 2); // uniform in [2, p-1]
        if (!is_qr(cand, p)) {
            return cand;
        }
    }
}

/**
 * Tonelli-Shanks square root. Requires a to be a residue (or zero); the
 * canonical root min(x, p-x) is returned so runs are seed-reproducible.
 */
inline Fp sqrt_mod(Fp a, const Prime& p, SplitRng& rng)
{
    const std::uint64_t pv = p.value();
    if (a == 0) {
        return 0;
    }
    if (pv == 2) {
        return a;
    }
    if (!is_qr(a, p)) {
        throw std::domain_error("sqrt_mod: argument is a quadratic nonresidue");
    }
    std::uint64_t x;
    if (pv % 4 == 3) {
        x = p.pow(a, (pv + 1) / 4);
    } else {
        // Write p-1 = q * 2^s with q odd.
        std::uint64_t q = pv - 1;
        int s = 0;
        while ((q & 1) == 0) {
            q >>= 1;
            ++s;
        }
        std::uint64_t z = find_nonresidue(p, rng);
        std::uint64_t m = static_cast<std::uint64_t>(s);
        std::uint64_t c = p.pow(z, q);
        std::uint64_t t = p.pow(a, q);
        std::uint64_t r = p.pow(a, (q + 1) / 2);
        while (t != 1) {
            std::uint64_t i = 0;
            std::uint64_t t2i = t;
            while (t2i != 1) {
                t2i = p.mul(t2i, t2i);
                ++i;
            }
            std::uint64_t b = c;
            for (std::uint64_t k = 0; k + i + 1 < m; ++k) {
                b = p.mul(b, b);
            }
            m = i;
            c = p.mul(b, b);
            t = p.mul(t, c);
            r = p.mul(r, b);
        }
        x = r;
    }
    return x <= pv - x ? x : pv - x;
}

/**
 * Nontrivial zero of a*x^2 + b*y^2 + c*z^2 over Z_p, p odd.
 *
 * A zero coefficient yields the matching unit vector. Otherwise z is fixed
 * to 1 and random y are tried until -(c + b*y^2)/a is a square; a
 * nondegenerate conic over Z_p has at least p-1 points, so the loop
 * terminates after an expected O(1) residue tests.
 */
inline std::array<Fp, 3> solve_ternary_diagonal(Fp a, Fp b, Fp c, const Prime& p, SplitRng& rng)
{
    if (p.is_two()) {
        throw std::invalid_argument("solve_ternary_diagonal: requires odd p");
    }
    a = p.reduce(a);
    b = p.reduce(b);
    c = p.reduce(c);
    if (a == 0) {
        return {1, 0, 0};
    }
    if (b == 0) {
        return {0, 1, 0};
    }
    if (c == 0) {
        return {0, 0, 1};
    }
    const Fp inv_a = p.inv(a);
    for (;;) {
        Fp y = rng.below(p.value());
        Fp t = p.mul(p.neg(p.add(c, p.mul(b, p.mul(y, y)))), inv_a);
        if (t == 0 || is_qr(t, p)) {
            Fp x = sqrt_mod(t, p, rng);
            return {x, y, 1};
        }
    }
}

/**
 * Solution of x^2 + alpha*y^2 + b = 0 over Z_p, p odd, alpha nonzero.
 * Always solvable; b = 0 returns (0, 0).
 */
inline std::pair<Fp, Fp> solve_binary_inhomogeneous(Fp alpha, Fp b, const Prime& p, SplitRng& rng)
{
    if (p.is_two()) {
        throw std::invalid_argument("solve_binary_inhomogeneous: requires odd p");
    }
    alpha = p.reduce(alpha);
    b = p.reduce(b);
    if (alpha == 0) {
        throw std::invalid_argument("solve_binary_inhomogeneous: alpha must be nonzero");
    }
    if (b == 0) {
        return {0, 0};
    }
    for (;;) {
        Fp y = rng.below(p.value());
        Fp t = p.neg(p.add(b, p.mul(alpha, p.mul(y, y))));
        if (t == 0 || is_qr(t, p)) {
            return {sqrt_mod(t, p, rng), y};
        }
    }
}

} // namespace hsp::fp
