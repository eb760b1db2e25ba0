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

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

#include "hsp/errors.hpp"
#include "hsp/fp.hpp"
#include "hsp/linalg.hpp"
#include "hsp/rng.hpp"

namespace hsp::nil2 {

using fp::Fp;
using fp::Prime;
using linalg::FpVector;

constexpr std::uint64_t default_order_bound = 1'000'000;

/**
 * Normal-form element of a nil-2 p-group of exponent p with parameters
 * (m, d): exponents e of the generators x_1..x_m followed by exponents f of
 * the central generators z_1..z_d. The pair is the unique normal form.
 */
struct Element {
    FpVector e;
    FpVector f;

    bool operator==(const Element& o) const { return e == o.e && f == o.f; }
    bool operator!=(const Element& o) const { return !(*this == o); }
};

using SubgroupGens = std::vector<Element>;

/**
 * A nil-2 p-group of exponent p presented by structure constants:
 * [x_j, x_i] = z^{c(i,j)} for 1 <= i < j <= m, with the c(i,j) spanning
 * Z_p^d so that the derived subgroup is exactly Z_p^d.
 *
 * Group size is p^(m+d); all arithmetic is on exponent vectors.
 */
class GroupSpec {
  public:
    GroupSpec(Prime p, std::size_t m, std::size_t d, std::vector<FpVector> c)
        : p_(p), m_(m), d_(d), c_(std::move(c))
    {
        if (p_.is_two()) {
            throw std::invalid_argument("GroupSpec: p must be odd");
        }
        if (m_ < 1) {
            throw std::invalid_argument("GroupSpec: need at least one generator");
        }
        const std::size_t pairs = m_ * (m_ - 1) / 2;
        if (d_ > pairs) {
            throw std::invalid_argument("GroupSpec: d exceeds the number of commutator pairs");
        }
        if (c_.size() != pairs) {
            throw std::invalid_argument("GroupSpec: wrong number of structure constants");
        }
        for (const auto& v : c_) {
            if (v.size() != d_) {
                throw std::invalid_argument("GroupSpec: structure constant of wrong length");
            }
            for (Fp x : v) {
                if (x >= p_.value()) {
                    throw std::invalid_argument("GroupSpec: structure constant not reduced");
                }
            }
        }
        if (d_ > 0) {
            linalg::Span span(d_);
            for (const auto& v : c_) {
                span.add(v, p_);
            }
            if (span.rank() != d_) {
                throw std::invalid_argument(
                    "GroupSpec: structure constants do not span the derived subgroup");
            }
        }
        inv2_ = (p_.value() + 1) / 2;
    }

    const Prime& prime() const { return p_; }
    std::size_t m() const { return m_; }
    std::size_t d() const { return d_; }

    /// Structure constant vector for the pair (i, j), 0-based, i < j.
    const FpVector& c(std::size_t i, std::size_t j) const { return c_[pair_index(i, j)]; }

    std::size_t pair_index(std::size_t i, std::size_t j) const
    {
        // lexicographic over 0 <= i < j < m
        return i * (2 * m_ - i - 1) / 2 + (j - i - 1);
    }

    /// p^(m+d), saturating at UINT64_MAX for out-of-range parameter choices.
    std::uint64_t order() const
    {
        std::uint64_t n = 1;
        for (std::size_t i = 0; i < m_ + d_; ++i) {
            if (n > ~0ULL / p_.value()) {
                return ~0ULL;
            }
            n *= p_.value();
        }
        return n;
    }

    Element identity() const { return Element{FpVector(m_, 0), FpVector(d_, 0)}; }

    Element x_gen(std::size_t i) const
    {
        Element g = identity();
        g.e[i] = 1;
        return g;
    }

    Element z_gen(std::size_t l) const
    {
        Element g = identity();
        g.f[l] = 1;
        return g;
    }

    Element make(FpVector e, FpVector f) const
    {
        if (e.size() != m_ || f.size() != d_) {
            throw std::invalid_argument("GroupSpec::make: wrong exponent vector length");
        }
        for (auto& x : e) {
            x = p_.reduce(x);
        }
        for (auto& x : f) {
            x = p_.reduce(x);
        }
        return Element{std::move(e), std::move(f)};
    }

    /// Bilinear collection correction: Q(e, e') = sum_{i<j} e_j * e'_i * c(i,j).
    FpVector collection_correction(const FpVector& e, const FpVector& ep) const
    {
        FpVector corr(d_, 0);
        for (std::size_t i = 0; i < m_; ++i) {
            if (ep[i] == 0) {
                continue;
            }
            for (std::size_t j = i + 1; j < m_; ++j) {
                if (e[j] == 0) {
                    continue;
                }
                const Fp coeff = p_.mul(e[j], ep[i]);
                const FpVector& cij = c(i, j);
                for (std::size_t l = 0; l < d_; ++l) {
                    corr[l] = p_.add(corr[l], p_.mul(coeff, cij[l]));
                }
            }
        }
        return corr;
    }

    Element mul(const Element& g, const Element& h) const
    {
        check_dims(g);
        check_dims(h);
        Element out = identity();
        for (std::size_t i = 0; i < m_; ++i) {
            out.e[i] = p_.add(g.e[i], h.e[i]);
        }
        FpVector corr = collection_correction(g.e, h.e);
        for (std::size_t l = 0; l < d_; ++l) {
            out.f[l] = p_.add(p_.add(g.f[l], h.f[l]), corr[l]);
        }
        return out;
    }

    /// g^k via the closed form (k*e, k*f + C(k,2)*Q(e,e)); property-tested
    /// against the repeated-multiplication definition.
    Element pow(const Element& g, std::uint64_t k) const
    {
        check_dims(g);
        const Fp kr = p_.reduce(k);
        const Fp binom = p_.mul(p_.mul(kr, p_.sub(kr, 1)), inv2_);
        Element out = identity();
        for (std::size_t i = 0; i < m_; ++i) {
            out.e[i] = p_.mul(kr, g.e[i]);
        }
        FpVector q = collection_correction(g.e, g.e);
        for (std::size_t l = 0; l < d_; ++l) {
            out.f[l] = p_.add(p_.mul(kr, g.f[l]), p_.mul(binom, q[l]));
        }
        return out;
    }

    Element inv(const Element& g) const { return pow(g, p_.value() - 1); }

    /// [g, h] = g^-1 h^-1 g h, always central (zero e-part).
    Element commutator(const Element& g, const Element& h) const
    {
        return mul(mul(inv(g), inv(h)), mul(g, h));
    }

    /// The automorphism phi_j: on normal forms (e, f) -> (j*e, j^2*f).
    /// phi_0 is the constant identity-element map.
    Element phi(Fp j, const Element& g) const
    {
        check_dims(g);
        j = p_.reduce(j);
        const Fp j2 = p_.mul(j, j);
        Element out = identity();
        for (std::size_t i = 0; i < m_; ++i) {
            out.e[i] = p_.mul(j, g.e[i]);
        }
        for (std::size_t l = 0; l < d_; ++l) {
            out.f[l] = p_.mul(j2, g.f[l]);
        }
        return out;
    }

    /// The unique central z_g with phi_j(g) = g^j * z_g^(j - j^2) for all j.
    Element z_of(const Element& g) const
    {
        check_dims(g);
        FpVector q = collection_correction(g.e, g.e);
        Element out = identity();
        for (std::size_t l = 0; l < d_; ++l) {
            out.f[l] = p_.sub(p_.mul(q[l], inv2_), g.f[l]);
        }
        return out;
    }

    /// Projection to the transversal representative x^e of gG'.
    FpVector bar(const Element& g) const
    {
        check_dims(g);
        return g.e;
    }

    /// Group law on bar representatives: lift with trivial f-part, multiply,
    /// project. Coincides with coordinatewise addition of e-parts.
    FpVector bar_mul(const FpVector& e1, const FpVector& e2) const
    {
        Element a{e1, FpVector(d_, 0)};
        Element b{e2, FpVector(d_, 0)};
        return mul(a, b).e;
    }

    /// Dense packing of normal forms into [0, p^(m+d)); the packing is
    /// big-endian so numeric order equals lexicographic order on (e, f).
    std::uint64_t pack(const Element& g) const
    {
        std::uint64_t code = 0;
        for (std::size_t i = 0; i < m_; ++i) {
            code = code * p_.value() + g.e[i];
        }
        for (std::size_t l = 0; l < d_; ++l) {
            code = code * p_.value() + g.f[l];
        }
        return code;
    }

    Element unpack(std::uint64_t code) const
    {
        Element g = identity();
        for (std::size_t l = d_; l-- > 0;) {
            g.f[l] = code % p_.value();
            code /= p_.value();
        }
        for (std::size_t i = m_; i-- > 0;) {
            g.e[i] = code % p_.value();
            code /= p_.value();
        }
        return g;
    }

    Element random_element(SplitRng& rng) const
    {
        Element g = identity();
        for (auto& x : g.e) {
            x = rng.below(p_.value());
        }
        for (auto& x : g.f) {
            x = rng.below(p_.value());
        }
        return g;
    }

  private:
    void check_dims(const Element& g) const
    {
        if (g.e.size() != m_ || g.f.size() != d_) {
            throw std::invalid_argument("Element does not match group dimensions");
        }
    }

    Prime p_;
    std::size_t m_;
    std::size_t d_;
    std::vector<FpVector> c_;
    Fp inv2_;
};

/// Sorted packed codes of a finite element set; the canonical set form.
using ElemSet = std::vector<std::uint64_t>;

inline bool set_contains(const ElemSet& s, std::uint64_t code)
{
    return std::binary_search(s.begin(), s.end(), code);
}

/// Subgroup generated by gens: breadth-first closure under multiplication.
inline ElemSet closure(const GroupSpec& g, const SubgroupGens& gens,
                       std::uint64_t bound = default_order_bound)
{
    std::unordered_set<std::uint64_t> seen;
    std::deque<Element> queue;
    seen.insert(g.pack(g.identity()));
    queue.push_back(g.identity());
    while (!queue.empty()) {
        Element cur = queue.front();
        queue.pop_front();
        for (const Element& gen : gens) {
            Element next = g.mul(cur, gen);
            if (seen.insert(g.pack(next)).second) {
                if (seen.size() > bound) {
                    throw resource_error("closure: subgroup exceeds configured bound");
                }
                queue.push_back(next);
            }
        }
    }
    ElemSet out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end());
    return out;
}

/// Oracle label type: packed code of the canonical coset representative.
using HidingFunction = std::function<std::uint64_t(const Element&)>;

/**
 * The canonical hiding function of a subgroup: g maps to the
 * lexicographically least element of the left coset g*H. Labels agree
 * exactly on cosets and differ across them.
 */
inline HidingFunction hiding_function(const GroupSpec& g, const SubgroupGens& gens,
                                      std::uint64_t bound = default_order_bound)
{
    ElemSet codes = closure(g, gens, bound);
    std::vector<Element> h;
    h.reserve(codes.size());
    for (std::uint64_t hc : codes) {
        h.push_back(g.unpack(hc));
    }
    return [g, h = std::move(h)](const Element& x) {
        std::uint64_t best = ~0ULL;
        for (const Element& he : h) {
            best = std::min(best, g.pack(g.mul(x, he)));
        }
        return best;
    };
}

/// Verification oracle: recover H directly as the fiber of the identity.
inline ElemSet brute_force_hsp(const GroupSpec& g, const HidingFunction& f,
                               std::uint64_t bound = default_order_bound)
{
    const std::uint64_t n = g.order();
    if (n > bound) {
        throw resource_error("brute_force_hsp: group exceeds configured bound");
    }
    const std::uint64_t id_label = f(g.identity());
    ElemSet out;
    for (std::uint64_t code = 0; code < n; ++code) {
        if (f(g.unpack(code)) == id_label) {
            out.push_back(code);
        }
    }
    return out;
}

/// Uniform structure constants, resampled until they span Z_p^d.
inline GroupSpec random_group(Prime p, std::size_t m, std::size_t d, SplitRng& rng)
{
    if (m < 1 || d > m * (m - 1) / 2) {
        throw std::invalid_argument("random_group: d must satisfy d <= m(m-1)/2");
    }
    const std::size_t pairs = m * (m - 1) / 2;
    for (;;) {
        std::vector<FpVector> c(pairs, FpVector(d, 0));
        for (auto& v : c) {
            for (auto& x : v) {
                x = rng.below(p.value());
            }
        }
        if (d > 0) {
            linalg::Span span(d);
            for (const auto& v : c) {
                span.add(v, p);
            }
            if (span.rank() != d) {
                continue;
            }
        }
        return GroupSpec(p, m, d, std::move(c));
    }
}

/// A hidden subgroup honoring the promise: trivial, or cyclic of order p.
inline SubgroupGens random_hidden_subgroup(const GroupSpec& g, std::uint64_t order, SplitRng& rng)
{
    if (order == 1) {
        return {};
    }
    if (order != g.prime().value()) {
        throw std::invalid_argument("random_hidden_subgroup: order must be 1 or p");
    }
    for (;;) {
        Element h = g.random_element(rng);
        if (h != g.identity()) {
            return {h};
        }
    }
}

// GroupSpec file format: header "p m d", then one line "i j c_1 ... c_d" per
// generator pair in lexicographic order, 1-based indices.

inline void write_groupspec(std::ostream& out, const GroupSpec& g)
{
    out << g.prime().value() << ' ' << g.m() << ' ' << g.d() << '\n';
    for (std::size_t i = 0; i < g.m(); ++i) {
        for (std::size_t j = i + 1; j < g.m(); ++j) {
            out << (i + 1) << ' ' << (j + 1);
            for (Fp x : g.c(i, j)) {
                out << ' ' << x;
            }
            out << '\n';
        }
    }
}

inline GroupSpec read_groupspec(std::istream& in)
{
    std::uint64_t pv = 0;
    std::size_t m = 0;
    std::size_t d = 0;
    if (!(in >> pv >> m >> d)) {
        throw parse_error("group file: expected header 'p m d'");
    }
    if (m < 1 || m > 64 || d > 2016) {
        throw parse_error("group file: parameters out of range");
    }
    Prime p = [&] {
        try {
            return Prime(pv);
        } catch (const std::invalid_argument& e) {
            throw parse_error(std::string("group file: ") + e.what());
        }
    }();
    std::vector<FpVector> c;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            std::size_t fi = 0;
            std::size_t fj = 0;
            if (!(in >> fi >> fj) || fi != i + 1 || fj != j + 1) {
                throw parse_error("group file: pair indices out of order");
            }
            FpVector v(d, 0);
            for (auto& x : v) {
                std::uint64_t raw = 0;
                if (!(in >> raw)) {
                    throw parse_error("group file: truncated structure constants");
                }
                x = p.reduce(raw);
            }
            c.push_back(std::move(v));
        }
    }
    std::string extra;
    if (in >> extra) {
        throw parse_error("group file: trailing data");
    }
    try {
        return GroupSpec(p, m, d, std::move(c));
    } catch (const std::invalid_argument& e) {
        throw parse_error(std::string("group file: ") + e.what());
    }
}

} // namespace hsp::nil2
