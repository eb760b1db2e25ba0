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
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "hsp/errors.hpp"
#include "hsp/nil2.hpp"
#include "hsp/qsim.hpp"

namespace hsp::reduction {

using nil2::Element;
using nil2::GroupSpec;

constexpr std::size_t default_explicit_bound = 10'000;

/**
 * A small finite group given by an opaque multiplication law on element
 * indices 0..n-1. Every operation in this module enumerates; inputs are
 * capped at default_explicit_bound elements.
 */
class ExplicitGroup {
  public:
    using MulFn = std::function<std::uint32_t(std::uint32_t, std::uint32_t)>;

    static ExplicitGroup from_table(std::vector<std::uint32_t> flat, std::size_t n)
    {
        if (n == 0 || flat.size() != n * n) {
            throw std::invalid_argument("ExplicitGroup: table shape mismatch");
        }
        for (std::uint32_t v : flat) {
            if (v >= n) {
                throw std::domain_error("ExplicitGroup: table entry out of range");
            }
        }
        // Latin square check: rows and columns are permutations.
        std::vector<bool> seen(n);
        for (std::size_t r = 0; r < n; ++r) {
            std::fill(seen.begin(), seen.end(), false);
            for (std::size_t c = 0; c < n; ++c) {
                seen[flat[r * n + c]] = true;
            }
            if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
                throw std::domain_error("ExplicitGroup: row is not a permutation");
            }
            std::fill(seen.begin(), seen.end(), false);
            for (std::size_t c = 0; c < n; ++c) {
                seen[flat[c * n + r]] = true;
            }
            if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
                throw std::domain_error("ExplicitGroup: column is not a permutation");
            }
        }
        auto shared = std::make_shared<std::vector<std::uint32_t>>(std::move(flat));
        ExplicitGroup g(n, [shared, n](std::uint32_t a, std::uint32_t b) {
            return (*shared)[a * n + b];
        });
        // Full associativity check is cubic; do it exhaustively only when cheap.
        if (n <= 128) {
            for (std::uint32_t a = 0; a < n; ++a) {
                for (std::uint32_t b = 0; b < n; ++b) {
                    for (std::uint32_t c = 0; c < n; ++c) {
                        if (g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c))) {
                            throw std::domain_error("ExplicitGroup: multiplication not associative");
                        }
                    }
                }
            }
        }
        return g;
    }

    static ExplicitGroup from_callback(std::size_t n, MulFn fn)
    {
        return ExplicitGroup(n, std::move(fn));
    }

    std::uint32_t n() const { return static_cast<std::uint32_t>(n_); }
    std::uint32_t id() const { return id_; }
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const { return mul_(a, b); }
    std::uint32_t inv(std::uint32_t a) const { return inv_[a]; }

    std::uint32_t pow(std::uint32_t a, std::uint64_t e) const
    {
        std::uint32_t acc = id_;
        std::uint32_t base = a;
        while (e != 0) {
            if (e & 1) {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            e >>= 1;
        }
        return acc;
    }

    std::uint64_t order_of(std::uint32_t a) const
    {
        std::uint64_t k = 1;
        std::uint32_t cur = a;
        while (cur != id_) {
            cur = mul(cur, a);
            ++k;
        }
        return k;
    }

  private:
    ExplicitGroup(std::size_t n, MulFn fn) : n_(n), mul_(std::move(fn))
    {
        // locate the two-sided identity
        bool found = false;
        for (std::uint32_t e = 0; e < n_ && !found; ++e) {
            bool ok = true;
            for (std::uint32_t x = 0; x < n_; ++x) {
                if (mul_(e, x) != x || mul_(x, e) != x) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                id_ = e;
                found = true;
            }
        }
        if (!found) {
            throw std::domain_error("ExplicitGroup: no identity element");
        }
        inv_.assign(n_, id_);
        for (std::uint32_t a = 0; a < n_; ++a) {
            bool ok = false;
            for (std::uint32_t b = 0; b < n_; ++b) {
                if (mul_(a, b) == id_ && mul_(b, a) == id_) {
                    inv_[a] = b;
                    ok = true;
                    break;
                }
            }
            if (!ok) {
                throw std::domain_error("ExplicitGroup: element without inverse");
            }
        }
    }

    std::size_t n_;
    std::uint32_t id_ = 0;
    MulFn mul_;
    std::vector<std::uint32_t> inv_;
};

using ElemIdx = std::uint32_t;
using IdxSet = std::vector<ElemIdx>; // sorted

inline bool idx_contains(const IdxSet& s, ElemIdx x)
{
    return std::binary_search(s.begin(), s.end(), x);
}

inline IdxSet closure_of(const ExplicitGroup& g, IdxSet gens)
{
    std::vector<bool> seen(g.n(), false);
    std::deque<ElemIdx> queue;
    seen[g.id()] = true;
    queue.push_back(g.id());
    IdxSet out{g.id()};
    while (!queue.empty()) {
        ElemIdx cur = queue.front();
        queue.pop_front();
        for (ElemIdx gen : gens) {
            ElemIdx next = g.mul(cur, gen);
            if (!seen[next]) {
                seen[next] = true;
                out.push_back(next);
                queue.push_back(next);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Coset labels of the subgroup H: each element maps to the least element
/// of its left coset g*H. This is the canonical hiding function.
inline std::vector<std::uint64_t> labels_from_subgroup(const ExplicitGroup& g, const IdxSet& h)
{
    std::vector<std::uint64_t> labels(g.n());
    for (ElemIdx x = 0; x < g.n(); ++x) {
        ElemIdx best = x;
        for (ElemIdx he : h) {
            best = std::min(best, g.mul(x, he));
        }
        labels[x] = best;
    }
    return labels;
}

/// Reindex a subgroup as a standalone group; second result maps the new
/// indices back into the parent.
inline std::pair<ExplicitGroup, IdxSet> subgroup_as_group(const ExplicitGroup& g, const IdxSet& s)
{
    const std::size_t k = s.size();
    if (k * k > 64'000'000) {
        throw resource_error("subgroup_as_group: subgroup too large to materialize");
    }
    std::unordered_map<ElemIdx, std::uint32_t> pos;
    pos.reserve(k);
    for (std::uint32_t i = 0; i < k; ++i) {
        pos[s[i]] = i;
    }
    std::vector<std::uint32_t> table(k * k);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
            table[a * k + b] = pos.at(g.mul(s[a], s[b]));
        }
    }
    auto shared = std::make_shared<std::vector<std::uint32_t>>(std::move(table));
    return {ExplicitGroup::from_callback(
                k, [shared, k](std::uint32_t a, std::uint32_t b) { return (*shared)[a * k + b]; }),
            s};
}

/**
 * Sylow decomposition of a nilpotent group: the q-part is the set of
 * elements of q-power order. Each part is verified to be closed; a failure
 * means the input was not nilpotent.
 */
inline std::map<std::uint64_t, IdxSet> sylow_decompose(const ExplicitGroup& g)
{
    std::vector<std::pair<std::uint64_t, std::uint64_t>> factors; // (prime, power)
    std::uint64_t n = g.n();
    for (std::uint64_t q = 2; q * q <= n; ++q) {
        if (n % q == 0) {
            std::uint64_t e = 0;
            while (n % q == 0) {
                n /= q;
                ++e;
            }
            factors.emplace_back(q, e);
        }
    }
    if (n > 1) {
        factors.emplace_back(n, 1);
    }

    std::map<std::uint64_t, IdxSet> parts;
    for (const auto& [q, e] : factors) {
        parts[q] = {};
    }
    for (ElemIdx x = 0; x < g.n(); ++x) {
        std::uint64_t ord = g.order_of(x);
        for (auto& [q, part] : parts) {
            std::uint64_t rem = ord;
            while (rem % q == 0) {
                rem /= q;
            }
            if (rem == 1) {
                part.push_back(x);
            }
        }
    }
    std::uint64_t product = 1;
    for (auto& [q, part] : parts) {
        std::sort(part.begin(), part.end());
        for (ElemIdx a : part) {
            for (ElemIdx b : part) {
                if (!idx_contains(part, g.mul(a, b))) {
                    throw std::domain_error("sylow_decompose: component not closed (group not nilpotent)");
                }
            }
        }
        product *= part.size();
    }
    if (product != g.n()) {
        throw std::domain_error("sylow_decompose: component orders do not multiply up (group not nilpotent)");
    }
    return parts;
}

/// N_G(X) = {g : g X g^-1 = X}, brute force over all of G.
inline IdxSet normalizer(const ExplicitGroup& g, const IdxSet& x)
{
    IdxSet out;
    for (ElemIdx a = 0; a < g.n(); ++a) {
        bool ok = true;
        const ElemIdx ai = g.inv(a);
        for (ElemIdx xe : x) {
            if (!idx_contains(x, g.mul(g.mul(a, xe), ai))) {
                ok = false;
                break;
            }
        }
        if (ok) {
            out.push_back(a);
        }
    }
    return out;
}

struct QuotientResult {
    ExplicitGroup group;
    std::vector<std::uint32_t> to_class; // parent index -> quotient index
    IdxSet rep;                          // quotient index -> canonical parent rep
};

/// G / N for a normal subgroup N, with least-index coset representatives.
inline QuotientResult quotient(const ExplicitGroup& g, const IdxSet& nsub)
{
    for (ElemIdx a = 0; a < g.n(); ++a) {
        const ElemIdx ai = g.inv(a);
        for (ElemIdx x : nsub) {
            if (!idx_contains(nsub, g.mul(g.mul(a, x), ai))) {
                throw std::domain_error("quotient: subgroup is not normal");
            }
        }
    }
    std::vector<std::uint32_t> coset_rep(g.n(), ~0u);
    IdxSet reps;
    for (ElemIdx a = 0; a < g.n(); ++a) {
        if (coset_rep[a] != ~0u) {
            continue;
        }
        ElemIdx least = a; // elements are scanned in increasing order
        std::vector<ElemIdx> members;
        for (ElemIdx x : nsub) {
            members.push_back(g.mul(a, x));
        }
        for (ElemIdx mem : members) {
            coset_rep[mem] = least;
        }
        reps.push_back(least);
    }
    std::unordered_map<ElemIdx, std::uint32_t> rep_pos;
    for (std::uint32_t i = 0; i < reps.size(); ++i) {
        rep_pos[reps[i]] = i;
    }
    std::vector<std::uint32_t> to_class(g.n());
    for (ElemIdx a = 0; a < g.n(); ++a) {
        to_class[a] = rep_pos.at(coset_rep[a]);
    }
    const std::size_t k = reps.size();
    std::vector<std::uint32_t> table(k * k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            table[i * k + j] = to_class[g.mul(reps[i], reps[j])];
        }
    }
    auto shared = std::make_shared<std::vector<std::uint32_t>>(std::move(table));
    ExplicitGroup q = ExplicitGroup::from_callback(
        k, [shared, k](std::uint32_t a, std::uint32_t b) { return (*shared)[a * k + b]; });
    return {std::move(q), std::move(to_class), std::move(reps)};
}

namespace detail {

// A maximal proper subgroup, by greedy closure over ascending indices.
// In a p-group every maximal subgroup has index p and is normal.
inline IdxSet maximal_subgroup(const ExplicitGroup& g)
{
    IdxSet t{g.id()};
    bool grew = true;
    while (grew) {
        grew = false;
        for (ElemIdx x = 0; x < g.n(); ++x) {
            if (idx_contains(t, x)) {
                continue;
            }
            IdxSet gens = t;
            gens.push_back(x);
            IdxSet bigger = closure_of(g, gens);
            if (bigger.size() < g.n()) {
                t = std::move(bigger);
                grew = true;
            }
        }
    }
    return t;
}

} // namespace detail

/**
 * Subnormal chain with index-p steps: G = G_1 > G_2 > ... > {1}, each term
 * maximal in the previous one. Input must be a p-group.
 */
inline std::vector<IdxSet> prime_step_chain(const ExplicitGroup& g)
{
    const std::uint64_t n = g.n();
    if (n == 1) {
        return {IdxSet{g.id()}};
    }
    std::uint64_t p = 0;
    for (std::uint64_t q = 2; q <= n; ++q) {
        if (n % q == 0) {
            p = q;
            break;
        }
    }
    std::uint64_t check = n;
    while (check % p == 0) {
        check /= p;
    }
    if (check != 1) {
        throw std::domain_error("prime_step_chain: order is not a prime power");
    }

    std::vector<IdxSet> chain;
    IdxSet all(g.n());
    for (ElemIdx i = 0; i < g.n(); ++i) {
        all[i] = i;
    }
    chain.push_back(all);
    ExplicitGroup cur = g;
    IdxSet cur_to_g = all;
    while (cur.n() > 1) {
        IdxSet m = detail::maximal_subgroup(cur);
        if (m.size() * p != cur.n()) {
            throw std::logic_error("prime_step_chain: maximal subgroup of unexpected index");
        }
        IdxSet m_in_g;
        for (ElemIdx e : m) {
            m_in_g.push_back(cur_to_g[e]);
        }
        std::sort(m_in_g.begin(), m_in_g.end());
        chain.push_back(m_in_g);
        auto [sub, to_parent] = subgroup_as_group(cur, m);
        IdxSet next_to_g;
        for (ElemIdx e : to_parent) {
            next_to_g.push_back(cur_to_g[e]);
        }
        cur = std::move(sub);
        cur_to_g = std::move(next_to_g);
    }
    return chain;
}

/**
 * A sub-solver takes a group with per-element oracle labels, under the
 * promise that the labels hide a subgroup of order 1 or p, and returns a
 * generator of that subgroup (or nothing when it is trivial).
 */
using SubSolver =
    std::function<std::optional<std::uint32_t>(const ExplicitGroup&, const std::vector<std::uint64_t>&)>;

inline SubSolver brute_force_solver()
{
    return [](const ExplicitGroup& s, const std::vector<std::uint64_t>& labels)
               -> std::optional<std::uint32_t> {
        const std::uint64_t id_label = labels[s.id()];
        for (std::uint32_t x = 0; x < s.n(); ++x) {
            if (x != s.id() && labels[x] == id_label) {
                return x;
            }
        }
        return std::nullopt;
    };
}

struct Algorithm1Stats {
    std::size_t p_calls = 0;
    std::size_t restarts = 0;
};

/**
 * The normalizer-iteration reduction: grow a known part of the hidden
 * subgroup by repeatedly Fourier-solving promise instances on a subnormal
 * chain of N_G(Htil)/Htil, absorbing each recovered generator. The labels
 * array is the hiding oracle on all of G.
 */
inline IdxSet algorithm1(const ExplicitGroup& g, const std::vector<std::uint64_t>& labels,
                         const SubSolver& solver, Algorithm1Stats* stats = nullptr)
{
    Algorithm1Stats local;
    Algorithm1Stats& st = stats != nullptr ? *stats : local;

    IdxSet htil{g.id()};
    bool success = true;
    while (success) {
        if (htil.size() == g.n()) {
            break;
        }
        IdxSet norm = normalizer(g, htil);
        auto [ngroup, n_to_g] = subgroup_as_group(g, norm);
        IdxSet htil_in_n;
        for (std::uint32_t i = 0; i < n_to_g.size(); ++i) {
            if (idx_contains(htil, n_to_g[i])) {
                htil_in_n.push_back(i);
            }
        }
        QuotientResult q = quotient(ngroup, htil_in_n);
        if (q.group.n() == 1) {
            break;
        }
        std::vector<std::uint64_t> qlabels(q.group.n());
        for (std::uint32_t i = 0; i < q.group.n(); ++i) {
            qlabels[i] = labels[n_to_g[q.rep[i]]];
        }
        std::vector<IdxSet> chain = prime_step_chain(q.group);

        bool found = false;
        // bottom-up: the smallest nontrivial chain subgroup first, so the
        // first nontrivial answer has order exactly p.
        for (std::size_t idx = chain.size() - 1; idx-- > 0;) {
            const IdxSet& s = chain[idx];
            auto [sgroup, s_to_q] = subgroup_as_group(q.group, s);
            std::vector<std::uint64_t> slabels(sgroup.n());
            for (std::uint32_t i = 0; i < sgroup.n(); ++i) {
                slabels[i] = qlabels[s_to_q[i]];
            }
            ++st.p_calls;
            std::optional<std::uint32_t> h = solver(sgroup, slabels);
            if (h.has_value()) {
                const ElemIdx h_in_g = n_to_g[q.rep[s_to_q[*h]]];
                IdxSet gens = htil;
                gens.push_back(h_in_g);
                htil = closure_of(g, gens);
                ++st.restarts;
                found = true;
                break;
            }
        }
        if (!found) {
            success = false;
        }
    }
    return htil;
}

/// G* = elements of order dividing p; a subgroup whenever p exceeds the
/// nilpotency class. Verified closed, else rejected.
inline IdxSet exponent_p_subgroup(const ExplicitGroup& g, std::uint64_t p)
{
    IdxSet s;
    for (ElemIdx x = 0; x < g.n(); ++x) {
        if (g.pow(x, p) == g.id()) {
            s.push_back(x);
        }
    }
    for (ElemIdx a : s) {
        for (ElemIdx b : s) {
            if (!idx_contains(s, g.mul(a, b))) {
                throw std::domain_error(
                    "exponent_p_subgroup: order-p elements are not closed (p <= nilpotency class)");
            }
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Builders and adapters.

inline ExplicitGroup cyclic_group(std::size_t n)
{
    return ExplicitGroup::from_callback(n, [n](std::uint32_t a, std::uint32_t b) {
        return static_cast<std::uint32_t>((a + b) % n);
    });
}

inline ExplicitGroup direct_product(const ExplicitGroup& a, const ExplicitGroup& b)
{
    const std::uint32_t bn = b.n();
    const ExplicitGroup ac = a;
    const ExplicitGroup bc = b;
    return ExplicitGroup::from_callback(
        static_cast<std::size_t>(a.n()) * b.n(), [ac, bc, bn](std::uint32_t x, std::uint32_t y) {
            return ac.mul(x / bn, y / bn) * bn + bc.mul(x % bn, y % bn);
        });
}

/// Explicit form of a structure-constant group; element i is gs.unpack(i).
inline ExplicitGroup groupspec_to_explicit(const GroupSpec& gs,
                                           std::uint64_t bound = default_explicit_bound)
{
    const std::uint64_t n = gs.order();
    if (n > bound) {
        throw resource_error("groupspec_to_explicit: group exceeds configured bound");
    }
    GroupSpec copy = gs;
    return ExplicitGroup::from_callback(n, [copy](std::uint32_t a, std::uint32_t b) {
        return static_cast<std::uint32_t>(copy.pack(copy.mul(copy.unpack(a), copy.unpack(b))));
    });
}

struct Nil2Recognition {
    GroupSpec spec;
    std::vector<std::uint32_t> to_explicit; // spec packed code -> explicit index
    std::vector<std::uint64_t> to_code;     // explicit index -> spec packed code
};

/**
 * Recognize an explicit group as a nil-2 p-group of exponent p and rebuild
 * its structure-constant presentation; the maps translate between the two
 * element encodings. Returns nothing when the group is out of this class.
 */
inline std::optional<Nil2Recognition> explicit_to_groupspec(const ExplicitGroup& g)
{
    const std::uint64_t n = g.n();
    if (n < 2) {
        return std::nullopt;
    }
    std::uint64_t p = 0;
    for (std::uint64_t q = 2; q <= n; ++q) {
        if (n % q == 0) {
            p = q;
            break;
        }
    }
    std::uint64_t rem = n;
    std::size_t k = 0;
    while (rem % p == 0) {
        rem /= p;
        ++k;
    }
    if (rem != 1 || p == 2) {
        return std::nullopt;
    }
    for (ElemIdx x = 0; x < n; ++x) {
        if (g.pow(x, p) != g.id()) {
            return std::nullopt; // not exponent p
        }
    }

    // Derived subgroup by closing the commutator set.
    IdxSet comm_gens;
    {
        std::vector<bool> seen(n, false);
        for (ElemIdx a = 0; a < n; ++a) {
            for (ElemIdx b = 0; b < n; ++b) {
                ElemIdx c = g.mul(g.mul(g.inv(a), g.inv(b)), g.mul(a, b));
                if (!seen[c]) {
                    seen[c] = true;
                    comm_gens.push_back(c);
                }
            }
        }
        std::sort(comm_gens.begin(), comm_gens.end());
    }
    IdxSet derived = closure_of(g, comm_gens);
    for (ElemIdx z : derived) {
        for (ElemIdx x = 0; x < n; ++x) {
            if (g.mul(z, x) != g.mul(x, z)) {
                return std::nullopt; // derived subgroup not central: class > 2
            }
        }
    }

    std::size_t d = 0;
    {
        std::uint64_t ds = derived.size();
        while (ds > 1) {
            ds /= p;
            ++d;
        }
    }
    const std::size_t m = k - d;
    if (m < 1) {
        return std::nullopt;
    }

    // Basis of the derived subgroup and discrete logs over it.
    std::vector<ElemIdx> z_basis;
    {
        IdxSet span{g.id()};
        for (ElemIdx z : derived) {
            if (!idx_contains(span, z)) {
                z_basis.push_back(z);
                IdxSet gens(z_basis.begin(), z_basis.end());
                span = closure_of(g, gens);
                if (span.size() == derived.size()) {
                    break;
                }
            }
        }
    }
    std::unordered_map<ElemIdx, linalg::FpVector> dlog;
    {
        for (std::uint64_t code = 0; code < qsim::pow_u64(p, d); ++code) {
            linalg::FpVector fv = qsim::vec_from_index(code, p, d);
            ElemIdx e = g.id();
            for (std::size_t l = 0; l < d; ++l) {
                e = g.mul(e, g.pow(z_basis[l], fv[l]));
            }
            dlog[e] = std::move(fv);
        }
        if (dlog.size() != derived.size()) {
            return std::nullopt;
        }
    }

    // Transversal generators: extend the derived subgroup to the whole group.
    std::vector<ElemIdx> x_basis;
    {
        IdxSet span = derived;
        for (ElemIdx x = 0; x < n && span.size() < n; ++x) {
            if (!idx_contains(span, x)) {
                x_basis.push_back(x);
                IdxSet gens = comm_gens;
                gens.insert(gens.end(), x_basis.begin(), x_basis.end());
                gens.insert(gens.end(), z_basis.begin(), z_basis.end());
                span = closure_of(g, gens);
            }
        }
        if (x_basis.size() != m) {
            return std::nullopt;
        }
    }

    std::vector<linalg::FpVector> c;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            ElemIdx com = g.mul(g.mul(g.inv(x_basis[j]), g.inv(x_basis[i])),
                                g.mul(x_basis[j], x_basis[i]));
            auto it = dlog.find(com);
            if (it == dlog.end()) {
                return std::nullopt;
            }
            c.push_back(it->second);
        }
    }

    GroupSpec spec = [&]() -> GroupSpec {
        try {
            return GroupSpec(fp::Prime(p), m, d, std::move(c));
        } catch (const std::invalid_argument&) {
            throw std::logic_error("explicit_to_groupspec: reconstructed constants invalid");
        }
    }();

    // Evaluate every normal word to build the element bijection.
    Nil2Recognition rec{std::move(spec), std::vector<std::uint32_t>(n, 0),
                        std::vector<std::uint64_t>(n, 0)};
    std::vector<bool> hit(n, false);
    for (std::uint64_t code = 0; code < n; ++code) {
        Element el = rec.spec.unpack(code);
        ElemIdx v = g.id();
        for (std::size_t i = 0; i < m; ++i) {
            v = g.mul(v, g.pow(x_basis[i], el.e[i]));
        }
        for (std::size_t l = 0; l < d; ++l) {
            v = g.mul(v, g.pow(z_basis[l], el.f[l]));
        }
        if (hit[v]) {
            return std::nullopt; // normal words not unique: recognition failed
        }
        hit[v] = true;
        rec.to_explicit[code] = v;
        rec.to_code[v] = code;
    }
    return rec;
}

/**
 * Sub-solver backed by the quantum pipeline: recognize the instance group
 * as a nil-2 exponent-p group and run the full Fourier-sampling solver on
 * it. Falls back to brute force when recognition fails (e.g. p = 2 parts).
 */
inline SubSolver qsim_solver(SplitRng rng)
{
    auto shared_rng = std::make_shared<SplitRng>(rng);
    return [shared_rng](const ExplicitGroup& s, const std::vector<std::uint64_t>& labels)
               -> std::optional<std::uint32_t> {
        if (s.n() == 1) {
            return std::nullopt;
        }
        auto rec = explicit_to_groupspec(s);
        if (!rec) {
            return brute_force_solver()(s, labels);
        }
        nil2::HidingFunction f = [&rec, &labels](const Element& e) {
            return labels[rec->to_explicit[rec->spec.pack(e)]];
        };
        qsim::HspResult res = qsim::find_hidden_subgroup(rec->spec, f, *shared_rng);
        if (res.subgroup.size() == 1) {
            return std::nullopt;
        }
        for (std::uint64_t code : res.subgroup) {
            if (code != rec->spec.pack(rec->spec.identity())) {
                return rec->to_explicit[code];
            }
        }
        return std::nullopt;
    };
}

// ---------------------------------------------------------------------------
// Multiplication-table file format: "n", then n rows of n indices, then an
// optional hidden-subgroup line "k g_1 ... g_k".

struct TableFile {
    ExplicitGroup group;
    IdxSet hidden_gens;
};

inline TableFile parse_table(std::istream& in, std::size_t bound = default_explicit_bound)
{
    std::size_t n = 0;
    if (!(in >> n)) {
        throw parse_error("table file: expected element count");
    }
    if (n == 0 || n > bound) {
        throw parse_error("table file: element count out of range");
    }
    std::vector<std::uint32_t> flat(n * n);
    for (auto& v : flat) {
        std::uint64_t raw = 0;
        if (!(in >> raw)) {
            throw parse_error("table file: truncated multiplication table");
        }
        if (raw >= n) {
            throw parse_error("table file: index out of range");
        }
        v = static_cast<std::uint32_t>(raw);
    }
    IdxSet hidden;
    std::size_t k = 0;
    if (in >> k) {
        if (k > n) {
            throw parse_error("table file: too many subgroup generators");
        }
        for (std::size_t i = 0; i < k; ++i) {
            std::uint64_t raw = 0;
            if (!(in >> raw) || raw >= n) {
                throw parse_error("table file: bad subgroup generator");
            }
            hidden.push_back(static_cast<std::uint32_t>(raw));
        }
        std::string extra;
        if (in >> extra) {
            throw parse_error("table file: trailing data");
        }
    }
    std::sort(hidden.begin(), hidden.end());
    ExplicitGroup g = [&] {
        try {
            return ExplicitGroup::from_table(std::move(flat), n);
        } catch (const std::domain_error& e) {
            throw parse_error(std::string("table file: ") + e.what());
        }
    }();
    return TableFile{std::move(g), std::move(hidden)};
}

inline void write_table(std::ostream& out, const ExplicitGroup& g, const IdxSet& hidden_gens)
{
    out << g.n() << '\n';
    for (std::uint32_t a = 0; a < g.n(); ++a) {
        for (std::uint32_t b = 0; b < g.n(); ++b) {
            out << g.mul(a, b) << (b + 1 == g.n() ? '\n' : ' ');
        }
    }
    out << hidden_gens.size();
    for (ElemIdx x : hidden_gens) {
        out << ' ' << x;
    }
    out << '\n';
}

} // namespace hsp::reduction
