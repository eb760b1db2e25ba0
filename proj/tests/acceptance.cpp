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

// Acceptance suite. Each numbered criterion runs exhaustively at its stated
// size and tolerance (exact arithmetic everywhere: tolerance is zero unless
// a criterion is explicitly a timing statement) and prints one line.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hsp/cli.hpp"
#include "hsp/nil2.hpp"
#include "hsp/qsim.hpp"
#include "hsp/quadsys.hpp"
#include "hsp/reduction.hpp"

using namespace hsp;
using fp::Fp;
using fp::Prime;
using linalg::FpMatrix;
using linalg::FpVector;
using nil2::Element;
using nil2::GroupSpec;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FpMatrix random_matrix(std::size_t r, std::size_t c, const Prime& p, SplitRng& rng)
{
    FpMatrix m(r, c);
    for (auto& x : m.a) {
        x = rng.below(p.value());
    }
    return m;
}

// The modular group of order 27: class 2, exponent 9, G* of order 9.
reduction::ExplicitGroup modular27()
{
    auto idx = [](std::uint32_t i, std::uint32_t j) { return i * 3 + j; };
    auto powmod = [](std::uint32_t base, std::uint32_t e, std::uint32_t m) {
        std::uint32_t r = 1;
        for (std::uint32_t t = 0; t < e; ++t) {
            r = r * base % m;
        }
        return r;
    };
    std::vector<std::uint32_t> table(27 * 27);
    for (std::uint32_t i = 0; i < 9; ++i) {
        for (std::uint32_t j = 0; j < 3; ++j) {
            for (std::uint32_t k = 0; k < 9; ++k) {
                for (std::uint32_t l = 0; l < 3; ++l) {
                    table[idx(i, j) * 27 + idx(k, l)] =
                        idx((i + k * powmod(7, j, 9)) % 9, (j + l) % 3);
                }
            }
        }
    }
    return reduction::ExplicitGroup::from_table(std::move(table), 27);
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

// --------------------------------------------------------------------------
// 1. Full-system solver totality at n = (d+1)^2 (d+2) / 2.

Outcome criterion1()
{
    const auto t0 = std::chrono::steady_clock::now();
    SplitRng rng(0x5151);
    std::size_t solved = 0;
    std::size_t failures = 0;
    for (std::uint64_t pv : {3ULL, 5ULL, 7ULL, 13ULL, 101ULL, 1009ULL}) {
        Prime p(pv);
        for (std::size_t d = 1; d <= 5; ++d) {
            const std::size_t n = quadsys::full_system_bound(d);
            for (int i = 0; i < 1000; ++i) {
                quadsys::QuadLinSystem sys(p, d, n, random_matrix(d, n, p, rng));
                FpVector j = quadsys::solve_full_system(sys, rng);
                if (quadsys::check_full(sys, j)) {
                    ++solved;
                } else {
                    ++failures;
                }
            }
        }
    }
    const double secs = seconds_since(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu/30000 solved and substitution-verified, %zu failures, %.1fs",
                  solved, failures, secs);
    return {failures == 0 && solved == 30000 && secs < 300.0, buf};
}

// --------------------------------------------------------------------------
// 2. Quadratic-block totality at n' = (d+1)(d+2)/2, plus the p = 2 branch.

Outcome criterion2()
{
    const auto t0 = std::chrono::steady_clock::now();
    SplitRng rng(0x5252);
    std::size_t failures = 0;
    std::size_t solved = 0;
    for (std::uint64_t pv : {3ULL, 5ULL, 7ULL, 13ULL, 101ULL, 1009ULL}) {
        Prime p(pv);
        for (std::size_t d = 1; d <= 5; ++d) {
            const std::size_t n = quadsys::quadratic_block_bound(d);
            for (int i = 0; i < 1000; ++i) {
                FpMatrix u = random_matrix(d, n, p, rng);
                FpVector j = quadsys::solve_quadratic_block(u, p, rng);
                if (quadsys::check_quadratic(u, j, p)) {
                    ++solved;
                } else {
                    ++failures;
                }
            }
        }
    }
    Prime two(2);
    std::size_t solved2 = 0;
    for (std::size_t d = 1; d <= 5; ++d) {
        const std::size_t n = quadsys::full_system_bound(d);
        for (int i = 0; i < 1000; ++i) {
            quadsys::QuadLinSystem sys(two, d, n, random_matrix(d, n, two, rng));
            FpVector j = quadsys::solve_full_system(sys, rng);
            if (quadsys::check_full(sys, j)) {
                ++solved2;
            } else {
                ++failures;
            }
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%zu/30000 quadratic blocks + %zu/5000 p=2 linear-kernel systems, %zu failures, %.1fs",
                  solved, solved2, failures, seconds_since(t0));
    return {failures == 0 && solved == 30000 && solved2 == 5000, buf};
}

// --------------------------------------------------------------------------
// 3. Chevalley-Warning consistency: p = 3, n = 3d + 1, exhaustive counting.

Outcome criterion3()
{
    SplitRng rng(0x5353);
    Prime p3(3);
    std::size_t checked = 0;
    std::size_t bad = 0;
    for (std::size_t d : {1ULL, 2ULL}) {
        const std::size_t n = 3 * d + 1;
        for (int rep = 0; rep < 100; ++rep) {
            FpMatrix u = random_matrix(d, n, p3, rng);
            // enumerate all of Z_3^n and count full-system solutions
            std::size_t count = 0;
            FpVector j(n, 0);
            for (;;) {
                bool ok = true;
                for (std::size_t r = 0; r < d && ok; ++r) {
                    Fp quad = 0;
                    Fp lin = 0;
                    for (std::size_t c = 0; c < n; ++c) {
                        quad = (quad + u.at(r, c) * j[c] * j[c]) % 3;
                        lin = (lin + u.at(r, c) * j[c]) % 3;
                    }
                    ok = quad == 0 && lin == 0;
                }
                if (ok) {
                    ++count;
                }
                std::size_t pos = 0;
                while (pos < n && ++j[pos] == 3) {
                    j[pos] = 0;
                    ++pos;
                }
                if (pos == n) {
                    break;
                }
            }
            ++checked;
            if (count % 3 != 0 || count < 2) {
                ++bad; // no nontrivial zero or count not divisible by p
            }
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%zu exhaustive instances, solution counts all divisible by 3 with a nonzero "
                  "solution: %s",
                  checked, bad == 0 ? "yes" : "NO");
    return {bad == 0, buf};
}

// --------------------------------------------------------------------------
// 4. Group-law suite: 10^4 exact checks per law across the parameter grid.

Outcome criterion4()
{
    SplitRng rng(0x5454);
    std::vector<std::pair<std::size_t, std::size_t>> dims;
    for (std::size_t m : {2ULL, 3ULL, 4ULL}) {
        for (std::size_t d : {1ULL, 2ULL, 3ULL}) {
            if (d <= m * (m - 1) / 2) {
                dims.emplace_back(m, d);
            }
        }
    }
    std::size_t combos = 0;
    for (std::uint64_t pv : {3ULL, 5ULL}) {
        combos += dims.size();
        (void)pv;
    }
    const std::size_t per_combo = (10000 + combos - 1) / combos;

    std::size_t violations = 0;
    std::size_t checks = 0;
    for (std::uint64_t pv : {3ULL, 5ULL}) {
        Prime p(pv);
        for (const auto& [m, d] : dims) {
            GroupSpec g = nil2::random_group(p, m, d, rng);
            for (std::size_t it = 0; it < per_combo; ++it) {
                Element a = g.random_element(rng);
                Element b = g.random_element(rng);
                Element c = g.random_element(rng);
                Element e = g.random_element(rng);
                if (g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c))) {
                    ++violations;
                }
                if (g.pow(a, pv) != g.identity()) {
                    ++violations;
                }
                Element lhs = g.commutator(g.mul(a, b), g.mul(c, e));
                Element rhs = g.mul(g.mul(g.commutator(a, c), g.commutator(a, e)),
                                    g.mul(g.commutator(b, c), g.commutator(b, e)));
                if (lhs != rhs) {
                    ++violations;
                }
                const Fp j = 1 + rng.below(pv - 1);
                if (g.phi(j, g.mul(a, b)) != g.mul(g.phi(j, a), g.phi(j, b))) {
                    ++violations;
                }
                Element za = g.z_of(a);
                for (Fp jj = 0; jj < pv; ++jj) {
                    const Fp expo = p.reduce_signed(static_cast<std::int64_t>(jj) -
                                                    static_cast<std::int64_t>(jj * jj));
                    if (g.phi(jj, a) != g.mul(g.pow(a, jj), g.pow(za, expo))) {
                        ++violations;
                    }
                }
                checks += 5;
            }
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%zu randomized checks per law across %zu (p,m,d) combos, %zu violations",
                  checks / 5, combos, violations);
    return {violations == 0 && checks / 5 >= 10000, buf};
}

// --------------------------------------------------------------------------
// 5. Hiding-set verification with exhaustive coset-pair checking.

struct TripleStats {
    std::size_t equal_pairs = 0;
    std::size_t ortho_pairs = 0;
    std::size_t eigen_checks = 0;
    std::size_t violations = 0;
};

void verify_triple(const GroupSpec& g, SplitRng& rng, TripleStats& st)
{
    const std::uint64_t p = g.prime().value();
    auto hgens =
        nil2::random_hidden_subgroup(g, rng.below(2) == 0 ? 1 : p, rng);
    auto h = nil2::closure(g, hgens);
    qsim::HidingTuple t = qsim::make_appropriate_triple(g, hgens, rng);

    // the chosen exponents solve the system for the sampled characters
    if (quadsys::is_zero_vector(t.j_list)) {
        ++st.violations;
    }
    for (std::size_t r = 0; r < g.d(); ++r) {
        Fp quad = 0;
        Fp lin = 0;
        for (std::size_t i = 0; i < t.u_list.size(); ++i) {
            quad = (quad + t.u_list[i][r] * t.j_list[i] % p * t.j_list[i]) % p;
            lin = (lin + t.u_list[i][r] * t.j_list[i]) % p;
        }
        if (quad != 0 || lin != 0) {
            ++st.violations;
        }
    }

    nil2::SubgroupGens hgp_gens = hgens;
    for (std::size_t l = 0; l < g.d(); ++l) {
        hgp_gens.push_back(g.z_gen(l));
    }
    auto f = nil2::hiding_function(g, hgp_gens);

    // state equality inside every HG'-coset, orthogonality across cosets
    std::map<std::uint64_t, std::vector<qsim::FactorState>> reps;
    const std::uint64_t order = g.order();
    for (std::uint64_t code = 0; code < order; ++code) {
        Element x = g.unpack(code);
        const std::uint64_t label = f(x);
        auto psi = qsim::hiding_state(g, t, x);
        auto it = reps.find(label);
        if (it == reps.end()) {
            reps.emplace(label, std::move(psi));
        } else {
            ++st.equal_pairs;
            if (!qsim::tensor_equal(it->second, psi, p)) {
                ++st.violations;
            }
        }
    }
    for (auto it1 = reps.begin(); it1 != reps.end(); ++it1) {
        for (auto it2 = std::next(it1); it2 != reps.end(); ++it2) {
            ++st.ortho_pairs;
            if (!qsim::tensor_orthogonal(it1->second, it2->second, p)) {
                ++st.violations;
            }
        }
    }

    // eigenvalue identities for every factor and every j
    for (std::size_t i = 0; i < t.base.size(); ++i) {
        const qsim::FactorState& base = t.base[i];
        if (!(Rational(0) < base.norm_sq)) {
            ++st.violations;
        }
        const FpVector& u = t.u_list[i];
        for (Fp j = 0; j < p; ++j) {
            for (std::uint64_t zi = 0; zi < qsim::pow_u64(p, g.d()); ++zi) {
                FpVector z = qsim::vec_from_index(zi, p, g.d());
                auto moved = qsim::act(g, base, g.phi(j, Element{FpVector(g.m(), 0), z}));
                auto shift = qsim::proportional_shift(base, moved, p);
                const std::uint64_t want = qsim::dot_mod(u, z, p) * j % p * j % p;
                ++st.eigen_checks;
                if (!shift || *shift != want) {
                    ++st.violations;
                }
            }
            for (std::uint64_t hc : h) {
                Element he = g.unpack(hc);
                auto moved = qsim::act(g, base, g.phi(j, he));
                auto shift = qsim::proportional_shift(base, moved, p);
                const std::uint64_t jj = g.prime().reduce_signed(
                    static_cast<std::int64_t>(j) - static_cast<std::int64_t>(j * j));
                const std::uint64_t want = qsim::dot_mod(u, g.z_of(he).f, p) * jj % p;
                ++st.eigen_checks;
                if (!shift || *shift != want) {
                    ++st.violations;
                }
            }
        }
    }
}

Outcome criterion5()
{
    const auto t0 = std::chrono::steady_clock::now();
    SplitRng rng(0x5555);
    TripleStats st;
    for (int rep = 0; rep < 100; ++rep) {
        GroupSpec g = nil2::random_group(Prime(3), 2, 1, rng);
        verify_triple(g, rng, st);
    }
    for (int rep = 0; rep < 20; ++rep) {
        GroupSpec g = nil2::random_group(Prime(5), 3, 2, rng);
        verify_triple(g, rng, st);
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "120 triples: %zu within-coset equalities, %zu cross-coset orthogonality pairs, "
                  "%zu eigenvalue identities, %zu violations, %.1fs",
                  st.equal_pairs, st.ortho_pairs, st.eigen_checks, st.violations,
                  seconds_since(t0));
    return {st.violations == 0, buf};
}

// --------------------------------------------------------------------------
// 6. Fourier-sampling law: the exact distribution is uniform on (HG' n Gbar)-perp.

Outcome criterion6()
{
    SplitRng rng(0x5656);
    std::size_t bad = 0;
    std::size_t done = 0;
    auto one_instance = [&](std::uint64_t pv, std::size_t m, std::size_t d) {
        Prime p(pv);
        GroupSpec g = nil2::random_group(p, m, d, rng);
        auto hgens = nil2::random_hidden_subgroup(g, rng.below(2) == 0 ? 1 : pv, rng);
        qsim::HidingTuple t = qsim::make_appropriate_triple(g, hgens, rng);

        auto cls = qsim::tensor_classes(pv, m, [&](const FpVector& eb) {
            return qsim::hiding_state(g, t, Element{eb, FpVector(d, 0)});
        });
        auto dist = qsim::fourier_sample_distribution(pv, m, cls);

        // K = HG' n Gbar, directly from the subgroup closure
        nil2::SubgroupGens hgp_gens = hgens;
        for (std::size_t l = 0; l < d; ++l) {
            hgp_gens.push_back(g.z_gen(l));
        }
        auto hgp = nil2::closure(g, hgp_gens);
        std::vector<FpVector> k_vectors;
        for (std::uint64_t ei = 0; ei < qsim::pow_u64(pv, m); ++ei) {
            FpVector e = qsim::vec_from_index(ei, pv, m);
            if (nil2::set_contains(hgp, g.pack(Element{e, FpVector(d, 0)}))) {
                k_vectors.push_back(std::move(e));
            }
        }
        // perp cardinality = p^m / |K|
        const std::uint64_t perp_size = qsim::pow_u64(pv, m) / k_vectors.size();
        for (std::uint64_t yi = 0; yi < qsim::pow_u64(pv, m); ++yi) {
            FpVector y = qsim::vec_from_index(yi, pv, m);
            bool in_perp = true;
            for (const auto& kv : k_vectors) {
                if (qsim::dot_mod(y, kv, pv) != 0) {
                    in_perp = false;
                    break;
                }
            }
            const Rational expect =
                in_perp ? Rational(1, static_cast<std::int64_t>(perp_size)) : Rational(0);
            if (dist.probability(yi) != expect) {
                ++bad;
            }
        }
        ++done;
    };
    for (int i = 0; i < 30; ++i) {
        one_instance(3, 2, 1);
    }
    for (int i = 0; i < 15; ++i) {
        one_instance(3, 3, 2);
    }
    for (int i = 0; i < 5; ++i) {
        one_instance(5, 3, 2);
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%zu instances, exact rational equality with uniform-on-perp: %s", done,
                  bad == 0 ? "yes" : "NO");
    return {bad == 0 && done == 50, buf};
}

// --------------------------------------------------------------------------
// 7. End-to-end hidden subgroup recovery against the brute-force oracle.

Outcome criterion7()
{
    const auto t0 = std::chrono::steady_clock::now();
    SplitRng rng(0x5757);
    std::size_t trials = 0;
    std::size_t matches = 0;
    std::uint64_t total_retries = 0;
    double max_trial_secs = 0;
    auto run_batch = [&](std::uint64_t pv, std::size_t m, std::size_t d, int count) {
        Prime p(pv);
        for (int i = 0; i < count; ++i) {
            const auto tt0 = std::chrono::steady_clock::now();
            GroupSpec g = nil2::random_group(p, m, d, rng);
            auto hgens = nil2::random_hidden_subgroup(g, rng.below(2) == 0 ? 1 : pv, rng);
            auto f = nil2::hiding_function(g, hgens);
            auto oracle = nil2::brute_force_hsp(g, f);
            ++trials;
            try {
                qsim::HspResult res = qsim::find_hidden_subgroup(g, f, rng);
                total_retries += res.retries;
                if (res.subgroup == oracle) {
                    ++matches;
                }
            } catch (const sampling_error&) {
                // counts as a non-match
            }
            max_trial_secs = std::max(max_trial_secs, seconds_since(tt0));
        }
    };
    run_batch(3, 2, 1, 200);
    run_batch(3, 3, 2, 100);
    run_batch(5, 3, 2, 50);

    const double mean_retries = double(total_retries) / double(trials);
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "%zu/%zu trials match the oracle, mean retries %.3f (<= 1.5), slowest trial "
                  "%.2fs (< 10s), %.1fs total",
                  matches, trials, mean_retries, max_trial_secs, seconds_since(t0));
    return {matches == trials && mean_retries <= 1.5 && max_trial_secs < 10.0, buf};
}

// --------------------------------------------------------------------------
// 8. Reduction suite: Sylow splitting, normalizer iteration, G*.

Outcome criterion8()
{
    SplitRng rng(0x5858);
    std::size_t violations = 0;

    auto h3 = reduction::groupspec_to_explicit(GroupSpec(Prime(3), 2, 1, {{1}}));
    for (std::size_t zorder : {5ULL, 25ULL}) {
        auto prod = reduction::direct_product(h3, reduction::cyclic_group(zorder));
        auto parts = reduction::sylow_decompose(prod);
        if (parts.size() != 2 || parts.at(3).size() != 27 || parts.at(5).size() != zorder) {
            ++violations;
        }
    }

    // 50 random promise instances in 3-groups of order <= 3^5
    std::size_t call_budget_breaches = 0;
    const std::vector<std::pair<std::size_t, std::size_t>> shapes = {
        {1, 0}, {2, 0}, {2, 1}, {3, 0}, {3, 1}, {3, 2}, {4, 0}, {4, 1}, {5, 0}};
    for (int i = 0; i < 50; ++i) {
        const auto [m, d] = shapes[rng.below(shapes.size())];
        GroupSpec spec = nil2::random_group(Prime(3), m, d, rng);
        auto g = reduction::groupspec_to_explicit(spec);
        auto hgens = nil2::random_hidden_subgroup(spec, rng.below(2) == 0 ? 1 : 3, rng);
        reduction::IdxSet hg;
        for (const auto& e : hgens) {
            hg.push_back(static_cast<reduction::ElemIdx>(spec.pack(e)));
        }
        std::sort(hg.begin(), hg.end());
        auto hsub = reduction::closure_of(g, hg);
        auto labels = reduction::labels_from_subgroup(g, hsub);
        reduction::Algorithm1Stats st;
        auto found = reduction::algorithm1(g, labels, reduction::brute_force_solver(), &st);
        if (found != hsub) {
            ++violations;
        }
        const std::size_t logp = m + d; // |G| = 3^(m+d)
        if (st.p_calls > 4 * logp * logp) {
            ++call_budget_breaches;
        }
    }

    auto m27 = modular27();
    auto gstar = reduction::exponent_p_subgroup(m27, 3);
    if (gstar.size() != 9) {
        ++violations;
    }
    // Hall's property: cubing is constant exactly on G*-cosets
    for (std::uint32_t x = 0; x < 27; ++x) {
        for (std::uint32_t y = 0; y < 27; ++y) {
            const bool same = reduction::idx_contains(gstar, m27.mul(x, m27.inv(y)));
            if ((m27.pow(x, 3) == m27.pow(y, 3)) != same) {
                ++violations;
            }
        }
    }

    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "sylow splits + 50 normalizer-iteration instances (call-budget breaches: %zu) + "
                  "G* of order %zu with exact coset property, %zu violations",
                  call_budget_breaches, gstar.size(), violations);
    return {violations == 0 && call_budget_breaches == 0, buf};
}

// --------------------------------------------------------------------------
// 9. Polynomial-scaling smoke test (documented, not a hard gate).

Outcome criterion9()
{
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t d = 1; d <= 8; ++d) {
        const double us = hsp::cli::time_solver_us(101, d, 0x5959 + d);
        xs.push_back(std::log(double(d)));
        ys.push_back(std::log(us));
    }
    double sx = 0;
    double sy = 0;
    double sxx = 0;
    double sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double n = double(xs.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    char buf[120];
    std::snprintf(buf, sizeof buf, "solver log-log slope over d=1..8 at p=101: %.2f (target < 6)",
                  slope);
    // documented rather than gating: report but do not fail the suite
    return {true, std::string(buf) + (slope < 6.0 ? "" : " [exceeds target]")};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1. full-system solver totality", criterion1},
        {"2. quadratic-block totality and p=2 branch", criterion2},
        {"3. Chevalley-Warning counting consistency", criterion3},
        {"4. group-law suite", criterion4},
        {"5. hiding-set verification", criterion5},
        {"6. Fourier-sampling law", criterion6},
        {"7. end-to-end hidden subgroup recovery", criterion7},
        {"8. reduction suite", criterion8},
        {"9. polynomial-scaling smoke test", criterion9},
    };

    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) {
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}
