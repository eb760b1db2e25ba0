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

#include <istream>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "hsp/errors.hpp"
#include "hsp/fp.hpp"
#include "hsp/linalg.hpp"
#include "hsp/rng.hpp"

namespace hsp::quadsys {

using fp::Fp;
using fp::Prime;
using linalg::FpMatrix;
using linalg::FpVector;

/// Variables needed by the quadratic-block solver for d equations.
constexpr std::size_t quadratic_block_bound(std::size_t d)
{
    return (d + 1) * (d + 2) / 2;
}

/// Variables needed by the full quadratic+linear solver for d equations.
constexpr std::size_t full_system_bound(std::size_t d)
{
    return (d + 1) * (d + 1) * (d + 2) / 2;
}

/**
 * The homogeneous system in n unknowns j over Z_p:
 *
 *     sum_i u_i * j_i^2 = 0    and    sum_i u_i * j_i = 0
 *
 * where u_i in Z_p^d is column i of the d x n matrix U. A Solution is any
 * nonzero j satisfying both vector equations.
 */
struct QuadLinSystem {
    Prime p;
    std::size_t d;
    std::size_t n;
    FpMatrix u; // d x n

    QuadLinSystem(Prime prime, std::size_t d_, std::size_t n_, FpMatrix u_)
        : p(prime), d(d_), n(n_), u(std::move(u_))
    {
        if (d < 1 || n < 1 || u.rows != d || u.cols != n) {
            throw std::invalid_argument("QuadLinSystem: inconsistent dimensions");
        }
    }
};

inline bool is_zero_vector(const FpVector& v)
{
    for (Fp x : v) {
        if (x != 0) {
            return false;
        }
    }
    return true;
}

/// Exact substitution check for the quadratic-only system U * j^2 = 0.
inline bool check_quadratic(const FpMatrix& u, const FpVector& j, const Prime& p)
{
    if (j.size() != u.cols || is_zero_vector(j)) {
        return false;
    }
    for (std::size_t r = 0; r < u.rows; ++r) {
        Fp acc = 0;
        for (std::size_t c = 0; c < u.cols; ++c) {
            acc = p.add(acc, p.mul(u.at(r, c), p.mul(j[c], j[c])));
        }
        if (acc != 0) {
            return false;
        }
    }
    return true;
}

/// Exact substitution check for the full system (quadratic and linear part).
inline bool check_full(const QuadLinSystem& sys, const FpVector& j)
{
    if (!check_quadratic(sys.u, j, sys.p)) {
        return false;
    }
    return is_zero_vector(linalg::mat_vec(sys.u, j, sys.p));
}

namespace detail {

// One level of the recursive elimination. m has full shape d x w with
// w >= quadratic_block_bound(d); returns nonzero j with m * (j^2) = 0.
inline FpVector solve_quadratic_rec(const FpMatrix& m, const Prime& p, SplitRng& rng)
{
    const std::size_t d = m.rows;
    const std::size_t w = m.cols;

    if (d == 0) {
        FpVector j(w, 0);
        j[0] = 1;
        return j;
    }
    if (d == 1) {
        auto sol = fp::solve_ternary_diagonal(m.at(0, 0), m.at(0, 1), m.at(0, 2), p, rng);
        FpVector j(w, 0);
        j[0] = sol[0];
        j[1] = sol[1];
        j[2] = sol[2];
        return j;
    }

    const linalg::RrefResult rr = linalg::rref(m, p);

    // Dependent rows carry no constraint: keep the echelon rows only.
    if (rr.rank < d) {
        FpMatrix reduced(rr.rank, w);
        for (std::size_t r = 0; r < rr.rank; ++r) {
            for (std::size_t c = 0; c < w; ++c) {
                reduced.at(r, c) = rr.r.at(r, c);
            }
        }
        return solve_quadratic_rec(reduced, p, rng);
    }

    // Reindex variables so pivot columns come first: mp = [ I_d | rest ].
    std::vector<std::size_t> perm;
    perm.reserve(w);
    std::vector<bool> is_pivot(w, false);
    for (std::size_t c : rr.pivot_cols) {
        is_pivot[c] = true;
        perm.push_back(c);
    }
    for (std::size_t c = 0; c < w; ++c) {
        if (!is_pivot[c]) {
            perm.push_back(c);
        }
    }
    FpMatrix mp(d, w);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            mp.at(r, c) = rr.r.at(r, perm[c]);
        }
    }

    // First non-pivot column; if it vanishes identically, its variable is free.
    bool col_zero = true;
    for (std::size_t r = 0; r < d; ++r) {
        if (mp.at(r, d) != 0) {
            col_zero = false;
            break;
        }
    }
    if (col_zero) {
        FpVector out(w, 0);
        out[perm[d]] = 1;
        return out;
    }

    // Classify the column entries as squares / lambda * squares / zeros.
    std::vector<std::size_t> sq_rows;
    std::vector<std::size_t> lam_rows;
    std::vector<std::size_t> zero_rows;
    for (std::size_t r = 0; r < d; ++r) {
        const Fp wv = mp.at(r, d);
        if (wv == 0) {
            zero_rows.push_back(r);
        } else if (fp::is_qr(wv, p)) {
            sq_rows.push_back(r);
        } else {
            lam_rows.push_back(r);
        }
    }
    const std::size_t k1 = sq_rows.size();
    const std::size_t k2 = lam_rows.size();

    // For p = 3 (mod 4) the nonresidue is fixed to -1, which is exactly what
    // the pinning step below needs; otherwise draw one.
    Fp lambda = 0;
    if (k2 > 0) {
        lambda = (p.value() % 4 == 3) ? p.value() - 1 : fp::find_nonresidue(p, rng);
    }

    std::vector<std::size_t> sigma; // new row -> old row
    sigma.insert(sigma.end(), sq_rows.begin(), sq_rows.end());
    sigma.insert(sigma.end(), lam_rows.begin(), lam_rows.end());
    sigma.insert(sigma.end(), zero_rows.begin(), zero_rows.end());

    const std::size_t tail_len = w - d - 1;
    std::vector<FpVector> tails(d, FpVector(tail_len, 0));
    std::vector<Fp> v_scale(d, 1);
    for (std::size_t r = 0; r < d; ++r) {
        const std::size_t old_row = sigma[r];
        for (std::size_t k = 0; k < tail_len; ++k) {
            tails[r][k] = mp.at(old_row, d + 1 + k);
        }
        if (r < k1 + k2) {
            const Fp wv = mp.at(old_row, d);
            const Fp sq = (r < k1) ? wv : p.mul(wv, p.inv(lambda));
            const Fp v = fp::sqrt_mod(sq, p, rng);
            v_scale[r] = v;
            // Divide the row by v^2; the head variable is rescaled to match.
            const Fp inv_v2 = p.inv(p.mul(v, v));
            for (std::size_t k = 0; k < tail_len; ++k) {
                tails[r][k] = p.mul(tails[r][k], inv_v2);
            }
        }
    }

    // Merge equal-class rows into their class master.
    for (std::size_t r = 1; r < k1; ++r) {
        for (std::size_t k = 0; k < tail_len; ++k) {
            tails[r][k] = p.sub(tails[r][k], tails[0][k]);
        }
    }
    for (std::size_t r = k1 + 1; r < k1 + k2; ++r) {
        for (std::size_t k = 0; k < tail_len; ++k) {
            tails[r][k] = p.sub(tails[r][k], tails[k1][k]);
        }
    }

    // Pick the binary line and, when both classes survive, pin one master to
    // the new free variable so its line becomes tail-only.
    std::size_t binary_row;
    Fp alpha;
    bool pin_square_master = false; // head slot 0 gets s*y (p = 1 mod 4)
    Fp s = 0;
    std::vector<std::size_t> rec_rows;
    if (k1 > 0 && k2 > 0) {
        if (p.value() % 4 == 1) {
            // -1 is a square: pin the square master to s*y, keep the lambda line.
            s = fp::sqrt_mod(p.value() - 1, p, rng);
            binary_row = k1;
            alpha = lambda;
            pin_square_master = true;
            rec_rows.push_back(0);
        } else {
            // lambda = -1: pin the lambda master to y, keep the square line.
            binary_row = 0;
            alpha = 1;
            rec_rows.push_back(k1);
        }
    } else if (k2 == 0) {
        binary_row = 0;
        alpha = 1;
    } else {
        binary_row = 0;
        alpha = lambda;
    }
    for (std::size_t r = 1; r < k1; ++r) {
        rec_rows.push_back(r);
    }
    for (std::size_t r = k1 + 1; r < k1 + k2; ++r) {
        rec_rows.push_back(r);
    }
    for (std::size_t r = k1 + k2; r < d; ++r) {
        rec_rows.push_back(r);
    }

    FpMatrix recm(rec_rows.size(), tail_len);
    for (std::size_t r = 0; r < rec_rows.size(); ++r) {
        for (std::size_t k = 0; k < tail_len; ++k) {
            recm.at(r, k) = tails[rec_rows[r]][k];
        }
    }
    const FpVector tail_sol = solve_quadratic_rec(recm, p, rng);

    Fp b = 0;
    for (std::size_t k = 0; k < tail_len; ++k) {
        b = p.add(b, p.mul(tails[binary_row][k], p.mul(tail_sol[k], tail_sol[k])));
    }
    const auto [x, y] = fp::solve_binary_inhomogeneous(alpha, b, p, rng);

    // Head values in the rescaled variables, then undo the rescaling.
    FpVector head(d, 0);
    if (k1 > 0 && k2 > 0) {
        if (pin_square_master) {
            head[0] = p.mul(s, y);
            head[k1] = x;
        } else {
            head[0] = x;
            head[k1] = y;
        }
    } else {
        head[0] = x;
    }
    for (std::size_t r = 1; r < k1; ++r) {
        head[r] = head[0];
    }
    if (k1 > 0) {
        for (std::size_t r = k1 + 1; r < k1 + k2; ++r) {
            head[r] = head[k1];
        }
    } else {
        for (std::size_t r = 1; r < k2; ++r) {
            head[r] = head[0];
        }
    }

    FpVector out(w, 0);
    for (std::size_t r = 0; r < d; ++r) {
        const Fp value = (r < k1 + k2) ? p.mul(v_scale[r], head[r]) : 0;
        out[perm[sigma[r]]] = value;
    }
    out[perm[d]] = y;
    for (std::size_t k = 0; k < tail_len; ++k) {
        out[perm[d + 1 + k]] = tail_sol[k];
    }
    return out;
}

} // namespace detail

/**
 * Nonzero solution of the quadratic-only block: U * (j^2) = 0 over Z_p,
 * p odd, with n' >= (d+1)(d+2)/2 variables for d equations.
 */
inline FpVector solve_quadratic_block(const FpMatrix& u, const Prime& p, SplitRng& rng)
{
    if (p.is_two()) {
        throw std::invalid_argument("solve_quadratic_block: requires odd p");
    }
    if (u.cols < quadratic_block_bound(u.rows)) {
        throw std::invalid_argument("solve_quadratic_block: too few variables for " +
                                    std::to_string(u.rows) + " equations");
    }
    return detail::solve_quadratic_rec(u, p, rng);
}

/**
 * Nonzero simultaneous solution of U * (j^2) = 0 and U * j = 0.
 *
 * For odd p the first (d+1) blocks of n' = (d+1)(d+2)/2 columns are solved
 * independently for the quadratic part; a kernel vector of the d x (d+1)
 * block-sum matrix then scales the blocks so the linear part vanishes too.
 * For p = 2 squaring is the identity and a kernel vector of U suffices.
 */
inline FpVector solve_full_system(const QuadLinSystem& sys, SplitRng& rng)
{
    if (sys.n < full_system_bound(sys.d)) {
        throw std::invalid_argument("solve_full_system: need at least " +
                                    std::to_string(full_system_bound(sys.d)) + " variables for " +
                                    std::to_string(sys.d) + " equations");
    }
    const Prime& p = sys.p;

    if (p.is_two()) {
        auto basis = linalg::kernel_basis(sys.u, p);
        if (basis.empty()) {
            throw std::logic_error("solve_full_system: kernel unexpectedly trivial");
        }
        return basis.front();
    }

    const std::size_t nprime = quadratic_block_bound(sys.d);
    const std::size_t blocks = sys.d + 1;

    std::vector<FpVector> block_sol(blocks);
    for (std::size_t k = 0; k < blocks; ++k) {
        FpMatrix sub(sys.d, nprime);
        for (std::size_t r = 0; r < sys.d; ++r) {
            for (std::size_t c = 0; c < nprime; ++c) {
                sub.at(r, c) = sys.u.at(r, k * nprime + c);
            }
        }
        block_sol[k] = solve_quadratic_block(sub, p, rng);
    }

    // Linear part: find nonzero block scalings lambda with L * lambda = 0.
    FpMatrix l(sys.d, blocks);
    for (std::size_t r = 0; r < sys.d; ++r) {
        for (std::size_t k = 0; k < blocks; ++k) {
            Fp acc = 0;
            for (std::size_t c = 0; c < nprime; ++c) {
                acc = p.add(acc, p.mul(sys.u.at(r, k * nprime + c), block_sol[k][c]));
            }
            l.at(r, k) = acc;
        }
    }
    auto lam_basis = linalg::kernel_basis(l, p);
    if (lam_basis.empty()) {
        throw std::logic_error("solve_full_system: block scaling kernel unexpectedly trivial");
    }
    const FpVector& lam = lam_basis.front();

    FpVector out(sys.n, 0);
    for (std::size_t k = 0; k < blocks; ++k) {
        for (std::size_t c = 0; c < nprime; ++c) {
            out[k * nprime + c] = p.mul(lam[k], block_sol[k][c]);
        }
    }
    return out;
}

/// Text format: "p d n" on the first line, then d rows of n integers.
inline QuadLinSystem parse_system(std::istream& in)
{
    std::uint64_t pv = 0;
    std::size_t d = 0;
    std::size_t n = 0;
    if (!(in >> pv >> d >> n)) {
        throw parse_error("system file: expected header 'p d n'");
    }
    if (d < 1 || n < 1 || d > 4096 || n > (1u << 20)) {
        throw parse_error("system file: dimensions out of range");
    }
    Prime p = [&] {
        try {
            return Prime(pv);
        } catch (const std::invalid_argument& e) {
            throw parse_error(std::string("system file: ") + e.what());
        }
    }();
    FpMatrix u(d, n);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            std::uint64_t x = 0;
            if (!(in >> x)) {
                throw parse_error("system file: truncated coefficient matrix");
            }
            u.at(r, c) = p.reduce(x);
        }
    }
    std::string extra;
    if (in >> extra) {
        throw parse_error("system file: trailing data after matrix");
    }
    return QuadLinSystem(p, d, n, std::move(u));
}

inline void write_system(std::ostream& out, const QuadLinSystem& sys)
{
    out << sys.p.value() << ' ' << sys.d << ' ' << sys.n << '\n';
    for (std::size_t r = 0; r < sys.d; ++r) {
        for (std::size_t c = 0; c < sys.n; ++c) {
            out << sys.u.at(r, c) << (c + 1 == sys.n ? '\n' : ' ');
        }
    }
}

} // namespace hsp::quadsys
