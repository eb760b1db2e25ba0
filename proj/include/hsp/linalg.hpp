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

#include <cstddef>
#include <vector>

#include "hsp/fp.hpp"

namespace hsp::linalg {

using fp::Fp;
using fp::Prime;
using FpVector = std::vector<Fp>;

/// Dense row-major matrix over Z_p. Desk-scale dimensions only.
struct FpMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Fp> a;

    FpMatrix() = default;
    FpMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0) {}

    Fp& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    Fp at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    static FpMatrix from_rows(const std::vector<FpVector>& rws, std::size_t ncols)
    {
        FpMatrix m(rws.size(), ncols);
        for (std::size_t r = 0; r < rws.size(); ++r) {
            for (std::size_t c = 0; c < ncols; ++c) {
                m.at(r, c) = rws[r][c];
            }
        }
        return m;
    }

    FpVector row(std::size_t r) const
    {
        return FpVector(a.begin() + static_cast<std::ptrdiff_t>(r * cols),
                        a.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols));
    }

    bool operator==(const FpMatrix& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

struct RrefResult {
    FpMatrix r;
    std::size_t rank = 0;
    std::vector<std::size_t> pivot_cols;
};

/// Reduced row echelon form, deterministic leftmost-pivot elimination.
inline RrefResult rref(const FpMatrix& m, const Prime& p)
{
    RrefResult res;
    res.r = m;
    FpMatrix& r = res.r;
    std::size_t pivot_row = 0;
    for (std::size_t col = 0; col < r.cols && pivot_row < r.rows; ++col) {
        std::size_t sel = pivot_row;
        while (sel < r.rows && r.at(sel, col) == 0) {
            ++sel;
        }
        if (sel == r.rows) {
            continue;
        }
        if (sel != pivot_row) {
            for (std::size_t c = 0; c < r.cols; ++c) {
                std::swap(r.a[sel * r.cols + c], r.a[pivot_row * r.cols + c]);
            }
        }
        const Fp scale = p.inv(r.at(pivot_row, col));
        for (std::size_t c = col; c < r.cols; ++c) {
            r.at(pivot_row, c) = p.mul(r.at(pivot_row, c), scale);
        }
        for (std::size_t rr = 0; rr < r.rows; ++rr) {
            if (rr == pivot_row || r.at(rr, col) == 0) {
                continue;
            }
            const Fp f = r.at(rr, col);
            for (std::size_t c = col; c < r.cols; ++c) {
                r.at(rr, c) = p.sub(r.at(rr, c), p.mul(f, r.at(pivot_row, c)));
            }
        }
        res.pivot_cols.push_back(col);
        ++pivot_row;
    }
    res.rank = pivot_row;
    return res;
}

/// Basis of the right kernel {v : Mv = 0}, one vector per free column.
inline std::vector<FpVector> kernel_basis(const FpMatrix& m, const Prime& p)
{
    const RrefResult rr = rref(m, p);
    std::vector<bool> is_pivot(m.cols, false);
    for (std::size_t c : rr.pivot_cols) {
        is_pivot[c] = true;
    }
    std::vector<FpVector> basis;
    for (std::size_t free_col = 0; free_col < m.cols; ++free_col) {
        if (is_pivot[free_col]) {
            continue;
        }
        FpVector v(m.cols, 0);
        v[free_col] = 1;
        for (std::size_t r = 0; r < rr.rank; ++r) {
            v[rr.pivot_cols[r]] = p.neg(rr.r.at(r, free_col));
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

inline FpVector mat_vec(const FpMatrix& m, const FpVector& v, const Prime& p)
{
    FpVector out(m.rows, 0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        Fp acc = 0;
        for (std::size_t c = 0; c < m.cols; ++c) {
            acc = p.add(acc, p.mul(m.at(r, c), v[c]));
        }
        out[r] = acc;
    }
    return out;
}

inline Fp dot(const FpVector& a, const FpVector& b, const Prime& p)
{
    Fp acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc = p.add(acc, p.mul(a[i], b[i]));
    }
    return acc;
}

/// Basis of {w in Z_p^k : <w, v> = 0 for all v in V}.
inline std::vector<FpVector> orthogonal_complement(const std::vector<FpVector>& v, std::size_t k,
                                                   const Prime& p)
{
    if (v.empty()) {
        std::vector<FpVector> full;
        for (std::size_t i = 0; i < k; ++i) {
            FpVector e(k, 0);
            e[i] = 1;
            full.push_back(std::move(e));
        }
        return full;
    }
    return kernel_basis(FpMatrix::from_rows(v, k), p);
}

/**
 * Incrementally maintained row space in echelon form. add() reports whether
 * the vector enlarged the span; used by the Fourier-sampling loop to detect
 * rank stagnation.
 */
class Span {
  public:
    explicit Span(std::size_t dim) : dim_(dim) {}

    bool add(FpVector v, const Prime& p)
    {
        for (const auto& [lead, row] : rows_) {
            if (v[lead] != 0) {
                const Fp f = v[lead];
                for (std::size_t c = 0; c < dim_; ++c) {
                    v[c] = p.sub(v[c], p.mul(f, row[c]));
                }
            }
        }
        std::size_t lead = 0;
        while (lead < dim_ && v[lead] == 0) {
            ++lead;
        }
        if (lead == dim_) {
            return false;
        }
        const Fp scale = p.inv(v[lead]);
        for (std::size_t c = 0; c < dim_; ++c) {
            v[c] = p.mul(v[c], scale);
        }
        for (auto& [l, row] : rows_) {
            if (row[lead] != 0) {
                const Fp f = row[lead];
                for (std::size_t c = 0; c < dim_; ++c) {
                    row[c] = p.sub(row[c], p.mul(f, v[c]));
                }
            }
        }
        rows_.emplace_back(lead, std::move(v));
        return true;
    }

    bool contains(FpVector v, const Prime& p) const
    {
        for (const auto& [lead, row] : rows_) {
            if (v[lead] != 0) {
                const Fp f = v[lead];
                for (std::size_t c = 0; c < dim_; ++c) {
                    v[c] = p.sub(v[c], p.mul(f, row[c]));
                }
            }
        }
        for (Fp x : v) {
            if (x != 0) {
                return false;
            }
        }
        return true;
    }

    std::size_t rank() const { return rows_.size(); }
    std::size_t dim() const { return dim_; }

    std::vector<FpVector> basis() const
    {
        std::vector<FpVector> b;
        b.reserve(rows_.size());
        for (const auto& [lead, row] : rows_) {
            b.push_back(row);
        }
        return b;
    }

  private:
    std::size_t dim_;
    std::vector<std::pair<std::size_t, FpVector>> rows_;
};

} // namespace hsp::linalg
