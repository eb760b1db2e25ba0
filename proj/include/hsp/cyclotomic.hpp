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

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hsp {

/**
 * Exact element of Z[omega], omega a primitive p-th root of unity, stored as
 * integer coefficients of 1, omega, ..., omega^(p-1). The relation
 * 1 + omega + ... + omega^(p-1) = 0 makes the representation redundant; the
 * canonical form keeps the top coefficient at zero, so equality of canonical
 * forms is exact equality in the ring.
 */
class CycInt {
  public:
    explicit CycInt(std::uint64_t p) : coeffs_(p, 0)
    {
        if (p < 2) {
            throw std::invalid_argument("CycInt: order must be at least 2");
        }
    }

    static CycInt zero(std::uint64_t p) { return CycInt(p); }

    /// omega^k (k reduced mod p).
    static CycInt root(std::uint64_t p, std::uint64_t k)
    {
        CycInt c(p);
        c.coeffs_[k % p] = 1;
        c.canonicalize();
        return c;
    }

    static CycInt integer(std::uint64_t p, std::int64_t value)
    {
        CycInt c(p);
        c.coeffs_[0] = value;
        return c;
    }

    std::uint64_t order() const { return coeffs_.size(); }
    std::int64_t coeff(std::size_t i) const { return coeffs_[i]; }

    bool is_zero() const
    {
        for (std::int64_t x : coeffs_) {
            if (x != 0) {
                return false;
            }
        }
        return true;
    }

    /// True when the canonical form has only the constant coefficient.
    bool is_integer() const
    {
        for (std::size_t i = 1; i < coeffs_.size(); ++i) {
            if (coeffs_[i] != 0) {
                return false;
            }
        }
        return true;
    }

    std::int64_t integer_value() const
    {
        if (!is_integer()) {
            throw std::domain_error("CycInt: value is not a rational integer");
        }
        return coeffs_[0];
    }

    CycInt& operator+=(const CycInt& o)
    {
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            coeffs_[i] += o.coeffs_[i];
        }
        canonicalize();
        return *this;
    }

    CycInt& operator-=(const CycInt& o)
    {
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            coeffs_[i] -= o.coeffs_[i];
        }
        canonicalize();
        return *this;
    }

    CycInt operator+(const CycInt& o) const
    {
        CycInt r = *this;
        r += o;
        return r;
    }

    CycInt operator-(const CycInt& o) const
    {
        CycInt r = *this;
        r -= o;
        return r;
    }

    CycInt operator-() const
    {
        CycInt r = *this;
        for (auto& x : r.coeffs_) {
            x = -x;
        }
        return r; // canonical form is preserved under negation
    }

    CycInt operator*(const CycInt& o) const
    {
        const std::size_t p = coeffs_.size();
        CycInt r(p);
        for (std::size_t i = 0; i < p; ++i) {
            if (coeffs_[i] == 0) {
                continue;
            }
            for (std::size_t j = 0; j < p; ++j) {
                if (o.coeffs_[j] == 0) {
                    continue;
                }
                std::size_t k = i + j;
                if (k >= p) {
                    k -= p;
                }
                r.coeffs_[k] += coeffs_[i] * o.coeffs_[j];
            }
        }
        r.canonicalize();
        return r;
    }

    CycInt operator*(std::int64_t s) const
    {
        CycInt r = *this;
        for (auto& x : r.coeffs_) {
            x *= s;
        }
        return r;
    }

    /// Multiplication by omega^k: a cyclic shift of exponents.
    CycInt shifted(std::uint64_t k) const
    {
        const std::size_t p = coeffs_.size();
        k %= p;
        CycInt r(p);
        for (std::size_t i = 0; i < p; ++i) {
            std::size_t t = i + k;
            if (t >= p) {
                t -= p;
            }
            r.coeffs_[t] = coeffs_[i];
        }
        r.canonicalize();
        return r;
    }

    /// Complex conjugation: omega^k -> omega^(p-k).
    CycInt conj() const
    {
        const std::size_t p = coeffs_.size();
        CycInt r(p);
        r.coeffs_[0] = coeffs_[0];
        for (std::size_t i = 1; i < p; ++i) {
            r.coeffs_[p - i] = coeffs_[i];
        }
        r.canonicalize();
        return r;
    }

    bool operator==(const CycInt& o) const { return coeffs_ == o.coeffs_; }
    bool operator!=(const CycInt& o) const { return coeffs_ != o.coeffs_; }

  private:
    void canonicalize()
    {
        const std::int64_t top = coeffs_.back();
        if (top != 0) {
            for (auto& x : coeffs_) {
                x -= top;
            }
        }
    }

    std::vector<std::int64_t> coeffs_;
};

} // namespace hsp
