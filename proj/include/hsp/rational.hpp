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
#include <numeric>
#include <stdexcept>
#include <string>

namespace hsp {

/// Exact rational on int64, reduced eagerly. Desk-scale magnitudes only;
/// arithmetic that would overflow throws instead of wrapping.
class Rational {
  public:
    Rational() = default;
    Rational(std::int64_t n) : num_(n) {} // NOLINT(google-explicit-constructor)

    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d)
    {
        if (d == 0) {
            throw std::domain_error("Rational: zero denominator");
        }
        normalize();
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }

    Rational operator+(const Rational& o) const
    {
        return Rational(checked_add(checked_mul(num_, o.den_), checked_mul(o.num_, den_)),
                        checked_mul(den_, o.den_));
    }

    Rational operator-(const Rational& o) const
    {
        return Rational(checked_add(checked_mul(num_, o.den_), -checked_mul(o.num_, den_)),
                        checked_mul(den_, o.den_));
    }

    Rational operator*(const Rational& o) const
    {
        return Rational(checked_mul(num_, o.num_), checked_mul(den_, o.den_));
    }

    Rational operator/(const Rational& o) const
    {
        if (o.num_ == 0) {
            throw std::domain_error("Rational: division by zero");
        }
        return Rational(checked_mul(num_, o.den_), checked_mul(den_, o.num_));
    }

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }

    bool operator<(const Rational& o) const
    {
        return checked_mul(num_, o.den_) < checked_mul(o.num_, den_);
    }

    std::string str() const
    {
        if (den_ == 1) {
            return std::to_string(num_);
        }
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

  private:
    void normalize()
    {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
        if (num_ == 0) {
            den_ = 1;
        }
    }

    static std::int64_t checked_mul(std::int64_t a, std::int64_t b)
    {
        std::int64_t r = 0;
        if (__builtin_mul_overflow(a, b, &r)) {
            throw std::overflow_error("Rational: multiplication overflow");
        }
        return r;
    }

    static std::int64_t checked_add(std::int64_t a, std::int64_t b)
    {
        std::int64_t r = 0;
        if (__builtin_add_overflow(a, b, &r)) {
            throw std::overflow_error("Rational: addition overflow");
        }
        return r;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

} // namespace hsp
