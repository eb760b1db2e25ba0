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

#include <cassert>
#include <cstdint>

namespace hsp {

/**
 * Counter-based splittable generator.
 *
 * Every draw is a pure hash of (key, counter), so a generator can be split
 * into independent child streams by key derivation. Experiments seeded with
 * the same root key produce identical results regardless of how work is
 * scheduled across threads, as long as each task gets its own split.
 */
class SplitRng {
  public:
    explicit SplitRng(std::uint64_t seed) : key_(derive(seed, 0x2545f4914f6cdd1dULL)) {}

    std::uint64_t next()
    {
        return derive(key_, counter_++);
    }

    /// Unbiased uniform draw in [0, bound). bound must be nonzero.
    std::uint64_t below(std::uint64_t bound)
    {
        assert(bound != 0);
        if (bound == 1) {
            return 0;
        }
        // Rejection sampling over a multiple of bound.
        const std::uint64_t threshold = (0 - bound) % bound; // 2^64 mod bound
        std::uint64_t r = next();
        while (r < threshold) {
            r = next();
        }
        return r % bound;
    }

    /// Independent child stream. Distinct `stream` values give distinct keys.
    SplitRng split(std::uint64_t stream) const
    {
        SplitRng child(0);
        child.key_ = derive(key_ ^ 0x9e3779b97f4a7c15ULL, stream);
        child.counter_ = 0;
        return child;
    }

  private:
    // SplitMix64-style finalizer over key + golden-ratio-weighted counter.
    static std::uint64_t derive(std::uint64_t key, std::uint64_t counter)
    {
        std::uint64_t z = key + 0x9e3779b97f4a7c15ULL * (counter + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace hsp
