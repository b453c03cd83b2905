// Copyright 2026 The stegmesh Authors
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
#include <span>

namespace stegmesh {

/// SplitMix64 (Steele, Lea, Flood). Constants:
///   increment 0x9E3779B97F4A7C15
///   mix       z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
///             z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31
class Rng {
public:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    explicit constexpr Rng(std::uint64_t seed = 0) : state_(seed) {}

    static constexpr std::uint64_t mix(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Independent stream for `stream_id` under a world seed. Used to give
    /// every node its own generator so draws do not depend on interleaving.
    static constexpr Rng stream(std::uint64_t seed, std::uint64_t stream_id)
    {
        return Rng(mix(seed ^ mix(stream_id + kGamma)));
    }

    constexpr std::uint64_t next()
    {
        state_ += kGamma;
        return mix(state_);
    }

    /// Uniform integer in [0, bound). bound == 0 yields 0.
    constexpr std::uint64_t below(std::uint64_t bound)
    {
        if (bound == 0)
            return 0;
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold)
                return r % bound;
        }
    }

    /// Uniform integer in [0, hi], inclusive.
    constexpr std::uint64_t inclusive(std::uint64_t hi)
    {
        return hi == UINT64_MAX ? next() : below(hi + 1);
    }

    void fill(std::span<std::uint8_t> out);

    std::uint64_t state() const { return state_; }
    friend constexpr bool operator==(const Rng&, const Rng&) = default;

private:
    std::uint64_t state_;
};

using Key256 = std::array<std::uint8_t, 32>;

/// XORs `data` in place with the keystream for (key, nonce).
///   seed  = nonce; for each big-endian 64-bit key word w: seed = mix(seed ^ w)
///   block = mix(seed + (i+1) * kGamma), emitted big-endian
void apply_keystream(const Key256& key, std::uint64_t nonce, std::span<std::uint8_t> data);

} // namespace stegmesh
