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

#include "stegmesh/bytes.hpp"
#include "stegmesh/domain.hpp"
#include "stegmesh/rng.hpp"

#include <cstddef>
#include <optional>

namespace stegmesh::codec {

/// Innocuous-looking carrier traffic. Embedding rewrites bits in place and
/// never changes the length.
struct CoverCarrier {
    Bytes bytes;
    CarrierKind kind = CarrierKind::PayloadLowBits;
    friend bool operator==(const CoverCarrier&, const CoverCarrier&) = default;
};

struct StegEnvelope {
    CoverCarrier carrier;
    /// Known to the sender only; nothing in `carrier` names it.
    StegMethodId method;
};

struct Uncovered {
    StegMethodId method;
    Bytes payload;
    friend bool operator==(const Uncovered&, const Uncovered&) = default;
};

inline constexpr std::size_t kMinCarrier = 32;
inline constexpr std::size_t kHeaderOverhead = 16; ///< 8-byte header + 8-byte trailer

/// Smallest carrier of `kind` able to hold `payload_len` bytes.
std::size_t min_carrier_size(CarrierKind kind, std::size_t payload_len);

/// Largest payload a carrier of `kind` and `carrier_len` bytes can hold.
std::size_t capacity(CarrierKind kind, std::size_t carrier_len);

/// Embeds `payload` with `method`. With a key, the payload is XORed with
/// keystream(key, method) before embedding; the checksum always covers the
/// plaintext, so a wrong key fails validation.
///
/// Throws UnknownMethod if the registry lacks `method`, CarrierMismatch if the
/// carrier kind differs from the method's codec, CarrierTooSmall if the
/// carrier cannot hold the payload.
StegEnvelope cover(ByteView payload, StegMethodId method, CoverCarrier carrier,
                   const MethodRegistry& registry, const Key256* key = nullptr);

/// Decodes with exactly one method. nullopt on checksum mismatch.
std::optional<Bytes> uncover(ByteView carrier, StegMethodId method, const MethodRegistry& registry,
                             const Key256* key = nullptr);

/// Trial-decodes with every method of `profile` in ascending id order and
/// returns the first that validates.
std::optional<Uncovered> find_steg_msg(ByteView carrier, CapabilityProfile profile,
                                       const MethodRegistry& registry, const Key256* key = nullptr);

/// Minimal-size carrier for `min_payload` bytes, filled from `rng`.
CoverCarrier make_carrier(CarrierKind kind, std::size_t min_payload, Rng& rng);

} // namespace stegmesh::codec
