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

#include "stegmesh/codec.hpp"

#include "stegmesh/checksum.hpp"
#include "stegmesh/errors.hpp"

#include <algorithm>

namespace stegmesh::codec {

namespace {

constexpr std::size_t kHeaderPayloadOffset = 8;
constexpr std::size_t kTrailerBits = 32;

std::uint32_t method_checksum(StegMethodId method, ByteView plaintext)
{
    const std::uint8_t tag[1] = {method.value};
    return crc32(crc32(ByteView(tag, 1)), plaintext);
}

std::uint64_t key_nonce(StegMethodId method) { return 0xC0DEC0DE00000000ULL | method.value; }

void put_u32(Bytes& b, std::size_t at, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        b[at + i] = static_cast<std::uint8_t>(v >> (24 - 8 * i));
}

std::uint32_t get_u32(ByteView b, std::size_t at)
{
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v = v << 8 | b[at + i];
    return v;
}

void set_bit(std::uint8_t& byte, int bit, bool value)
{
    byte = static_cast<std::uint8_t>((byte & ~(1U << bit)) | (static_cast<unsigned>(value) << bit));
}

// Trailer word on bit plane `plane` of the last 32 bytes, MSB first.
void put_trailer(Bytes& b, int plane, std::uint32_t v)
{
    const std::size_t base = b.size() - kTrailerBits;
    for (std::size_t j = 0; j < kTrailerBits; ++j)
        set_bit(b[base + j], plane, (v >> (31 - j)) & 1U);
}

std::uint32_t get_trailer(ByteView b, int plane)
{
    const std::size_t base = b.size() - kTrailerBits;
    std::uint32_t v = 0;
    for (std::size_t j = 0; j < kTrailerBits; ++j)
        v = v << 1 | ((b[base + j] >> plane) & 1U);
    return v;
}

const MethodInfo& lookup(const MethodRegistry& registry, StegMethodId method)
{
    const MethodInfo* info = registry.find(method);
    if (!info)
        throw UnknownMethod("steganographic method " + std::to_string(method.value) + " is not registered");
    return *info;
}

std::optional<Bytes> decode_header_field(ByteView c)
{
    if (c.size() < kMinCarrier)
        return std::nullopt;
    const std::uint32_t len = get_u32(c, 0);
    if (len > capacity(CarrierKind::HeaderField, c.size()))
        return std::nullopt;
    const auto first = c.begin() + kHeaderPayloadOffset;
    return Bytes(first, first + len);
}

std::optional<Bytes> decode_low_bits(ByteView c)
{
    if (c.size() < kMinCarrier)
        return std::nullopt;
    const std::uint32_t len = get_trailer(c, 2);
    if (len > capacity(CarrierKind::PayloadLowBits, c.size()))
        return std::nullopt;
    Bytes out(len, 0);
    for (std::size_t k = 0; k < std::size_t{len} * 8; ++k)
        out[k / 8] = static_cast<std::uint8_t>(out[k / 8] | (c[k] & 1U) << (7 - k % 8));
    return out;
}

std::uint32_t stored_checksum(ByteView c, CarrierKind kind)
{
    return kind == CarrierKind::HeaderField ? get_u32(c, 4) : get_trailer(c, 1);
}

} // namespace

std::size_t min_carrier_size(CarrierKind kind, std::size_t payload_len)
{
    switch (kind) {
    case CarrierKind::HeaderField: return std::max(kMinCarrier, payload_len + kHeaderOverhead);
    case CarrierKind::PayloadLowBits: return std::max(kMinCarrier, payload_len * 8);
    }
    return kMinCarrier;
}

std::size_t capacity(CarrierKind kind, std::size_t carrier_len)
{
    if (carrier_len < kMinCarrier)
        return 0;
    switch (kind) {
    case CarrierKind::HeaderField: return carrier_len - kHeaderOverhead;
    case CarrierKind::PayloadLowBits: return carrier_len / 8;
    }
    return 0;
}

StegEnvelope cover(ByteView payload, StegMethodId method, CoverCarrier carrier,
                   const MethodRegistry& registry, const Key256* key)
{
    const MethodInfo& info = lookup(registry, method);
    if (info.codec != carrier.kind)
        throw CarrierMismatch(std::string("method ") + std::to_string(method.value) + " embeds into " +
                              to_string(info.codec) + " carriers, got " + to_string(carrier.kind));
    if (carrier.bytes.size() < min_carrier_size(carrier.kind, payload.size()))
        throw CarrierTooSmall("payload of " + std::to_string(payload.size()) + " bytes needs a " +
                              std::to_string(min_carrier_size(carrier.kind, payload.size())) +
                              "-byte carrier, got " + std::to_string(carrier.bytes.size()));

    const std::uint32_t checksum = method_checksum(method, payload);
    Bytes embedded(payload.begin(), payload.end());
    if (key)
        apply_keystream(*key, key_nonce(method), embedded);

    Bytes& c = carrier.bytes;
    const auto len = static_cast<std::uint32_t>(payload.size());
    if (carrier.kind == CarrierKind::HeaderField) {
        put_u32(c, 0, len);
        put_u32(c, 4, checksum);
        std::copy(embedded.begin(), embedded.end(), c.begin() + kHeaderPayloadOffset);
    } else {
        for (std::size_t k = 0; k < embedded.size() * 8; ++k)
            set_bit(c[k], 0, (embedded[k / 8] >> (7 - k % 8)) & 1U);
        put_trailer(c, 1, checksum);
        put_trailer(c, 2, len);
    }
    return StegEnvelope{std::move(carrier), method};
}

std::optional<Bytes> uncover(ByteView carrier, StegMethodId method, const MethodRegistry& registry,
                             const Key256* key)
{
    const MethodInfo* info = registry.find(method);
    if (!info)
        return std::nullopt;
    auto payload = info->codec == CarrierKind::HeaderField ? decode_header_field(carrier)
                                                           : decode_low_bits(carrier);
    if (!payload)
        return std::nullopt;
    if (key)
        apply_keystream(*key, key_nonce(method), *payload);
    if (method_checksum(method, *payload) != stored_checksum(carrier, info->codec))
        return std::nullopt;
    return payload;
}

std::optional<Uncovered> find_steg_msg(ByteView carrier, CapabilityProfile profile,
                                       const MethodRegistry& registry, const Key256* key)
{
    for (auto method : profile.ids()) {
        if (auto payload = uncover(carrier, method, registry, key))
            return Uncovered{method, std::move(*payload)};
    }
    return std::nullopt;
}

CoverCarrier make_carrier(CarrierKind kind, std::size_t min_payload, Rng& rng)
{
    CoverCarrier c{Bytes(min_carrier_size(kind, min_payload)), kind};
    rng.fill(c.bytes);
    return c;
}

} // namespace stegmesh::codec
