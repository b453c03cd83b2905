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

#include "stegmesh/bytes.hpp"
#include "stegmesh/checksum.hpp"
#include "stegmesh/fixed.hpp"
#include "stegmesh/rng.hpp"

#include <zlib.h>

#include <cstdio>

namespace stegmesh {

std::string to_hex(ByteView bytes)
{
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xF]);
    }
    return out;
}

std::optional<Bytes> from_hex(std::string_view hex)
{
    if (hex.size() % 2 != 0)
        return std::nullopt;
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9')
            return c - '0';
        if (c >= 'a' && c <= 'f')
            return c - 'a' + 10;
        if (c >= 'A' && c <= 'F')
            return c - 'A' + 10;
        return -1;
    };
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        const int hi = nibble(hex[i]);
        const int lo = nibble(hex[i + 1]);
        if (hi < 0 || lo < 0)
            return std::nullopt;
        out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
    }
    return out;
}

std::optional<Micro> Micro::parse(std::string_view text)
{
    if (text.empty())
        return std::nullopt;
    std::int64_t whole = 0;
    std::size_t i = 0;
    bool any_digit = false;
    for (; i < text.size() && text[i] != '.'; ++i) {
        const char c = text[i];
        if (c < '0' || c > '9')
            return std::nullopt;
        whole = whole * 10 + (c - '0');
        if (whole > (std::int64_t{1} << 40))
            return std::nullopt;
        any_digit = true;
    }
    std::int64_t frac = 0;
    int frac_digits = 0;
    bool round_up = false;
    if (i < text.size()) {
        ++i; // '.'
        for (; i < text.size(); ++i) {
            const char c = text[i];
            if (c < '0' || c > '9')
                return std::nullopt;
            any_digit = true;
            if (frac_digits < 6) {
                frac = frac * 10 + (c - '0');
                ++frac_digits;
            } else if (frac_digits == 6) {
                round_up = c >= '5';
                ++frac_digits;
            }
        }
    }
    if (!any_digit)
        return std::nullopt;
    for (int d = std::min(frac_digits, 6); d < 6; ++d)
        frac *= 10;
    return Micro{whole * kScale + frac + (round_up ? 1 : 0)};
}

std::string Micro::to_string() const
{
    const bool negative = units < 0;
    const std::uint64_t magnitude =
        negative ? static_cast<std::uint64_t>(-(units + 1)) + 1 : static_cast<std::uint64_t>(units);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%llu.%06llu", negative ? "-" : "",
                  static_cast<unsigned long long>(magnitude / kScale),
                  static_cast<unsigned long long>(magnitude % kScale));
    return buf;
}

void Rng::fill(std::span<std::uint8_t> out)
{
    std::size_t i = 0;
    while (i < out.size()) {
        std::uint64_t word = next();
        for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
            out[i] = static_cast<std::uint8_t>(word >> 56);
            word <<= 8;
        }
    }
}

void apply_keystream(const Key256& key, std::uint64_t nonce, std::span<std::uint8_t> data)
{
    std::uint64_t seed = nonce;
    for (int w = 0; w < 4; ++w) {
        std::uint64_t word = 0;
        for (int b = 0; b < 8; ++b)
            word = word << 8 | key[static_cast<std::size_t>(w * 8 + b)];
        seed = Rng::mix(seed ^ word);
    }
    std::uint64_t counter = seed;
    std::size_t i = 0;
    while (i < data.size()) {
        counter += Rng::kGamma;
        std::uint64_t block = Rng::mix(counter);
        for (int b = 0; b < 8 && i < data.size(); ++b, ++i) {
            data[i] ^= static_cast<std::uint8_t>(block >> 56);
            block <<= 8;
        }
    }
}

std::uint32_t crc32(ByteView data) { return crc32(0, data); }

std::uint32_t crc32(std::uint32_t running, ByteView data)
{
    // zlib takes uInt lengths; chunk to stay portable for large inputs.
    uLong crc = running;
    std::size_t off = 0;
    while (off < data.size()) {
        const std::size_t n = std::min<std::size_t>(data.size() - off, 1U << 30);
        crc = ::crc32(crc, data.data() + off, static_cast<uInt>(n));
        off += n;
    }
    return static_cast<std::uint32_t>(crc);
}

std::uint64_t fnv1a64(std::string_view data)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view data)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

} // namespace stegmesh
