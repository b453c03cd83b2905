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
#include "stegmesh/errors.hpp"

#include <doctest.h>

using namespace stegmesh;
using namespace stegmesh::codec;

namespace {

const MethodRegistry kRegistry = MethodRegistry::standard(4);

Key256 counting_key()
{
    Key256 k{};
    for (std::size_t i = 0; i < k.size(); ++i)
        k[i] = static_cast<std::uint8_t>(i);
    return k;
}

std::string covered_hex(std::string_view payload_hex, int method, CarrierKind kind, const Key256* key = nullptr)
{
    const Bytes payload = *from_hex(payload_hex);
    auto env = cover(payload, StegMethodId{static_cast<std::uint8_t>(method)}, CoverCarrier{Bytes(32), kind},
                     kRegistry, key);
    return to_hex(env.carrier.bytes);
}

} // namespace

// Expected carriers come from tests/oracles/vectors.py.
TEST_CASE("low-bits vectors")
{
    CHECK(covered_hex("deadbeef", 0, CarrierKind::PayloadLowBits) ==
          "0301000303010302030203020301020103000101030103020103010203050303");
    CHECK(covered_hex("deadbeef", 2, CarrierKind::PayloadLowBits) ==
          "0303020101010102010003020301020103020103030101000101030203050303");
    CHECK(covered_hex("", 0, CarrierKind::PayloadLowBits) ==
          "0202000200000200000000000000020002020200020202020200000002020002");
    const Key256 key = counting_key();
    CHECK(covered_hex("deadbeef", 0, CarrierKind::PayloadLowBits, &key) ==
          "0200010202010202030302020300030103010101020102030102000202040303");
}

TEST_CASE("payload bits land in bit 0, most significant first")
{
    const Bytes c = *from_hex(covered_hex("deadbeef", 0, CarrierKind::PayloadLowBits));
    const std::uint32_t payload = 0xDEADBEEF;
    for (int i = 0; i < 32; ++i)
        CHECK((c[static_cast<std::size_t>(i)] & 1U) == ((payload >> (31 - i)) & 1U));
}

TEST_CASE("header-field vectors")
{
    CHECK(covered_hex("deadbeef", 1, CarrierKind::HeaderField) ==
          "00000004a69aa2ebdeadbeef0000000000000000000000000000000000000000");
    const Key256 key = counting_key();
    CHECK(covered_hex("deadbeef", 1, CarrierKind::HeaderField, &key) ==
          "00000004a69aa2ebd23860320000000000000000000000000000000000000000");
}

TEST_CASE("cover errors")
{
    CHECK_THROWS_AS(cover(Bytes(5), StegMethodId{0}, CoverCarrier{Bytes(32), CarrierKind::PayloadLowBits}, kRegistry),
                    CarrierTooSmall);
    CHECK_THROWS_AS(cover(Bytes(17), StegMethodId{1}, CoverCarrier{Bytes(32), CarrierKind::HeaderField}, kRegistry),
                    CarrierTooSmall);
    CHECK_THROWS_AS(cover(Bytes(1), StegMethodId{9}, CoverCarrier{Bytes(32), CarrierKind::HeaderField}, kRegistry),
                    UnknownMethod);
    CHECK_THROWS_AS(cover(Bytes(1), StegMethodId{1}, CoverCarrier{Bytes(32), CarrierKind::PayloadLowBits}, kRegistry),
                    CarrierMismatch);
}

TEST_CASE("empty payload round trip")
{
    for (int m = 0; m < 4; ++m) {
        const StegMethodId id{static_cast<std::uint8_t>(m)};
        const auto kind = kRegistry.find(id)->codec;
        auto env = cover(Bytes{}, id, CoverCarrier{Bytes(32, 0x5A), kind}, kRegistry);
        auto back = uncover(env.carrier.bytes, id, kRegistry);
        REQUIRE(back);
        CHECK(back->empty());
    }
}

TEST_CASE("round trip, length preservation, trial decoding")
{
    Rng rng(2024);
    const Key256 key = counting_key();
    for (int i = 0; i < 3000; ++i) {
        const StegMethodId m{static_cast<std::uint8_t>(rng.below(4))};
        const auto kind = kRegistry.find(m)->codec;
        Bytes payload(rng.below(24));
        rng.fill(payload);
        auto carrier = make_carrier(kind, payload.size() + rng.below(8), rng);
        const auto size = carrier.bytes.size();
        const bool keyed = rng.below(2) == 1;
        auto env = cover(payload, m, carrier, kRegistry, keyed ? &key : nullptr);
        REQUIRE(env.carrier.bytes.size() == size);

        auto found = find_steg_msg(env.carrier.bytes, kRegistry.all(), kRegistry, keyed ? &key : nullptr);
        REQUIRE(found);
        CHECK(found->method == m);
        CHECK(found->payload == payload);

        CapabilityProfile others(kRegistry.all().mask() & ~(std::uint64_t{1} << m.value));
        CHECK_FALSE(find_steg_msg(env.carrier.bytes, others, kRegistry, keyed ? &key : nullptr));
    }
}

TEST_CASE("wrong key fails the checksum")
{
    Key256 a = counting_key();
    Key256 b = a;
    b[31] ^= 1;
    auto env = cover(to_bytes("secret"), StegMethodId{1}, CoverCarrier{Bytes(32), CarrierKind::HeaderField},
                     kRegistry, &a);
    CHECK(uncover(env.carrier.bytes, StegMethodId{1}, kRegistry, &a) == to_bytes("secret"));
    CHECK_FALSE(uncover(env.carrier.bytes, StegMethodId{1}, kRegistry, &b));
}

TEST_CASE("random carriers are rejected")
{
    Rng rng(77);
    int accepted = 0;
    for (int i = 0; i < 20000; ++i) {
        Bytes c(64);
        rng.fill(c);
        if (find_steg_msg(c, kRegistry.all(), kRegistry))
            ++accepted;
    }
    CHECK(accepted == 0);
}

TEST_CASE("make_carrier sizes and determinism")
{
    Rng a(7);
    Rng b(7);
    const auto c1 = make_carrier(CarrierKind::PayloadLowBits, 4, a);
    const auto c2 = make_carrier(CarrierKind::PayloadLowBits, 4, b);
    CHECK(c1.bytes.size() == 32);
    CHECK(c1 == c2);
    CHECK(make_carrier(CarrierKind::HeaderField, 0, a).bytes.size() == 32);
    CHECK(make_carrier(CarrierKind::HeaderField, 20, a).bytes.size() == 36);
    CHECK(make_carrier(CarrierKind::PayloadLowBits, 10, a).bytes.size() == 80);
    CHECK(capacity(CarrierKind::PayloadLowBits, 80) == 10);
    CHECK(capacity(CarrierKind::HeaderField, 31) == 0);
}

TEST_CASE("short carriers decode to nothing")
{
    CHECK_FALSE(uncover(Bytes(31), StegMethodId{0}, kRegistry));
    CHECK_FALSE(uncover(Bytes{}, StegMethodId{1}, kRegistry));
    CHECK_FALSE(uncover(Bytes(32), StegMethodId{40}, kRegistry));
}
