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

#include "stegmesh/crypto.hpp"
#include "stegmesh/errors.hpp"

#include <doctest.h>

using namespace stegmesh;
using namespace stegmesh::crypto;

namespace {

ClusterKey counting_key(std::uint32_t id = 1)
{
    ClusterKey k;
    k.key_id = id;
    for (std::size_t i = 0; i < k.bytes.size(); ++i)
        k.bytes[i] = static_cast<std::uint8_t>(i);
    return k;
}

} // namespace

// Expected bytes come from tests/oracles/vectors.py.
TEST_CASE("keystream vector")
{
    Bytes z(16);
    apply_keystream(counting_key().bytes, 0, z);
    CHECK(to_hex(z) == "6ea44b65870360661fff87ffadba9379");
}

TEST_CASE("seal vector")
{
    CHECK(to_hex(seal_intra(to_bytes("hello"), counting_key(), 1)) == "0000000000000001aa9320c04e341ac4bc");
}

TEST_CASE("seal and open round trip")
{
    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
        ClusterKey key = generate_cluster_key(rng, static_cast<std::uint32_t>(i));
        Bytes p(rng.below(100));
        rng.fill(p);
        const Nonce n = rng.next();
        const Bytes ct = seal_intra(p, key, n);
        CHECK(ct.size() == p.size() + kNonceSize + kTagSize);
        CHECK(open_intra(ct, key) == p);
    }
}

TEST_CASE("open rejects wrong key, tampering and truncation")
{
    const ClusterKey key = counting_key();
    ClusterKey other = key;
    other.bytes[0] ^= 0x80;
    Bytes ct = seal_intra(to_bytes("attack at dawn"), key, 42);
    CHECK_THROWS_AS(open_intra(ct, other), IntegrityFailure);
    CHECK_FALSE(try_open_intra(Bytes(11), key));
    for (std::size_t i = 0; i < ct.size(); ++i) {
        Bytes t = ct;
        t[i] ^= 0x01;
        CHECK_FALSE(try_open_intra(t, key));
    }
    ct.pop_back();
    CHECK_FALSE(try_open_intra(ct, key));
}

TEST_CASE("trust values")
{
    CHECK(TrustValue::of("0.75").value().units == 750'000);
    CHECK_THROWS_AS(TrustValue::of("1.000001"), std::invalid_argument);
    CHECK_THROWS_AS(TrustValue::of("x"), std::invalid_argument);
    CHECK(TrustValue::of("1") > TrustValue::of("0.999999"));
}

TEST_CASE("gateway election by threshold")
{
    const std::vector<std::pair<NodeId, TrustValue>> border{
        {NodeId{1}, TrustValue::of("0.9")},
        {NodeId{2}, TrustValue::of("0.5")},
        {NodeId{3}, TrustValue::of("0.499999")},
    };
    const auto g = elect_gateways(border, TrustValue::of("0.5"));
    CHECK(g == std::set<NodeId>{NodeId{1}, NodeId{2}});
    CHECK(elect_gateways(border, TrustValue::of("1")).empty());
    CHECK(elect_gateways({}, TrustValue::of("0")).empty());
}

TEST_CASE("membership and re-keying")
{
    Rng rng(5);
    ClusterState s = ClusterState::create(ClusterId{1}, NodeId{100}, rng);
    CHECK(s.key.key_id == 1);
    const auto d = admit_member(s, NodeId{7});
    CHECK(d.to == NodeId{7});
    CHECK(d.key == s.key);
    CHECK_THROWS_AS(admit_member(s, NodeId{7}), AlreadyMember);
    admit_member(s, NodeId{8});
    admit_member(s, NodeId{9});

    const ClusterKey before = s.key;
    const auto deliveries = evict_member(s, NodeId{8}, rng);
    CHECK(s.key.key_id == 2);
    CHECK(s.key.bytes != before.bytes);
    REQUIRE(deliveries.size() == 2);
    CHECK(deliveries[0].to == NodeId{7});
    CHECK(deliveries[1].to == NodeId{9});
    CHECK_THROWS_AS(evict_member(s, NodeId{8}, rng), NotMember);

    // The evicted member's old key opens nothing sealed afterwards.
    const Bytes ct = seal_intra(to_bytes("post-eviction"), s.key, 1);
    CHECK_FALSE(try_open_intra(ct, before));
}

TEST_CASE("eviction without re-keying keeps the key")
{
    Rng rng(5);
    ClusterState s = ClusterState::create(ClusterId{1}, NodeId{100}, rng, false);
    admit_member(s, NodeId{7});
    const ClusterKey k = s.key;
    CHECK(evict_member(s, NodeId{7}, rng).empty());
    CHECK(s.key == k);
}
