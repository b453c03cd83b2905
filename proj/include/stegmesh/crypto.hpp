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

#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace stegmesh::crypto {

/// Cluster-wide symmetric key. key_id strictly increases on every re-key.
struct ClusterKey {
    std::uint32_t key_id = 0;
    Key256 bytes{};
    friend bool operator==(const ClusterKey&, const ClusterKey&) = default;
};

/// Trust in [0, 1], micro-unit resolution.
class TrustValue {
public:
    constexpr TrustValue() = default;
    /// Throws std::invalid_argument outside [0, 1].
    explicit TrustValue(Micro value);
    static TrustValue of(std::string_view decimal);

    constexpr Micro value() const { return value_; }
    friend constexpr auto operator<=>(TrustValue, TrustValue) = default;

private:
    Micro value_;
};

ClusterKey generate_cluster_key(Rng& rng, std::uint32_t prev_id);

struct KeyDelivery {
    NodeId to;
    ClusterId cluster;
    ClusterKey key;
    friend bool operator==(const KeyDelivery&, const KeyDelivery&) = default;
};

/// Key-management state a CH keeps for its cluster.
struct ClusterState {
    ClusterId cluster;
    NodeId head;
    std::set<NodeId> members;
    ClusterKey key;
    bool rekey_on_eviction = true;

    /// Fresh cluster with its first key (key_id 1).
    static ClusterState create(ClusterId cluster, NodeId head, Rng& rng, bool rekey_on_eviction = true);

    friend bool operator==(const ClusterState&, const ClusterState&) = default;
};

/// Adds `node` and returns the delivery of the current key. Throws AlreadyMember.
KeyDelivery admit_member(ClusterState& state, NodeId node);

/// Removes `node`. When re-keying is on, generates the next key and returns a
/// delivery for every remaining member. Throws NotMember.
std::vector<KeyDelivery> evict_member(ClusterState& state, NodeId node, Rng& rng);

using Nonce = std::uint64_t;

inline constexpr std::size_t kNonceSize = 8;
inline constexpr std::size_t kTagSize = 4;

/// nonce (8, big-endian) || payload XOR keystream(key, nonce) || CRC-32(nonce || payload) (4, big-endian)
Bytes seal_intra(ByteView payload, const ClusterKey& key, Nonce nonce);

/// Throws IntegrityFailure on a wrong key, tampering or truncation.
Bytes open_intra(ByteView ciphertext, const ClusterKey& key);
std::optional<Bytes> try_open_intra(ByteView ciphertext, const ClusterKey& key);

/// Border nodes whose trust reaches `threshold`.
std::set<NodeId> elect_gateways(const std::vector<std::pair<NodeId, TrustValue>>& border_nodes,
                                TrustValue threshold);

} // namespace stegmesh::crypto
