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
#include "stegmesh/crypto.hpp"
#include "stegmesh/domain.hpp"
#include "stegmesh/routing.hpp"

#include <optional>
#include <vector>

// Payload records carried inside protocol messages. All integers big-endian.
// decode() returns nullopt for truncated or trailing-garbage input.
namespace stegmesh::records {

/// Discovery beacon: address (u64) || profile mask (u64).
struct Beacon {
    NodeId address;
    CapabilityProfile profile;

    Bytes encode() const;
    static std::optional<Beacon> decode(ByteView in);
    friend bool operator==(const Beacon&, const Beacon&) = default;
};

/// sender (u64) || flags (u8) || digest (u32) || profile (u64)
struct Hello {
    static constexpr std::uint8_t kOffer = 1;
    static constexpr std::uint8_t kAck = 2;

    NodeId sender;
    std::uint8_t flags = 0;
    /// CRC-32 over the sender's neighbour ids. Carried, not interpreted.
    std::uint32_t digest = 0;
    CapabilityProfile profile;

    bool offer() const { return flags & kOffer; }
    bool ack() const { return flags & kAck; }

    Bytes encode() const;
    static std::optional<Hello> decode(ByteView in);
    friend bool operator==(const Hello&, const Hello&) = default;
};

/// sender (u64) || count (u16) || count x [dest u64, cost u32, hops u8, methods u64]
struct RoutingUpdate {
    NodeId sender;
    std::vector<routing::RouteEntry> entries;

    Bytes encode() const;
    static std::optional<RoutingUpdate> decode(ByteView in);
};

/// sender u64 || new_ch u64 || new_profile u64 || depth u8 || n u8 || n x visited u64
struct CreateStegLink {
    NodeId sender;
    NodeId new_ch;
    CapabilityProfile new_profile;
    std::uint8_t depth = 1;
    std::vector<NodeId> visited;

    Bytes encode() const;
    static std::optional<CreateStegLink> decode(ByteView in);
    friend bool operator==(const CreateStegLink&, const CreateStegLink&) = default;
};

/// sender u64 || origin u64 || destination u64 || ttl u8 || len u32 || payload
struct Data {
    NodeId sender;
    NodeId origin;
    NodeId destination;
    std::uint8_t ttl = routing::kHopCeiling;
    Bytes payload;

    Bytes encode() const;
    static std::optional<Data> decode(ByteView in);
    friend bool operator==(const Data&, const Data&) = default;
};

/// cluster u64 || key_id u32 || key (32)
struct KeyDelivery {
    ClusterId cluster;
    crypto::ClusterKey key;

    Bytes encode() const;
    static std::optional<KeyDelivery> decode(ByteView in);
};

/// cluster u64 || key_id u32 || sealed ciphertext
struct IntraCluster {
    ClusterId cluster;
    std::uint32_t key_id = 0;
    Bytes ciphertext;

    Bytes encode() const;
    static std::optional<IntraCluster> decode(ByteView in);
};

} // namespace stegmesh::records
