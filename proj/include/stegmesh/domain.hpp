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
#include "stegmesh/fixed.hpp"

#include <bit>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stegmesh {

using Tick = std::uint64_t;

struct NodeId {
    std::uint64_t value = 0;
    friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

struct ClusterId {
    std::uint64_t value = 0;
    friend constexpr auto operator<=>(ClusterId, ClusterId) = default;
};

std::string to_string(NodeId id);

enum class NodeRole : std::uint8_t { ClusterHead, Gateway, Member };

enum class LayerTag : std::uint8_t { Application, Transport, DataLink };

/// Which synthetic embedding a steganographic method uses.
enum class CarrierKind : std::uint8_t { HeaderField, PayloadLowBits };

const char* to_string(NodeRole role);
const char* to_string(LayerTag layer);
const char* to_string(CarrierKind kind);

struct StegMethodId {
    static constexpr std::uint8_t kMax = 63;
    std::uint8_t value = 0;
    friend constexpr auto operator<=>(StegMethodId, StegMethodId) = default;
};

/// Set of method ids 0..63, stored as a bit mask. Iteration is in ascending id
/// order everywhere (trial decoding and tie-breaks depend on it).
class CapabilityProfile {
public:
    constexpr CapabilityProfile() = default;
    constexpr explicit CapabilityProfile(std::uint64_t mask) : mask_(mask) {}
    CapabilityProfile(std::initializer_list<int> ids);

    static CapabilityProfile of(const std::vector<StegMethodId>& ids);

    constexpr std::uint64_t mask() const { return mask_; }
    constexpr bool empty() const { return mask_ == 0; }
    constexpr int size() const { return std::popcount(mask_); }
    constexpr bool contains(StegMethodId m) const { return (mask_ >> m.value) & 1U; }
    void insert(StegMethodId m);

    /// Lowest id in the set; nullopt when empty.
    std::optional<StegMethodId> lowest() const;
    std::vector<StegMethodId> ids() const;
    std::string to_string() const;

    friend constexpr bool operator==(CapabilityProfile, CapabilityProfile) = default;

private:
    std::uint64_t mask_ = 0;
};

CapabilityProfile capability_intersection(CapabilityProfile a, CapabilityProfile b);

struct MethodInfo {
    StegMethodId id;
    LayerTag layer = LayerTag::Application;
    CarrierKind codec = CarrierKind::PayloadLowBits;
    friend bool operator==(const MethodInfo&, const MethodInfo&) = default;
};

/// Scenario-wide table of known steganographic methods.
class MethodRegistry {
public:
    void add(MethodInfo info);
    const MethodInfo* find(StegMethodId id) const;
    bool contains(StegMethodId id) const { return find(id) != nullptr; }
    CapabilityProfile all() const;
    const std::map<StegMethodId, MethodInfo>& methods() const { return methods_; }

    /// Method used to cover anonymous discovery beacons. Every CH can decode
    /// it regardless of its own capability profile.
    StegMethodId discovery_method() const { return discovery_; }
    void set_discovery_method(StegMethodId id) { discovery_ = id; }

    /// Registry with ids 0..count-1 alternating PayloadLowBits / HeaderField,
    /// discovery method 0. Convenient default for tests and generators.
    static MethodRegistry standard(int count);

    friend bool operator==(const MethodRegistry&, const MethodRegistry&) = default;

private:
    std::map<StegMethodId, MethodInfo> methods_;
    StegMethodId discovery_{};
};

/// Default cap: 2^31 micro-units. Costs at or above it mean "unreachable".
inline constexpr Micro kInfinityCost = Micro::from_units(std::int64_t{1} << 31);

struct Metric {
    Micro cost;
    std::uint32_t hop_count = 0;

    static constexpr Metric zero() { return Metric{}; }
    static constexpr Metric unreachable(Micro infinity = kInfinityCost) { return Metric{infinity, 0}; }

    bool reachable(Micro infinity = kInfinityCost) const { return cost < infinity; }
    friend bool operator==(const Metric&, const Metric&) = default;
};

/// Path concatenation. Saturates at `infinity`.
Metric add(const Metric& a, const Metric& b, Micro infinity = kInfinityCost);

struct MetricWeights {
    Micro delay = Micro::whole(1);
    Micro capacity = Micro::whole(1);
    Micro methods = Micro::whole(1);
    friend bool operator==(const MetricWeights&, const MetricWeights&) = default;
};

/// A covert link between two CHs.
struct StegLink {
    NodeId local;
    NodeId peer;
    CapabilityProfile methods;
    std::uint32_t capacity = 1; ///< bits per tick
    Tick delay = 1;
    Tick last_hello = 0;
    friend bool operator==(const StegLink&, const StegLink&) = default;
};

/// cost = w_delay*delay + w_capacity/capacity + w_methods/|methods|, evaluated
/// as one exact rational and rounded half up to micro-units; hop_count = 1.
/// Throws OverflowError when the cost exceeds `infinity`, std::invalid_argument
/// when the link invariants (capacity, delay >= 1, methods non-empty) fail.
Metric link_cost(const StegLink& link, const MetricWeights& weights, Micro infinity = kInfinityCost);

/// Neighbour table entry: the link plus the peer's full advertised profile.
struct Neighbour {
    StegLink link;
    CapabilityProfile profile;
    friend bool operator==(const Neighbour&, const Neighbour&) = default;
};

using NeighbourTable = std::map<NodeId, Neighbour>;

enum class MessageKind : std::uint8_t {
    RandomWalkDiscovery = 1,
    Hello = 2,
    RoutingUpdate = 3,
    CreateStegLink = 4,
    Data = 5,
    KeyDelivery = 6,
    IntraCluster = 7,
};

const char* to_string(MessageKind kind);

/// Why a message was produced. Carried for the trace only; never serialized.
enum class Cause : std::uint8_t {
    None,
    Periodic,    ///< its timer fired
    Walk,        ///< reaction to a newly discovered CH
    Update,      ///< reaction to a changed routing table
    Expiry,      ///< neighbour timed out
    Triggered,   ///< malicious-removal fast path
    Offer,       ///< link offer / acknowledgement
    Relay,       ///< Create_steg_link relay
    Forward,     ///< random walk forwarded
    Data,
};

const char* to_string(Cause cause);

struct ProtocolMessage {
    MessageKind kind = MessageKind::Hello;
    /// Hop-local sender. Known to the receiving radio, never part of the wire form.
    NodeId transport_sender;
    bool covered = false;
    /// Carrier bytes when covered, otherwise the plain record.
    Bytes body;
    Cause cause = Cause::None;

    friend bool operator==(const ProtocolMessage&, const ProtocolMessage&) = default;
};

/// kind (u8) || covered (u8) || body
Bytes wire_bytes(const ProtocolMessage& msg);

} // namespace stegmesh
