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

#include "stegmesh/domain.hpp"
#include "stegmesh/records.hpp"
#include "stegmesh/rng.hpp"
#include "stegmesh/routing.hpp"

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

// Per-CH protocol state machine. Every operation is a synchronous transition
// (state, event) -> (state, outbound messages); all I/O goes through the
// simulator.
namespace stegmesh::engine {

enum class TimerKind : std::uint8_t { RandomWalk = 0, RoutingUpdate = 1, Hello = 2, ExpiryScan = 3 };
inline constexpr std::array kAllTimers = {TimerKind::RandomWalk, TimerKind::RoutingUpdate, TimerKind::Hello,
                                          TimerKind::ExpiryScan};
const char* to_string(TimerKind kind);

struct EngineConfig {
    Tick random_walk_period = 40;
    Tick routing_update_period = 20;
    Tick hello_period = 10;
    Tick fluctuation_rw = 4;
    Tick fluctuation_ru = 4;
    Tick fluctuation_h = 2;
    Tick hello_timeout = 30;
    /// Walk forwarding probability pf in [0, 1].
    Micro forward_probability = Micro::from_units(500'000);
    MetricWeights weights;
    Micro infinity_cost = kInfinityCost;
    std::uint32_t relay_depth = 4;
    std::uint32_t hop_ceiling = routing::kHopCeiling;

    /// Routes not refreshed for this long are invalidated.
    Tick stale_after() const { return 3 * routing_update_period; }
    /// Throws InvalidConfig.
    void validate() const;

    friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

/// How the simulator should carry an outbound message.
enum class Via : std::uint8_t {
    UnderlayHop, ///< one radio hop to an underlay neighbour (random walks)
    StegLink,    ///< over an established steg-link's frozen underlay route
    Direct,      ///< current shortest underlay route (link setup)
};

struct LinkQuality {
    Tick delay = 1;
    std::uint32_t capacity = 1;
};

/// The engine's view of the physical network.
class Underlay {
public:
    virtual ~Underlay() = default;
    /// Underlay neighbours of `node` that pass random walks, ascending.
    virtual std::vector<NodeId> relays(NodeId node) const = 0;
    /// Fixes the underlay route between two CHs for a new steg-link and returns
    /// its delay and bottleneck capacity; nullopt when unreachable.
    virtual std::optional<LinkQuality> provision(NodeId a, NodeId b) = 0;
};

struct Outbound {
    NodeId to;
    Via via = Via::StegLink;
    ProtocolMessage message;
    friend bool operator==(const Outbound&, const Outbound&) = default;
};

/// Trace annotation emitted alongside a transition.
struct Note {
    std::string kind;
    std::optional<NodeId> peer;
    std::string detail;
    friend bool operator==(const Note&, const Note&) = default;
};

struct Actions {
    std::vector<Outbound> out;
    std::vector<Note> notes;

    void merge(Actions&& other);
    std::size_t count(MessageKind kind) const;
};

struct Context {
    Tick now = 0;
    Rng& rng;
    Underlay& underlay;
    const MethodRegistry& registry;
};

struct ChState {
    NodeId self_id;
    CapabilityProfile profile;
    EngineConfig config;
    NeighbourTable neighbours;
    routing::RoutingTable routes;
    routing::AdvertisementCache adverts;
    /// CHs heard through a walk whose methods do not intersect ours.
    std::map<NodeId, CapabilityProfile> incompatible;
    /// CHs we offered a link to after a relay request, awaiting ack.
    std::set<NodeId> pending_offers;
    std::array<Tick, 4> due{};
    /// Bumped whenever the routing table or neighbour set changes.
    std::uint64_t table_version = 0;

    Tick due_at(TimerKind kind) const { return due[static_cast<std::size_t>(kind)]; }

    friend bool operator==(const ChState&, const ChState&) = default;
};

/// Empty neighbour table, self route only, every timer armed at now + period.
/// Throws EmptyProfile, InvalidConfig.
ChState init_ch(NodeId self_id, CapabilityProfile profile, EngineConfig config, Tick now);

/// Fires a due timer and re-arms it at now + period + uniform[0, fluctuation].
/// Throws TimerNotDue.
Actions on_timer(ChState& state, TimerKind kind, Context& ctx);

/// Receive path for an anonymous discovery walk.
Actions handle_random_walk(ChState& state, const ProtocolMessage& walk, Context& ctx);

/// Entry point for every covered CH-to-CH message other than walks: trial
/// decodes against our profile and dispatches on the message kind.
Actions handle_message(ChState& state, const ProtocolMessage& msg, Context& ctx);

/// Refreshes liveness; also completes offer/ack link setup.
Actions handle_hello(ChState& state, const records::Hello& hello, Context& ctx);

Actions handle_routing_update(ChState& state, NodeId sender, const std::vector<routing::RouteEntry>& advertised,
                              Context& ctx);

/// Removes neighbours silent for longer than hello_timeout; one fanout when
/// anything was removed. Also invalidates stale routes.
Actions expire_neighbours(ChState& state, Context& ctx);

/// Malicious-removal fast path: the only out-of-schedule update.
Actions detect_malicious_removal(ChState& state, NodeId removed, Tick observed_at, Context& ctx);

Actions relay_create_steg_link(ChState& state, const records::CreateStegLink& request, Context& ctx);

Actions originate_data(ChState& state, NodeId destination, Bytes payload, Context& ctx);
Actions handle_data(ChState& state, records::Data data, Context& ctx);

/// Coin flip with probability pf; on heads, the unmodified walk goes to a
/// uniformly chosen relay neighbour. Shared by CHs and gateways.
std::optional<Outbound> forward_random_walk(NodeId self, const ProtocolMessage& walk, Micro pf, Rng& rng,
                                            const Underlay& underlay);

} // namespace stegmesh::engine
