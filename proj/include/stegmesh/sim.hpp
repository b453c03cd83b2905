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

#include "stegmesh/crypto.hpp"
#include "stegmesh/domain.hpp"
#include "stegmesh/engine.hpp"
#include "stegmesh/scenario.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace stegmesh::sim {

using scenario::FaultSpec;

/// One trace line: `tick seq kind src dst detail`. Detail pairs are sorted by
/// key and space separated; "-" stands for an absent field.
struct TraceRecord {
    Tick tick = 0;
    std::uint64_t seq = 0;
    std::string kind;
    std::optional<NodeId> src;
    std::optional<NodeId> dst;
    std::vector<std::pair<std::string, std::string>> detail;

    std::string to_line() const;
    /// Inverse of to_line. nullopt on malformed lines.
    static std::optional<TraceRecord> parse(std::string_view line);
    /// Value for `key`, or nullptr.
    const std::string* get(std::string_view key) const;
};

struct MetricsRow {
    Tick tick = 0;
    std::uint64_t ch_count = 0;
    std::uint64_t steglink_count = 0;
    std::uint64_t routing_entries = 0;
    std::uint64_t updates_sent = 0;
    std::uint64_t hellos_sent = 0;
    std::uint64_t walks_forwarded = 0;
    std::uint64_t data_delivered = 0;
};

std::string metrics_csv(const std::vector<MetricsRow>& rows);

struct AdversaryRecord {
    enum class Outcome : std::uint8_t { Failed, Authorized, Unauthorized };
    Tick tick = 0;
    NodeId eavesdropper;
    std::uint64_t mid = 0;
    ClusterId cluster;
    std::uint32_t key_id = 0;
    /// Highest key id of this cluster the eavesdropper held when overhearing.
    std::uint32_t held_key_id = 0;
    std::uint32_t attempts = 0;
    Outcome outcome = Outcome::Failed;
};

const char* to_string(AdversaryRecord::Outcome outcome);

struct AdversarySummary {
    std::uint64_t overheard = 0;
    std::uint64_t attempts = 0;
    std::uint64_t recovered_authorized = 0;
    std::uint64_t recovered_unauthorized = 0;
    /// Recoveries of traffic sealed under a key the eavesdropper never held.
    std::uint64_t recovered_without_key = 0;
};

struct RunReport {
    std::uint64_t seed = 0;
    std::string scenario_name;
    std::string scenario_digest;
    Tick limit = 0;
    Tick final_tick = 0;
    std::uint64_t events_executed = 0;
    std::optional<Tick> quiescence_tick;
    std::map<NodeId, std::vector<routing::RouteEntry>> tables;
    std::map<std::string, std::uint64_t> sent_by_kind;
    std::uint64_t messages_sent = 0;
    std::uint64_t messages_delivered = 0;
    std::uint64_t messages_dropped = 0;
    std::uint64_t messages_pending = 0;
    std::uint64_t data_injected = 0;
    std::uint64_t data_delivered = 0;
    std::uint64_t intra_sent = 0;
    std::uint64_t intra_opened = 0;
    AdversarySummary adversary;

    /// "delivered/injected" as a six-decimal fraction; "-" when nothing was sent.
    std::string delivery_ratio() const;
    /// Canonical JSON, sorted keys, two-space indent, trailing newline.
    std::string to_text() const;
};

/// Steg-link graph as seen by the CHs: each CH's own view of its links.
struct StegGraph {
    std::vector<NodeId> nodes;
    std::map<NodeId, std::vector<StegLink>> links;
    MetricWeights weights;
    Micro infinity = kInfinityCost;
};

/// All-pairs least cost over link_cost, by Dijkstra per source. Unreachable
/// pairs map to Metric::unreachable(infinity).
std::map<std::pair<NodeId, NodeId>, Metric> oracle_shortest_paths(const StegGraph& graph);

struct RunOptions {
    Tick limit = 0;
    bool stop_at_quiescence = true;
};

/// Summary of the event executed by World::step.
struct Executed {
    Tick tick = 0;
    std::uint64_t seq = 0;
    std::string kind;
};

class World final : public engine::Underlay {
public:
    /// Throws ValidationError.
    World(const scenario::ScenarioSpec& spec, std::uint64_t seed);

    /// Pops and executes the next event. Throws EmptyQueue.
    Executed step();
    bool idle() const { return queue_.empty(); }
    std::optional<Tick> next_tick() const;

    /// Schedules a fault. Throws UnknownTarget, std::invalid_argument for a
    /// tick in the past.
    void inject_fault(const FaultSpec& fault, Tick at);

    RunReport run_until(const RunOptions& options);

    Tick clock() const { return clock_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t events_executed() const { return executed_; }
    std::optional<Tick> quiescence_tick() const { return quiescent_at_; }
    const std::vector<TraceRecord>& trace() const { return trace_; }
    std::string trace_text() const;
    const std::vector<MetricsRow>& metrics() const { return metrics_; }
    const std::vector<AdversaryRecord>& adversary_log() const { return adversary_; }
    AdversarySummary adversary_summary() const;
    const scenario::ScenarioSpec& spec() const { return spec_; }

    /// Cluster heads currently running (admitted and not silenced), ascending.
    std::vector<NodeId> active_chs() const;
    const engine::ChState* ch(NodeId id) const;
    const crypto::ClusterState* cluster(ClusterId id) const;
    bool is_gateway(NodeId id) const;
    StegGraph steg_link_graph() const;
    RunReport report(Tick limit) const;

    /// Observer for every message handed to the network, before routing.
    using WireTap = std::function<void(NodeId from, NodeId to, const ProtocolMessage&)>;
    void set_wire_tap(WireTap tap) { tap_ = std::move(tap); }

    // engine::Underlay
    std::vector<NodeId> relays(NodeId node) const override;
    std::optional<engine::LinkQuality> provision(NodeId a, NodeId b) override;

private:
    struct Deliver {
        NodeId from;
        NodeId to;
        engine::Via via;
        ProtocolMessage message;
        std::vector<NodeId> route;
        std::uint64_t mid;
    };
    struct TimerFire {
        NodeId node;
        engine::TimerKind kind;
    };
    struct FaultEvent {
        FaultSpec fault;
    };
    struct Admit {
        NodeId node;
    };
    struct Evict {
        NodeId node;
    };
    struct Evidence {
        NodeId node;
        NodeId removed;
        Tick observed_at;
    };
    struct SendData {
        NodeId from;
        NodeId to;
        std::uint32_t bytes;
    };
    struct IntraSend {
        ClusterId cluster;
        std::uint32_t bytes;
    };
    struct QuiesceCheck {};
    using Body = std::variant<Deliver, TimerFire, FaultEvent, Admit, Evict, Evidence, SendData, IntraSend, QuiesceCheck>;

    struct Event {
        Tick tick;
        std::uint64_t seq;
        Body body;
        bool scripted;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const
        {
            return a.tick != b.tick ? a.tick > b.tick : a.seq > b.seq;
        }
    };

    struct Edge {
        Tick delay = 1;
        std::uint32_t capacity = 1;
        bool cut = false;
    };

    struct Node {
        scenario::NodeSpec spec;
        bool active = true;
        bool silenced = false;
        bool gateway = false;
        bool eavesdropper = false;
        std::uint32_t guesses = 0;
        Rng rng;
        std::optional<engine::ChState> ch;
        std::map<std::pair<ClusterId, std::uint32_t>, crypto::ClusterKey> keyring;
        crypto::Nonce nonce = 0;
        std::size_t round_robin = 0;
    };

    void schedule(Tick tick, Body body, bool scripted);
    void record(std::string kind, std::optional<NodeId> src, std::optional<NodeId> dst,
                std::vector<std::pair<std::string, std::string>> detail);
    bool usable(NodeId id) const;
    bool route_ok(const std::vector<NodeId>& route) const;
    std::optional<std::vector<NodeId>> shortest_route(NodeId a, NodeId b) const;
    std::optional<std::vector<NodeId>> frozen_route(NodeId from, NodeId to) const;
    Tick route_delay(const std::vector<NodeId>& route) const;

    void start_ch(Node& node);
    void admit_to_cluster(NodeId member);
    void deliver_key(const crypto::KeyDelivery& delivery, NodeId from);
    void send(NodeId from, engine::Outbound out);
    void apply(NodeId from, engine::Actions actions);
    void overhear(const Deliver& d, const std::vector<NodeId>& route);
    engine::Actions with_engine(Node& node, const std::function<engine::Actions(engine::ChState&, engine::Context&)>& fn);

    void on_deliver(Deliver& d);
    void on_fault(const FaultSpec& f);
    void on_quiesce_check();
    void sample_metrics();

    scenario::ScenarioSpec spec_;
    std::uint64_t seed_;
    std::map<NodeId, Node> nodes_;
    std::map<NodeId, std::map<NodeId, Edge>> adj_;
    std::map<std::pair<NodeId, NodeId>, std::vector<NodeId>> frozen_;
    std::map<ClusterId, crypto::ClusterState> clusters_;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    Rng adversary_rng_;

    Tick clock_ = 0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t next_mid_ = 0;
    std::uint64_t trace_seq_ = 0;
    std::uint64_t executed_ = 0;
    std::uint64_t scripted_pending_ = 0;
    Tick last_change_ = 0;
    std::optional<Tick> quiescent_at_;

    std::vector<TraceRecord> trace_;
    std::vector<MetricsRow> metrics_;
    std::vector<AdversaryRecord> adversary_;
    std::map<std::string, std::uint64_t> sent_by_kind_;
    std::uint64_t sent_ = 0;
    std::uint64_t delivered_ = 0;
    std::uint64_t dropped_ = 0;
    std::uint64_t updates_sent_ = 0;
    std::uint64_t hellos_sent_ = 0;
    std::uint64_t walks_forwarded_ = 0;
    std::uint64_t data_injected_ = 0;
    std::uint64_t data_delivered_ = 0;
    std::uint64_t intra_sent_ = 0;
    std::uint64_t intra_opened_ = 0;
    WireTap tap_;
};

} // namespace stegmesh::sim
