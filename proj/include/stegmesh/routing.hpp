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

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace stegmesh::routing {

/// Hop ceiling: candidates longer than this are treated as unreachable.
inline constexpr std::uint32_t kHopCeiling = 32;

struct RouteEntry {
    NodeId destination;
    NodeId next_hop;
    Metric metric;
    /// Methods common to every link along the advertised path.
    CapabilityProfile methods;
    Tick age = 0; ///< tick of last refresh; local only, never advertised

    bool reachable(Micro infinity = kInfinityCost) const { return metric.reachable(infinity); }
    friend bool operator==(const RouteEntry&, const RouteEntry&) = default;
};

/// Distance-vector table of one CH. Always holds the zero-cost self route.
/// Invalidated entries keep next_hop == self until pruned.
class RoutingTable {
public:
    RoutingTable() = default;
    RoutingTable(NodeId self, CapabilityProfile own_methods, Micro infinity = kInfinityCost);

    NodeId self() const { return self_; }
    Micro infinity() const { return infinity_; }

    const RouteEntry* find(NodeId destination) const;
    const std::map<NodeId, RouteEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    std::size_t reachable_count() const;

    /// Entries in destination order, ages stripped: what goes on the wire.
    std::vector<RouteEntry> advertisement() const;

    /// Sets every route whose next hop is `neighbour` to infinity.
    bool invalidate_via(NodeId neighbour);
    /// Sets the route to `destination` to infinity, whatever its next hop.
    bool invalidate(NodeId destination);
    /// Drops unreachable entries. Returns the number removed.
    std::size_t prune_unreachable();
    /// Invalidates entries (other than self) not refreshed within `max_age`.
    bool collect_stale(Tick now, Tick max_age);
    /// Refreshes the age of every route via `neighbour` that it still advertises.
    void refresh(NodeId neighbour, std::span<const RouteEntry> advertised, Tick now);

    friend bool operator==(const RoutingTable&, const RoutingTable&) = default;

private:
    friend bool merge_routing_update(RoutingTable&, NodeId, const StegLink&, std::span<const RouteEntry>,
                                     const MetricWeights&, Tick, std::uint32_t);
    friend bool adopt_direct_route(RoutingTable&, const StegLink&, CapabilityProfile, const MetricWeights&, Tick);
    void set_unreachable(RouteEntry& e);

    NodeId self_;
    Micro infinity_ = kInfinityCost;
    std::map<NodeId, RouteEntry> entries_;
};

/// Bellman-Ford relaxation of one neighbour's full advertisement.
///
/// For each advertised (dest, cost, methods): candidate = cost + link_cost and
/// methods & link.methods. The candidate is adopted when no entry exists, when
/// it is strictly cheaper, or when the entry already goes through `neighbour`
/// (its word is final, including cost increases). Destinations that `neighbour`
/// no longer advertises are invalidated if routed through it. Self is skipped.
/// Returns true iff an entry was added, modified or invalidated.
bool merge_routing_update(RoutingTable& table, NodeId neighbour, const StegLink& neighbour_link,
                          std::span<const RouteEntry> advertised, const MetricWeights& weights, Tick now = 0,
                          std::uint32_t hop_ceiling = kHopCeiling);

/// Relaxes the one-hop route over a freshly created link without touching
/// other routes through the peer. Returns true iff the table changed.
bool adopt_direct_route(RoutingTable& table, const StegLink& link, CapabilityProfile peer_profile,
                        const MetricWeights& weights, Tick now = 0);

/// Most recent advertisement received from each neighbour.
using AdvertisementCache = std::map<NodeId, std::vector<RouteEntry>>;

/// A candidate steg-path as seen from this CH: the first-hop link(s) we own
/// plus the remainder advertised by the next hop.
struct Path {
    std::vector<NodeId> hops; ///< hops.front() is the next hop
    std::vector<StegLink> links;
    Metric tail;              ///< advertised cost beyond the last link
    Metric metric;            ///< filled by calc_metrics_for_paths

    NodeId first_hop() const { return hops.front(); }
};

/// Candidate first-hop paths to `destination`: the current next hop plus every
/// neighbour whose advertised cost is strictly below our own (feasible, hence
/// loop-free). Self yields one zero-cost path; unknown destinations none.
std::vector<Path> find_paths_match(const RoutingTable& table, const NeighbourTable& neighbours,
                                   const AdvertisementCache& adverts, NodeId destination);

/// metric = sum of link_cost over links + tail.
void calc_metrics_for_paths(std::span<Path> paths, const MetricWeights& weights,
                            Micro infinity = kInfinityCost);

/// Minimum cost; ties by fewer hops, then lower first-hop id. Throws EmptyPathList.
const Path& choose_best_path(std::span<const Path> paths);

struct SendOutcome {
    enum class Kind { Sent, NoPathFound };
    Kind kind = Kind::NoPathFound;
    std::optional<Path> path;
    std::optional<StegMethodId> method;
    std::size_t candidates = 0;
    bool metrics_evaluated = false;

    bool sent() const { return kind == Kind::Sent; }
};

/// Path selection for outgoing data: several candidates are scored and the
/// best taken, a single candidate is used as-is, none means no path.
SendOutcome send_data(const RoutingTable& table, const NeighbourTable& neighbours,
                      const AdvertisementCache& adverts, NodeId destination, const MetricWeights& weights);

} // namespace stegmesh::routing
