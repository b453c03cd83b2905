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

#include "stegmesh/routing.hpp"

#include "stegmesh/errors.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace stegmesh::routing {

RoutingTable::RoutingTable(NodeId self, CapabilityProfile own_methods, Micro infinity)
    : self_(self), infinity_(infinity)
{
    entries_[self] = RouteEntry{self, self, Metric::zero(), own_methods, 0};
}

const RouteEntry* RoutingTable::find(NodeId destination) const
{
    auto it = entries_.find(destination);
    return it == entries_.end() ? nullptr : &it->second;
}

std::size_t RoutingTable::reachable_count() const
{
    return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(), [&](const auto& kv) {
        return kv.second.reachable(infinity_);
    }));
}

std::vector<RouteEntry> RoutingTable::advertisement() const
{
    std::vector<RouteEntry> out;
    out.reserve(entries_.size());
    for (const auto& [dest, e] : entries_) {
        RouteEntry copy = e;
        copy.age = 0;
        out.push_back(copy);
    }
    return out;
}

void RoutingTable::set_unreachable(RouteEntry& e)
{
    e.metric = Metric::unreachable(infinity_);
    e.next_hop = self_;
    e.methods = CapabilityProfile{};
}

bool RoutingTable::invalidate_via(NodeId neighbour)
{
    bool changed = false;
    for (auto& [dest, e] : entries_) {
        if (dest != self_ && e.next_hop == neighbour && e.reachable(infinity_)) {
            set_unreachable(e);
            changed = true;
        }
    }
    return changed;
}

bool RoutingTable::invalidate(NodeId destination)
{
    auto it = entries_.find(destination);
    if (destination == self_ || it == entries_.end() || !it->second.reachable(infinity_))
        return false;
    set_unreachable(it->second);
    return true;
}

std::size_t RoutingTable::prune_unreachable()
{
    return std::erase_if(entries_, [&](const auto& kv) { return !kv.second.reachable(infinity_); });
}

bool RoutingTable::collect_stale(Tick now, Tick max_age)
{
    bool changed = false;
    for (auto& [dest, e] : entries_) {
        if (dest == self_ || !e.reachable(infinity_))
            continue;
        if (now > e.age && now - e.age > max_age) {
            set_unreachable(e);
            changed = true;
        }
    }
    return changed;
}

void RoutingTable::refresh(NodeId neighbour, std::span<const RouteEntry> advertised, Tick now)
{
    for (const auto& adv : advertised) {
        auto it = entries_.find(adv.destination);
        if (it != entries_.end() && it->second.next_hop == neighbour && it->second.reachable(infinity_))
            it->second.age = now;
    }
}

bool merge_routing_update(RoutingTable& table, NodeId neighbour, const StegLink& neighbour_link,
                          std::span<const RouteEntry> advertised, const MetricWeights& weights, Tick now,
                          std::uint32_t hop_ceiling)
{
    const Micro inf = table.infinity_;
    std::optional<Metric> hop;
    try {
        hop = link_cost(neighbour_link, weights, inf);
    } catch (const OverflowError&) {
        hop = Metric::unreachable(inf);
    }

    bool changed = false;
    std::set<NodeId> seen;
    for (const auto& adv : advertised) {
        if (adv.destination == table.self_)
            continue;
        seen.insert(adv.destination);

        Metric candidate = add(adv.metric, *hop, inf);
        if (candidate.hop_count > hop_ceiling)
            candidate = Metric::unreachable(inf);
        const bool usable = candidate.reachable(inf);
        const CapabilityProfile methods =
            usable ? capability_intersection(adv.methods, neighbour_link.methods) : CapabilityProfile{};

        auto it = table.entries_.find(adv.destination);
        if (it == table.entries_.end()) {
            if (usable) {
                table.entries_[adv.destination] = RouteEntry{adv.destination, neighbour, candidate, methods, now};
                changed = true;
            }
            continue;
        }

        RouteEntry& current = it->second;
        if (current.next_hop == neighbour && current.reachable(inf)) {
            if (!usable) {
                table.set_unreachable(current);
                changed = true;
            } else {
                if (current.metric != candidate || current.methods != methods)
                    changed = true;
                current.metric = candidate;
                current.methods = methods;
                current.age = now;
            }
        } else if (usable && candidate.cost < current.metric.cost) {
            current = RouteEntry{adv.destination, neighbour, candidate, methods, now};
            changed = true;
        }
    }

    // A full table was sent: anything routed through the neighbour that it
    // stopped advertising is gone.
    for (auto& [dest, e] : table.entries_) {
        if (dest != table.self_ && e.next_hop == neighbour && e.reachable(inf) && !seen.contains(dest)) {
            table.set_unreachable(e);
            changed = true;
        }
    }
    return changed;
}

bool adopt_direct_route(RoutingTable& table, const StegLink& link, CapabilityProfile peer_profile,
                        const MetricWeights& weights, Tick now)
{
    const Micro inf = table.infinity_;
    Metric candidate;
    try {
        candidate = link_cost(link, weights, inf);
    } catch (const OverflowError&) {
        return false;
    }
    if (!candidate.reachable(inf))
        return false;
    const CapabilityProfile methods = capability_intersection(peer_profile, link.methods);
    const RouteEntry fresh{link.peer, link.peer, candidate, methods, now};
    auto it = table.entries_.find(link.peer);
    if (it == table.entries_.end()) {
        table.entries_[link.peer] = fresh;
        return true;
    }
    RouteEntry& current = it->second;
    const bool via_peer = current.next_hop == link.peer && current.reachable(inf);
    if (via_peer || candidate.cost < current.metric.cost) {
        const bool changed = current.metric != fresh.metric || current.methods != fresh.methods ||
                             current.next_hop != fresh.next_hop;
        current = fresh;
        return changed;
    }
    return false;
}

namespace {

const RouteEntry* find_advertised(const AdvertisementCache& adverts, NodeId neighbour, NodeId destination)
{
    auto it = adverts.find(neighbour);
    if (it == adverts.end())
        return nullptr;
    auto pos = std::lower_bound(it->second.begin(), it->second.end(), destination,
                                [](const RouteEntry& e, NodeId d) { return e.destination < d; });
    if (pos == it->second.end() || pos->destination != destination)
        return nullptr;
    return &*pos;
}

} // namespace

std::vector<Path> find_paths_match(const RoutingTable& table, const NeighbourTable& neighbours,
                                   const AdvertisementCache& adverts, NodeId destination)
{
    const NodeId self = table.self();
    if (destination == self)
        return {Path{{self}, {}, Metric::zero(), Metric::zero()}};

    const RouteEntry* entry = table.find(destination);
    if (!entry || !entry->reachable(table.infinity()))
        return {};

    std::vector<Path> out;
    for (const auto& [id, nb] : neighbours) {
        Metric tail;
        if (id == destination) {
            tail = Metric::zero();
        } else {
            const RouteEntry* adv = find_advertised(adverts, id, destination);
            if (!adv || !adv->reachable(table.infinity()))
                continue;
            tail = adv->metric;
        }
        const bool current_next_hop = entry->next_hop == id;
        const bool feasible = tail.cost < entry->metric.cost;
        if (!current_next_hop && !feasible)
            continue;
        if (tail.hop_count + 1 > kHopCeiling)
            continue;
        Path p;
        p.hops = id == destination ? std::vector<NodeId>{id} : std::vector<NodeId>{id, destination};
        p.links = {nb.link};
        p.tail = tail;
        out.push_back(std::move(p));
    }
    return out;
}

void calc_metrics_for_paths(std::span<Path> paths, const MetricWeights& weights, Micro infinity)
{
    for (auto& p : paths) {
        Metric m = Metric::zero();
        for (const auto& link : p.links) {
            try {
                m = add(m, link_cost(link, weights, infinity), infinity);
            } catch (const OverflowError&) {
                m = Metric::unreachable(infinity);
            }
        }
        p.metric = add(m, p.tail, infinity);
    }
}

const Path& choose_best_path(std::span<const Path> paths)
{
    if (paths.empty())
        throw EmptyPathList("no candidate paths to choose from");
    auto key = [](const Path& p) { return std::tuple(p.metric.cost, p.metric.hop_count, p.first_hop()); };
    const Path* best = &paths.front();
    for (const auto& p : paths.subspan(1))
        if (key(p) < key(*best))
            best = &p;
    return *best;
}

SendOutcome send_data(const RoutingTable& table, const NeighbourTable& neighbours,
                      const AdvertisementCache& adverts, NodeId destination, const MetricWeights& weights)
{
    SendOutcome out;
    auto paths = find_paths_match(table, neighbours, adverts, destination);
    out.candidates = paths.size();
    if (paths.empty())
        return out;

    if (paths.size() > 1) {
        calc_metrics_for_paths(paths, weights, table.infinity());
        out.path = choose_best_path(paths);
        out.metrics_evaluated = true;
    } else {
        out.path = std::move(paths.front());
    }
    out.kind = SendOutcome::Kind::Sent;

    if (!out.path->links.empty()) {
        const CapabilityProfile link_methods = out.path->links.front().methods;
        CapabilityProfile preferred = link_methods;
        if (const RouteEntry* e = table.find(destination)) {
            const auto common = capability_intersection(e->methods, link_methods);
            if (!common.empty())
                preferred = common;
        }
        out.method = preferred.lowest();
    }
    return out;
}

} // namespace stegmesh::routing
