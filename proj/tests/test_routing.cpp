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

#include "stegmesh/errors.hpp"
#include "stegmesh/rng.hpp"
#include "stegmesh/routing.hpp"

#include <doctest.h>

#include <map>
#include <set>

using namespace stegmesh;
using namespace stegmesh::routing;

namespace {

struct Net {
    std::map<NodeId, RoutingTable> tables;
    std::map<NodeId, NeighbourTable> neighbours;
    std::map<NodeId, AdvertisementCache> adverts;
    MetricWeights weights;

    void add_node(std::uint64_t id, CapabilityProfile p)
    {
        tables[NodeId{id}] = RoutingTable(NodeId{id}, p);
        neighbours[NodeId{id}];
    }

    void add_link(std::uint64_t a, std::uint64_t b, Tick delay, std::uint32_t cap, CapabilityProfile m)
    {
        const NodeId x{a};
        const NodeId y{b};
        neighbours[x][y] = Neighbour{StegLink{x, y, m, cap, delay, 0}, tables[y].find(y)->methods};
        neighbours[y][x] = Neighbour{StegLink{y, x, m, cap, delay, 0}, tables[x].find(x)->methods};
    }

    // Synchronous rounds of full-table exchange until nothing changes.
    int converge(int max_rounds = 200)
    {
        for (int round = 0; round < max_rounds; ++round) {
            std::map<NodeId, std::vector<RouteEntry>> snap;
            for (const auto& [id, t] : tables)
                snap[id] = t.advertisement();
            bool changed = false;
            for (auto& [id, t] : tables) {
                for (const auto& [nb, n] : neighbours[id]) {
                    adverts[id][nb] = snap[nb];
                    changed |= merge_routing_update(t, nb, n.link, snap[nb], weights);
                }
            }
            if (!changed)
                return round;
        }
        return -1;
    }
};

// Independent all-pairs oracle: Floyd-Warshall on exact micro-unit link costs.
std::map<std::pair<NodeId, NodeId>, std::int64_t> floyd(const Net& net)
{
    const std::int64_t inf = kInfinityCost.units;
    std::vector<NodeId> ids;
    for (const auto& [id, t] : net.tables)
        ids.push_back(id);
    std::map<std::pair<NodeId, NodeId>, std::int64_t> d;
    for (auto a : ids)
        for (auto b : ids)
            d[{a, b}] = a == b ? 0 : inf;
    for (const auto& [a, nbs] : net.neighbours)
        for (const auto& [b, n] : nbs) {
            const std::int64_t w = link_cost(n.link, net.weights).cost.units;
            d[{a, b}] = std::min(d[{a, b}], w);
        }
    for (auto k : ids)
        for (auto i : ids)
            for (auto j : ids)
                if (d[{i, k}] < inf && d[{k, j}] < inf)
                    d[{i, j}] = std::min(d[{i, j}], d[{i, k}] + d[{k, j}]);
    return d;
}

} // namespace

TEST_CASE("diamond converges to hand-computed costs")
{
    // 1 -- 2 -- 4 is cheap, 1 -- 3 -- 4 is slow.
    Net net;
    for (int i = 1; i <= 4; ++i)
        net.add_node(static_cast<std::uint64_t>(i), CapabilityProfile{0, 1});
    net.add_link(1, 2, 1, 2, {0, 1}); // 1 + 0.5 + 0.5 = 2
    net.add_link(2, 4, 1, 4, {0, 1}); // 1 + 0.25 + 0.5 = 1.75
    net.add_link(1, 3, 3, 1, {0});    // 3 + 1 + 1 = 5
    net.add_link(3, 4, 1, 1, {0});    // 3
    CHECK(net.converge() >= 0);

    const auto& t1 = net.tables[NodeId{1}];
    CHECK(t1.find(NodeId{4})->metric.cost.to_string() == "3.750000");
    CHECK(t1.find(NodeId{4})->metric.hop_count == 2);
    CHECK(t1.find(NodeId{4})->next_hop == NodeId{2});
    CHECK(t1.find(NodeId{4})->methods == CapabilityProfile{0, 1});
    CHECK(t1.find(NodeId{3})->metric.cost.to_string() == "5.000000");
    CHECK(net.tables[NodeId{3}].find(NodeId{2})->metric.cost.to_string() == "4.750000");
    CHECK(net.tables[NodeId{3}].find(NodeId{2})->methods == CapabilityProfile{0});
}

TEST_CASE("random graphs converge to the all-pairs oracle")
{
    Rng rng(31337);
    for (int trial = 0; trial < 60; ++trial) {
        Net net;
        const int n = 3 + static_cast<int>(rng.below(8));
        for (int i = 1; i <= n; ++i)
            net.add_node(static_cast<std::uint64_t>(i), CapabilityProfile(rng.next() | 1));
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j)
                if (rng.below(100) < 40)
                    net.add_link(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j), 1 + rng.below(9),
                                 static_cast<std::uint32_t>(1 + rng.below(16)), CapabilityProfile(rng.next() | 1));
        REQUIRE(net.converge() >= 0);
        const auto oracle = floyd(net);
        for (const auto& [key, cost] : oracle) {
            const RouteEntry* e = net.tables[key.first].find(key.second);
            if (cost >= kInfinityCost.units) {
                CHECK((e == nullptr || !e->reachable()));
            } else {
                REQUIRE(e != nullptr);
                CHECK(e->metric.cost.units == cost);
            }
        }
        // Following next hops never revisits a node.
        for (const auto& [src, t] : net.tables)
            for (const auto& [dst, e] : t.entries()) {
                if (!e.reachable())
                    continue;
                std::set<NodeId> seen{src};
                NodeId at = src;
                while (at != dst) {
                    at = net.tables[at].find(dst)->next_hop;
                    REQUIRE(seen.insert(at).second);
                }
            }
    }
}

TEST_CASE("next hop word is final, including cost increases")
{
    RoutingTable t(NodeId{1}, CapabilityProfile{0});
    const StegLink link{NodeId{1}, NodeId{2}, CapabilityProfile{0}, 1, 1, 0};
    const MetricWeights w;
    std::vector<RouteEntry> adv{{NodeId{2}, NodeId{2}, Metric::zero(), CapabilityProfile{0}, 0},
                                {NodeId{5}, NodeId{5}, Metric{Micro::whole(1), 1}, CapabilityProfile{0}, 0}};
    CHECK(merge_routing_update(t, NodeId{2}, link, adv, w, 10));
    CHECK(t.find(NodeId{5})->metric.cost == Micro::whole(4));
    CHECK_FALSE(merge_routing_update(t, NodeId{2}, link, adv, w, 11));
    CHECK(t.find(NodeId{5})->age == 11);

    adv[1].metric = Metric{Micro::whole(9), 1};
    CHECK(merge_routing_update(t, NodeId{2}, link, adv, w, 12));
    CHECK(t.find(NodeId{5})->metric.cost == Micro::whole(12));

    adv.pop_back();
    CHECK(merge_routing_update(t, NodeId{2}, link, adv, w, 13));
    CHECK_FALSE(t.find(NodeId{5})->reachable());
    CHECK(t.find(NodeId{5})->next_hop == NodeId{1});
    CHECK(t.prune_unreachable() == 1);
    CHECK(t.find(NodeId{5}) == nullptr);
}

TEST_CASE("invalidation, staleness and the self route")
{
    RoutingTable t(NodeId{1}, CapabilityProfile{0});
    const StegLink link{NodeId{1}, NodeId{2}, CapabilityProfile{0}, 1, 1, 0};
    std::vector<RouteEntry> adv{{NodeId{2}, NodeId{2}, Metric::zero(), CapabilityProfile{0}, 0},
                                {NodeId{1}, NodeId{2}, Metric{Micro::whole(3), 1}, CapabilityProfile{0}, 0},
                                {NodeId{3}, NodeId{3}, Metric{Micro::whole(3), 1}, CapabilityProfile{0}, 0}};
    merge_routing_update(t, NodeId{2}, link, adv, MetricWeights{}, 0);
    CHECK(t.find(NodeId{1})->metric == Metric::zero());
    CHECK(t.size() == 3);

    CHECK_FALSE(t.invalidate(NodeId{1}));
    CHECK_FALSE(t.collect_stale(60, 60));
    CHECK(t.collect_stale(61, 60));
    CHECK(t.reachable_count() == 1);
    CHECK_FALSE(t.invalidate_via(NodeId{2}));
}

TEST_CASE("hop ceiling caps long candidates")
{
    RoutingTable t(NodeId{1}, CapabilityProfile{0});
    const StegLink link{NodeId{1}, NodeId{2}, CapabilityProfile{0}, 1, 1, 0};
    std::vector<RouteEntry> adv{{NodeId{2}, NodeId{2}, Metric::zero(), CapabilityProfile{0}, 0},
                                {NodeId{9}, NodeId{9}, Metric{Micro::whole(1), 4}, CapabilityProfile{0}, 0}};
    merge_routing_update(t, NodeId{2}, link, adv, MetricWeights{}, 0, 4);
    CHECK(t.find(NodeId{9}) == nullptr);
    merge_routing_update(t, NodeId{2}, link, adv, MetricWeights{}, 0, 5);
    CHECK(t.find(NodeId{9})->metric.hop_count == 5);
}

TEST_CASE("adopt_direct_route")
{
    RoutingTable t(NodeId{1}, CapabilityProfile{0, 1});
    const StegLink link{NodeId{1}, NodeId{2}, CapabilityProfile{0, 1}, 2, 1, 0};
    CHECK(adopt_direct_route(t, link, CapabilityProfile{1, 5}, MetricWeights{}, 3));
    CHECK(t.find(NodeId{2})->metric.cost.to_string() == "2.000000");
    CHECK(t.find(NodeId{2})->methods == CapabilityProfile{1});
    CHECK_FALSE(adopt_direct_route(t, link, CapabilityProfile{1, 5}, MetricWeights{}, 3));
}

TEST_CASE("path selection")
{
    Net net;
    for (int i = 1; i <= 4; ++i)
        net.add_node(static_cast<std::uint64_t>(i), CapabilityProfile{0, 1});
    net.add_link(1, 2, 1, 1, {0, 1});
    net.add_link(1, 3, 1, 1, {0, 1});
    net.add_link(2, 4, 1, 1, {1});
    net.add_link(3, 4, 1, 1, {0, 1});
    REQUIRE(net.converge() >= 0);
    const NodeId self{1};

    auto paths = find_paths_match(net.tables[self], net.neighbours[self], net.adverts[self], NodeId{4});
    CHECK(paths.size() == 2);
    auto out = send_data(net.tables[self], net.neighbours[self], net.adverts[self], NodeId{4}, net.weights);
    REQUIRE(out.sent());
    CHECK(out.metrics_evaluated);
    CHECK(out.candidates == 2);
    // 1-3-4 costs 2.5 + 2.5, 1-2-4 costs 2.5 + 3.
    CHECK(out.path->first_hop() == NodeId{3});
    CHECK(out.path->metric.cost.to_string() == "5.000000");
    CHECK(out.method == StegMethodId{0});

    auto direct = send_data(net.tables[self], net.neighbours[self], net.adverts[self], NodeId{2}, net.weights);
    REQUIRE(direct.sent());
    CHECK(direct.candidates == 1);
    CHECK_FALSE(direct.metrics_evaluated);

    auto none = send_data(net.tables[self], net.neighbours[self], net.adverts[self], NodeId{99}, net.weights);
    CHECK_FALSE(none.sent());
    CHECK(find_paths_match(net.tables[self], net.neighbours[self], net.adverts[self], self).size() == 1);
}

TEST_CASE("choose_best_path tie-breaks")
{
    CHECK_THROWS_AS(choose_best_path(std::span<const Path>{}), EmptyPathList);
    std::vector<Path> ps(3);
    ps[0].hops = {NodeId{5}};
    ps[0].metric = Metric{Micro::whole(2), 2};
    ps[1].hops = {NodeId{7}};
    ps[1].metric = Metric{Micro::whole(2), 1};
    ps[2].hops = {NodeId{3}};
    ps[2].metric = Metric{Micro::whole(2), 1};
    CHECK(choose_best_path(ps).first_hop() == NodeId{3});
}
