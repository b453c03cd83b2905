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

#include "stegmesh/rng.hpp"
#include "stegmesh/scenario.hpp"

#include <string>

// Programmatic scenario builders shared by the tests and the acceptance run.
namespace stegmesh::fixtures {

using scenario::EdgeSpec;
using scenario::NodeSpec;
using scenario::ScenarioSpec;

inline ScenarioSpec base(std::string name, int methods = 4)
{
    ScenarioSpec s;
    s.name = std::move(name);
    s.registry = MethodRegistry::standard(methods);
    return s;
}

inline void add_ch(ScenarioSpec& s, std::uint64_t id, std::uint64_t cluster, CapabilityProfile profile)
{
    NodeSpec n;
    n.id = NodeId{id};
    n.role = NodeRole::ClusterHead;
    n.cluster = ClusterId{cluster};
    n.profile = profile;
    n.config = s.defaults;
    s.nodes.push_back(n);
}

inline void add_member(ScenarioSpec& s, std::uint64_t id, std::uint64_t cluster)
{
    NodeSpec n;
    n.id = NodeId{id};
    n.role = NodeRole::Member;
    n.cluster = ClusterId{cluster};
    n.config = s.defaults;
    s.nodes.push_back(n);
}

inline void add_gateway(ScenarioSpec& s, std::uint64_t id, std::uint64_t cluster, CapabilityProfile profile,
                        std::string_view trust)
{
    NodeSpec n;
    n.id = NodeId{id};
    n.role = NodeRole::Gateway;
    n.cluster = ClusterId{cluster};
    n.profile = profile;
    n.trust = crypto::TrustValue::of(trust);
    n.config = s.defaults;
    s.nodes.push_back(n);
}

inline void add_edge(ScenarioSpec& s, std::uint64_t a, std::uint64_t b, Tick delay = 1, std::uint32_t capacity = 1)
{
    s.edges.push_back(EdgeSpec{NodeId{a}, NodeId{b}, delay, capacity});
}

/// Applies `s.defaults` to every node (call after changing the defaults).
inline void sync_config(ScenarioSpec& s)
{
    for (auto& n : s.nodes)
        n.config = s.defaults;
}

/// `n` CHs with ids 1..n, one cluster each, on a connected random underlay
/// (a random spanning tree plus extra edges). Profiles draw from 4 methods
/// and always contain method 0, so every adjacent pair can link.
inline ScenarioSpec random_ch_graph(Rng& rng, int n, int extra_edge_percent, std::string name)
{
    ScenarioSpec s = base(std::move(name));
    for (int i = 1; i <= n; ++i)
        add_ch(s, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(i), CapabilityProfile(1 | (rng.next() & 0xE)));
    for (int i = 2; i <= n; ++i)
        add_edge(s, 1 + rng.below(static_cast<std::uint64_t>(i - 1)), static_cast<std::uint64_t>(i), 1 + rng.below(4),
                 static_cast<std::uint32_t>(1 + rng.below(8)));
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            bool present = false;
            for (const auto& e : s.edges)
                present |= (e.a.value == static_cast<std::uint64_t>(i) && e.b.value == static_cast<std::uint64_t>(j)) ||
                           (e.a.value == static_cast<std::uint64_t>(j) && e.b.value == static_cast<std::uint64_t>(i));
            if (!present && static_cast<int>(rng.below(100)) < extra_edge_percent)
                add_edge(s, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j), 1 + rng.below(4),
                         static_cast<std::uint32_t>(1 + rng.below(8)));
        }
    return s;
}

} // namespace stegmesh::fixtures
