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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Scenario description: registry, nodes, underlay, configuration and the
// scripted event list. The file format is JSON (see SCENARIO.md).
namespace stegmesh::scenario {

struct NodeSpec {
    NodeId id;
    NodeRole role = NodeRole::Member;
    ClusterId cluster;
    CapabilityProfile profile;
    /// Required for gateways (border candidates), optional elsewhere.
    std::optional<crypto::TrustValue> trust;
    /// Scenario defaults with this node's overrides applied.
    engine::EngineConfig config;
};

struct EdgeSpec {
    NodeId a;
    NodeId b;
    Tick delay = 1;
    std::uint32_t capacity = 1;
};

struct FaultSpec {
    enum class Kind : std::uint8_t { BenignChDeparture, MaliciousChRemoval, LinkCut, Eavesdropper };
    Kind kind = Kind::BenignChDeparture;
    NodeId node;
    NodeId peer; ///< second endpoint for LinkCut
    std::uint32_t guesses = 16; ///< random key guesses per overheard message (Eavesdropper)
};

const char* to_string(FaultSpec::Kind kind);

struct AdmitSpec {
    NodeId node;
};

struct EvictSpec {
    NodeId node;
};

/// Data from one CH to another over the steg-path.
struct SendSpec {
    NodeId from;
    NodeId to;
    std::uint32_t bytes = 16;
    std::uint32_t count = 1;
    Tick interval = 1;
};

/// Sealed messages from a CH to its members, round robin.
struct IntraTrafficSpec {
    ClusterId cluster;
    std::uint32_t bytes = 32;
    std::uint32_t count = 1;
    Tick interval = 1;
};

struct EventSpec {
    Tick tick = 0;
    std::variant<FaultSpec, AdmitSpec, EvictSpec, SendSpec, IntraTrafficSpec> action;
};

struct ScenarioSpec {
    std::string name;
    MethodRegistry registry;
    engine::EngineConfig defaults;
    crypto::TrustValue gateway_threshold = crypto::TrustValue(Micro::from_units(500'000));
    bool rekey_on_eviction = true;
    std::vector<NodeSpec> nodes;
    std::vector<EdgeSpec> edges;
    std::vector<EventSpec> events;

    const NodeSpec* find(NodeId id) const;
};

/// Throws ParseError for malformed JSON, ValidationError for everything else.
ScenarioSpec parse_scenario(std::string_view text);
ScenarioSpec load_scenario(const std::filesystem::path& path);

/// Re-checks a programmatically built spec. Throws ValidationError.
void validate(const ScenarioSpec& spec);

/// Canonical JSON: every default explicit, keys sorted, no whitespace.
std::string canonical_text(const ScenarioSpec& spec);
/// Pretty-printed canonical form, suitable for writing a .scn file.
std::string to_scenario_file(const ScenarioSpec& spec);
/// FNV-1a 64 over canonical_text, 16 hex digits.
std::string digest(const ScenarioSpec& spec);

} // namespace stegmesh::scenario
