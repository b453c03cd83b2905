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

#include "stegmesh/scenario.hpp"

#include "stegmesh/checksum.hpp"
#include "stegmesh/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace stegmesh::scenario {

using nlohmann::json;

const char* to_string(FaultSpec::Kind kind)
{
    switch (kind) {
    case FaultSpec::Kind::BenignChDeparture: return "benign_departure";
    case FaultSpec::Kind::MaliciousChRemoval: return "malicious_removal";
    case FaultSpec::Kind::LinkCut: return "link_cut";
    case FaultSpec::Kind::Eavesdropper: return "eavesdropper";
    }
    return "?";
}

const NodeSpec* ScenarioSpec::find(NodeId id) const
{
    auto it = std::find_if(nodes.begin(), nodes.end(), [&](const NodeSpec& n) { return n.id == id; });
    return it == nodes.end() ? nullptr : &*it;
}

namespace {

// DOM builder that keeps non-integer numbers as their source text, so that
// decimals reach Micro::parse without a detour through double.
class DecimalSax {
public:
    DecimalSax(json& root, std::string_view text) : dom_(root, true), text_(text) {}

    bool null() { return dom_.null(); }
    bool boolean(bool v) { return dom_.boolean(v); }
    bool number_integer(json::number_integer_t v) { return dom_.number_integer(v); }
    bool number_unsigned(json::number_unsigned_t v) { return dom_.number_unsigned(v); }
    bool number_float(json::number_float_t, const json::string_t& s)
    {
        json::string_t copy = s;
        return dom_.string(copy);
    }
    bool string(json::string_t& v) { return dom_.string(v); }
    bool binary(json::binary_t& v) { return dom_.binary(v); }
    bool start_object(std::size_t n) { return dom_.start_object(n); }
    bool key(json::string_t& k) { return dom_.key(k); }
    bool end_object() { return dom_.end_object(); }
    bool start_array(std::size_t n) { return dom_.start_array(n); }
    bool end_array() { return dom_.end_array(); }

    bool parse_error(std::size_t position, const std::string& token, const nlohmann::detail::exception&)
    {
        std::size_t line = 1;
        std::size_t column = 1;
        const std::size_t end = std::min(position > 0 ? position - 1 : 0, text_.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text_[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ParseError(line, column, "unexpected '" + token + "'");
    }

private:
    nlohmann::detail::json_sax_dom_parser<json> dom_;
    std::string_view text_;
};

[[noreturn]] void fail(const std::string& path, const std::string& reason) { throw ValidationError(path, reason); }

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed)
{
    if (!obj.is_object())
        fail(path.empty() ? "$" : path, "expected an object");
    for (const auto& [k, v] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
            fail(join(path, k), "unknown field");
    }
}

const json* opt(const json& obj, const char* key)
{
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

const json& req(const json& obj, const std::string& path, const char* key)
{
    auto it = obj.find(key);
    if (it == obj.end())
        fail(join(path, key), "required field missing");
    return *it;
}

std::uint64_t as_uint(const json& v, const std::string& path, std::uint64_t lo = 0,
                      std::uint64_t hi = UINT64_MAX)
{
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        fail(path, "expected a non-negative integer");
    const auto x = v.get<std::uint64_t>();
    if (x < lo || x > hi)
        fail(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
}

Micro as_decimal(const json& v, const std::string& path)
{
    std::optional<Micro> m;
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        const auto x = v.get<std::uint64_t>();
        if (x > static_cast<std::uint64_t>(INT64_MAX / Micro::kScale))
            fail(path, "decimal out of range");
        m = Micro::whole(static_cast<std::int64_t>(x));
    } else if (v.is_string()) {
        m = Micro::parse(v.get<std::string>());
    }
    if (!m)
        fail(path, "expected a non-negative decimal");
    return *m;
}

bool as_bool(const json& v, const std::string& path)
{
    if (!v.is_boolean())
        fail(path, "expected true or false");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path)
{
    if (!v.is_string())
        fail(path, "expected a string");
    return v.get<std::string>();
}

crypto::TrustValue as_trust(const json& v, const std::string& path)
{
    const Micro m = as_decimal(v, path);
    if (m > Micro::whole(1))
        fail(path, "trust must lie in [0, 1]");
    return crypto::TrustValue(m);
}

template <typename E>
E as_enum(const json& v, const std::string& path, std::initializer_list<std::pair<const char*, E>> names)
{
    const std::string s = as_string(v, path);
    for (const auto& [name, value] : names)
        if (s == name)
            return value;
    std::string expected;
    for (const auto& [name, value] : names)
        expected += (expected.empty() ? "" : ", ") + std::string(name);
    fail(path, "expected one of " + expected);
}

void read_engine(const json& obj, const std::string& path, engine::EngineConfig& c)
{
    only_keys(obj, path,
              {"random_walk_period", "routing_update_period", "hello_period", "fluctuation_rw", "fluctuation_ru",
               "fluctuation_h", "hello_timeout", "forward_probability", "weights", "infinity_cost", "relay_depth",
               "hop_ceiling"});
    auto tick = [&](const char* key, Tick& out) {
        if (const json* v = opt(obj, key))
            out = as_uint(*v, join(path, key), 0, 1'000'000'000);
    };
    tick("random_walk_period", c.random_walk_period);
    tick("routing_update_period", c.routing_update_period);
    tick("hello_period", c.hello_period);
    tick("fluctuation_rw", c.fluctuation_rw);
    tick("fluctuation_ru", c.fluctuation_ru);
    tick("fluctuation_h", c.fluctuation_h);
    tick("hello_timeout", c.hello_timeout);
    if (const json* v = opt(obj, "forward_probability")) {
        c.forward_probability = as_decimal(*v, join(path, "forward_probability"));
        if (c.forward_probability > Micro::whole(1))
            fail(join(path, "forward_probability"), "must lie in [0, 1]");
    }
    if (const json* w = opt(obj, "weights")) {
        const std::string wp = join(path, "weights");
        only_keys(*w, wp, {"delay", "capacity", "methods"});
        if (const json* v = opt(*w, "delay"))
            c.weights.delay = as_decimal(*v, join(wp, "delay"));
        if (const json* v = opt(*w, "capacity"))
            c.weights.capacity = as_decimal(*v, join(wp, "capacity"));
        if (const json* v = opt(*w, "methods"))
            c.weights.methods = as_decimal(*v, join(wp, "methods"));
    }
    if (const json* v = opt(obj, "infinity_cost")) {
        c.infinity_cost = as_decimal(*v, join(path, "infinity_cost"));
        if (c.infinity_cost > kInfinityCost)
            fail(join(path, "infinity_cost"), "must not exceed " + kInfinityCost.to_string());
    }
    if (const json* v = opt(obj, "relay_depth"))
        c.relay_depth = static_cast<std::uint32_t>(as_uint(*v, join(path, "relay_depth"), 1, 255));
    if (const json* v = opt(obj, "hop_ceiling"))
        c.hop_ceiling = static_cast<std::uint32_t>(as_uint(*v, join(path, "hop_ceiling"), 1, 255));
    try {
        c.validate();
    } catch (const InvalidConfig& e) {
        fail(path.empty() ? "engine" : path, e.what());
    }
}

CapabilityProfile read_profile(const json& v, const std::string& path, const MethodRegistry& registry)
{
    if (!v.is_array())
        fail(path, "expected an array of method ids");
    CapabilityProfile p;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto id = as_uint(v[i], index(path, i), 0, StegMethodId::kMax);
        const StegMethodId m{static_cast<std::uint8_t>(id)};
        if (p.contains(m))
            fail(index(path, i), "duplicate method id");
        if (!registry.contains(m))
            fail(index(path, i), "unknown method id " + std::to_string(id));
        p.insert(m);
    }
    return p;
}

NodeId read_node_ref(const json& obj, const std::string& path, const char* key)
{
    return NodeId{as_uint(req(obj, path, key), join(path, key))};
}

EventSpec read_event(const json& e, const std::string& path)
{
    if (!e.is_object())
        fail(path, "expected an object");
    EventSpec ev;
    ev.tick = as_uint(req(e, path, "tick"), join(path, "tick"), 0, 1'000'000'000);
    const std::string kind = as_string(req(e, path, "kind"), join(path, "kind"));

    auto count_fields = [&](std::uint32_t& bytes, std::uint32_t& count, Tick& interval) {
        if (const json* v = opt(e, "bytes"))
            bytes = static_cast<std::uint32_t>(as_uint(*v, join(path, "bytes"), 0, 4096));
        if (const json* v = opt(e, "count"))
            count = static_cast<std::uint32_t>(as_uint(*v, join(path, "count"), 1, 1'000'000));
        if (const json* v = opt(e, "interval"))
            interval = as_uint(*v, join(path, "interval"), 1, 1'000'000);
    };

    if (kind == "benign_departure" || kind == "malicious_removal") {
        only_keys(e, path, {"tick", "kind", "node"});
        FaultSpec f;
        f.kind = kind == "benign_departure" ? FaultSpec::Kind::BenignChDeparture
                                            : FaultSpec::Kind::MaliciousChRemoval;
        f.node = read_node_ref(e, path, "node");
        ev.action = f;
    } else if (kind == "link_cut") {
        only_keys(e, path, {"tick", "kind", "a", "b"});
        FaultSpec f;
        f.kind = FaultSpec::Kind::LinkCut;
        f.node = read_node_ref(e, path, "a");
        f.peer = read_node_ref(e, path, "b");
        ev.action = f;
    } else if (kind == "eavesdropper") {
        only_keys(e, path, {"tick", "kind", "node", "guesses"});
        FaultSpec f;
        f.kind = FaultSpec::Kind::Eavesdropper;
        f.node = read_node_ref(e, path, "node");
        if (const json* v = opt(e, "guesses"))
            f.guesses = static_cast<std::uint32_t>(as_uint(*v, join(path, "guesses"), 0, 1'000'000));
        ev.action = f;
    } else if (kind == "admit") {
        only_keys(e, path, {"tick", "kind", "node"});
        ev.action = AdmitSpec{read_node_ref(e, path, "node")};
    } else if (kind == "evict") {
        only_keys(e, path, {"tick", "kind", "node"});
        ev.action = EvictSpec{read_node_ref(e, path, "node")};
    } else if (kind == "send") {
        only_keys(e, path, {"tick", "kind", "from", "to", "bytes", "count", "interval"});
        SendSpec s;
        s.from = read_node_ref(e, path, "from");
        s.to = read_node_ref(e, path, "to");
        count_fields(s.bytes, s.count, s.interval);
        ev.action = s;
    } else if (kind == "intra_traffic") {
        only_keys(e, path, {"tick", "kind", "cluster", "bytes", "count", "interval"});
        IntraTrafficSpec s;
        s.cluster = ClusterId{as_uint(req(e, path, "cluster"), join(path, "cluster"))};
        count_fields(s.bytes, s.count, s.interval);
        ev.action = s;
    } else {
        fail(join(path, "kind"), "unknown event kind '" + kind + "'");
    }
    return ev;
}

ScenarioSpec from_json(const json& root)
{
    only_keys(root, "",
              {"name", "methods", "discovery_method", "engine", "gateway_threshold", "rekey_on_eviction", "nodes",
               "edges", "events"});
    ScenarioSpec spec;
    if (const json* v = opt(root, "name"))
        spec.name = as_string(*v, "name");

    const json& methods = req(root, "", "methods");
    if (!methods.is_array() || methods.empty())
        fail("methods", "expected a non-empty array");
    for (std::size_t i = 0; i < methods.size(); ++i) {
        const std::string p = index("methods", i);
        only_keys(methods[i], p, {"id", "layer", "codec"});
        MethodInfo info;
        info.id = StegMethodId{static_cast<std::uint8_t>(as_uint(req(methods[i], p, "id"), join(p, "id"), 0,
                                                                 StegMethodId::kMax))};
        if (spec.registry.contains(info.id))
            fail(join(p, "id"), "duplicate method id");
        info.layer = as_enum<LayerTag>(req(methods[i], p, "layer"), join(p, "layer"),
                                       {{"application", LayerTag::Application},
                                        {"transport", LayerTag::Transport},
                                        {"data_link", LayerTag::DataLink}});
        info.codec = as_enum<CarrierKind>(req(methods[i], p, "codec"), join(p, "codec"),
                                          {{"header_field", CarrierKind::HeaderField},
                                           {"low_bits", CarrierKind::PayloadLowBits}});
        spec.registry.add(info);
    }
    if (const json* v = opt(root, "discovery_method")) {
        spec.registry.set_discovery_method(
            StegMethodId{static_cast<std::uint8_t>(as_uint(*v, "discovery_method", 0, StegMethodId::kMax))});
    } else {
        const auto& all = spec.registry.methods();
        auto it = std::find_if(all.begin(), all.end(),
                               [](const auto& kv) { return kv.second.codec == CarrierKind::PayloadLowBits; });
        if (it == all.end())
            fail("methods", "at least one low_bits method is needed for discovery");
        spec.registry.set_discovery_method(it->first);
    }

    if (const json* v = opt(root, "engine"))
        read_engine(*v, "engine", spec.defaults);
    if (const json* v = opt(root, "gateway_threshold"))
        spec.gateway_threshold = as_trust(*v, "gateway_threshold");
    if (const json* v = opt(root, "rekey_on_eviction"))
        spec.rekey_on_eviction = as_bool(*v, "rekey_on_eviction");

    const json& nodes = req(root, "", "nodes");
    if (!nodes.is_array())
        fail("nodes", "expected an array");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string p = index("nodes", i);
        const json& n = nodes[i];
        only_keys(n, p, {"id", "role", "cluster", "profile", "trust", "engine"});
        NodeSpec node;
        node.id = NodeId{as_uint(req(n, p, "id"), join(p, "id"))};
        node.role = as_enum<NodeRole>(req(n, p, "role"), join(p, "role"),
                                      {{"ch", NodeRole::ClusterHead},
                                       {"gateway", NodeRole::Gateway},
                                       {"member", NodeRole::Member}});
        node.cluster = ClusterId{as_uint(req(n, p, "cluster"), join(p, "cluster"))};
        if (const json* v = opt(n, "profile"))
            node.profile = read_profile(*v, join(p, "profile"), spec.registry);
        else if (node.role != NodeRole::Member)
            fail(join(p, "profile"), "required field missing");
        if (const json* v = opt(n, "trust"))
            node.trust = as_trust(*v, join(p, "trust"));
        node.config = spec.defaults;
        if (const json* v = opt(n, "engine")) {
            if (node.role != NodeRole::ClusterHead)
                fail(join(p, "engine"), "engine overrides apply to cluster heads only");
            read_engine(*v, join(p, "engine"), node.config);
        }
        spec.nodes.push_back(std::move(node));
    }

    if (const json* edges = opt(root, "edges")) {
        if (!edges->is_array())
            fail("edges", "expected an array");
        for (std::size_t i = 0; i < edges->size(); ++i) {
            const std::string p = index("edges", i);
            const json& e = (*edges)[i];
            only_keys(e, p, {"a", "b", "delay", "capacity"});
            EdgeSpec edge;
            edge.a = read_node_ref(e, p, "a");
            edge.b = read_node_ref(e, p, "b");
            if (const json* v = opt(e, "delay"))
                edge.delay = as_uint(*v, join(p, "delay"), 1, 1'000'000);
            if (const json* v = opt(e, "capacity"))
                edge.capacity = static_cast<std::uint32_t>(as_uint(*v, join(p, "capacity"), 1, 1'000'000));
            spec.edges.push_back(edge);
        }
    }

    if (const json* events = opt(root, "events")) {
        if (!events->is_array())
            fail("events", "expected an array");
        for (std::size_t i = 0; i < events->size(); ++i)
            spec.events.push_back(read_event((*events)[i], index("events", i)));
    }

    validate(spec);
    return spec;
}

json engine_json(const engine::EngineConfig& c)
{
    json j;
    j["random_walk_period"] = c.random_walk_period;
    j["routing_update_period"] = c.routing_update_period;
    j["hello_period"] = c.hello_period;
    j["fluctuation_rw"] = c.fluctuation_rw;
    j["fluctuation_ru"] = c.fluctuation_ru;
    j["fluctuation_h"] = c.fluctuation_h;
    j["hello_timeout"] = c.hello_timeout;
    j["forward_probability"] = c.forward_probability.to_string();
    j["weights"] = {{"delay", c.weights.delay.to_string()},
                    {"capacity", c.weights.capacity.to_string()},
                    {"methods", c.weights.methods.to_string()}};
    j["infinity_cost"] = c.infinity_cost.to_string();
    j["relay_depth"] = c.relay_depth;
    j["hop_ceiling"] = c.hop_ceiling;
    return j;
}

const char* role_name(NodeRole r)
{
    switch (r) {
    case NodeRole::ClusterHead: return "ch";
    case NodeRole::Gateway: return "gateway";
    case NodeRole::Member: return "member";
    }
    return "?";
}

const char* layer_name(LayerTag l)
{
    switch (l) {
    case LayerTag::Application: return "application";
    case LayerTag::Transport: return "transport";
    case LayerTag::DataLink: return "data_link";
    }
    return "?";
}

json profile_json(CapabilityProfile p)
{
    json arr = json::array();
    for (auto id : p.ids())
        arr.push_back(id.value);
    return arr;
}

json event_json(const EventSpec& ev)
{
    json j;
    j["tick"] = ev.tick;
    std::visit(
        [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, FaultSpec>) {
                j["kind"] = to_string(a.kind);
                if (a.kind == FaultSpec::Kind::LinkCut) {
                    j["a"] = a.node.value;
                    j["b"] = a.peer.value;
                } else {
                    j["node"] = a.node.value;
                }
                if (a.kind == FaultSpec::Kind::Eavesdropper)
                    j["guesses"] = a.guesses;
            } else if constexpr (std::is_same_v<T, AdmitSpec>) {
                j["kind"] = "admit";
                j["node"] = a.node.value;
            } else if constexpr (std::is_same_v<T, EvictSpec>) {
                j["kind"] = "evict";
                j["node"] = a.node.value;
            } else if constexpr (std::is_same_v<T, SendSpec>) {
                j["kind"] = "send";
                j["from"] = a.from.value;
                j["to"] = a.to.value;
                j["bytes"] = a.bytes;
                j["count"] = a.count;
                j["interval"] = a.interval;
            } else {
                j["kind"] = "intra_traffic";
                j["cluster"] = a.cluster.value;
                j["bytes"] = a.bytes;
                j["count"] = a.count;
                j["interval"] = a.interval;
            }
        },
        ev.action);
    return j;
}

json to_json(const ScenarioSpec& spec)
{
    json root;
    root["name"] = spec.name;
    json methods = json::array();
    for (const auto& [id, info] : spec.registry.methods())
        methods.push_back({{"id", id.value},
                           {"layer", layer_name(info.layer)},
                           {"codec", info.codec == CarrierKind::HeaderField ? "header_field" : "low_bits"}});
    root["methods"] = methods;
    root["discovery_method"] = spec.registry.discovery_method().value;
    root["engine"] = engine_json(spec.defaults);
    root["gateway_threshold"] = spec.gateway_threshold.value().to_string();
    root["rekey_on_eviction"] = spec.rekey_on_eviction;

    json nodes = json::array();
    for (const auto& n : spec.nodes) {
        json j;
        j["id"] = n.id.value;
        j["role"] = role_name(n.role);
        j["cluster"] = n.cluster.value;
        j["profile"] = profile_json(n.profile);
        if (n.trust)
            j["trust"] = n.trust->value().to_string();
        if (n.config != spec.defaults)
            j["engine"] = engine_json(n.config);
        nodes.push_back(std::move(j));
    }
    root["nodes"] = nodes;

    json edges = json::array();
    for (const auto& e : spec.edges)
        edges.push_back({{"a", e.a.value}, {"b", e.b.value}, {"delay", e.delay}, {"capacity", e.capacity}});
    root["edges"] = edges;

    json events = json::array();
    for (const auto& ev : spec.events)
        events.push_back(event_json(ev));
    root["events"] = events;
    return root;
}

} // namespace

void validate(const ScenarioSpec& spec)
{
    const MethodInfo* disc = spec.registry.find(spec.registry.discovery_method());
    if (!disc)
        fail("discovery_method", "method is not registered");
    if (disc->codec != CarrierKind::PayloadLowBits)
        fail("discovery_method", "discovery method must use the low_bits codec");
    try {
        spec.defaults.validate();
    } catch (const InvalidConfig& e) {
        fail("engine", e.what());
    }

    std::map<NodeId, std::size_t> by_id;
    std::map<ClusterId, std::size_t> heads;
    const CapabilityProfile registered = spec.registry.all();
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        const NodeSpec& n = spec.nodes[i];
        const std::string p = index("nodes", i);
        if (!by_id.emplace(n.id, i).second)
            fail(join(p, "id"), "duplicate node id " + to_string(n.id));
        if (n.role != NodeRole::Member && n.profile.empty())
            fail(join(p, "profile"), "cluster heads and gateways need a non-empty profile");
        const auto unknown = CapabilityProfile(n.profile.mask() & ~registered.mask());
        if (!unknown.empty()) {
            const auto ids = n.profile.ids();
            const auto bad = *unknown.lowest();
            const auto pos = std::find(ids.begin(), ids.end(), bad) - ids.begin();
            fail(index(join(p, "profile"), static_cast<std::size_t>(pos)),
                 "unknown method id " + std::to_string(bad.value));
        }
        if (n.role == NodeRole::Gateway && !n.trust)
            fail(join(p, "trust"), "gateways need a trust value");
        if (n.role == NodeRole::ClusterHead && !heads.emplace(n.cluster, i).second)
            fail(join(p, "role"), "cluster " + std::to_string(n.cluster.value) + " already has a cluster head");
        try {
            n.config.validate();
        } catch (const InvalidConfig& e) {
            fail(join(p, "engine"), e.what());
        }
    }
    for (std::size_t i = 0; i < spec.nodes.size(); ++i)
        if (!heads.contains(spec.nodes[i].cluster))
            fail(join(index("nodes", i), "cluster"),
                 "cluster " + std::to_string(spec.nodes[i].cluster.value) + " has no cluster head");

    std::set<std::pair<NodeId, NodeId>> edge_set;
    for (std::size_t i = 0; i < spec.edges.size(); ++i) {
        const EdgeSpec& e = spec.edges[i];
        const std::string p = index("edges", i);
        if (!by_id.contains(e.a))
            fail(join(p, "a"), "unknown node " + to_string(e.a));
        if (!by_id.contains(e.b))
            fail(join(p, "b"), "unknown node " + to_string(e.b));
        if (e.a == e.b)
            fail(join(p, "b"), "self loop");
        if (e.delay < 1)
            fail(join(p, "delay"), "must be at least 1");
        if (e.capacity < 1)
            fail(join(p, "capacity"), "must be at least 1");
        if (!edge_set.insert(std::minmax(e.a, e.b)).second)
            fail(p, "duplicate edge");
    }

    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        const NodeSpec& n = spec.nodes[i];
        if (n.role != NodeRole::Gateway)
            continue;
        const bool borders = std::any_of(spec.edges.begin(), spec.edges.end(), [&](const EdgeSpec& e) {
            if (e.a != n.id && e.b != n.id)
                return false;
            const NodeId other = e.a == n.id ? e.b : e.a;
            return spec.nodes[by_id.at(other)].cluster != n.cluster;
        });
        if (!borders)
            fail(join(index("nodes", i), "role"), "gateway has no underlay edge into another cluster");
    }

    auto node_of = [&](NodeId id, const std::string& path) -> const NodeSpec& {
        auto it = by_id.find(id);
        if (it == by_id.end())
            fail(path, "unknown node " + to_string(id));
        return spec.nodes[it->second];
    };
    auto require_ch = [&](NodeId id, const std::string& path) {
        if (node_of(id, path).role != NodeRole::ClusterHead)
            fail(path, "node " + to_string(id) + " is not a cluster head");
    };

    std::map<NodeId, Tick> admitted;
    Tick last_tick = 0;
    for (std::size_t i = 0; i < spec.events.size(); ++i) {
        const EventSpec& ev = spec.events[i];
        const std::string p = index("events", i);
        if (ev.tick < last_tick)
            fail(join(p, "tick"), "events must be listed in tick order");
        last_tick = ev.tick;
        std::visit(
            [&](const auto& a) {
                using T = std::decay_t<decltype(a)>;
                if constexpr (std::is_same_v<T, FaultSpec>) {
                    switch (a.kind) {
                    case FaultSpec::Kind::BenignChDeparture:
                    case FaultSpec::Kind::MaliciousChRemoval:
                        require_ch(a.node, join(p, "node"));
                        break;
                    case FaultSpec::Kind::LinkCut:
                        node_of(a.node, join(p, "a"));
                        node_of(a.peer, join(p, "b"));
                        if (!edge_set.contains(std::minmax(a.node, a.peer)))
                            fail(p, "no underlay edge between " + to_string(a.node) + " and " + to_string(a.peer));
                        break;
                    case FaultSpec::Kind::Eavesdropper:
                        node_of(a.node, join(p, "node"));
                        break;
                    }
                } else if constexpr (std::is_same_v<T, AdmitSpec>) {
                    node_of(a.node, join(p, "node"));
                    if (!admitted.emplace(a.node, ev.tick).second)
                        fail(join(p, "node"), "node " + to_string(a.node) + " is admitted twice");
                } else if constexpr (std::is_same_v<T, EvictSpec>) {
                    if (node_of(a.node, join(p, "node")).role != NodeRole::Member)
                        fail(join(p, "node"), "only members can be evicted");
                } else if constexpr (std::is_same_v<T, SendSpec>) {
                    require_ch(a.from, join(p, "from"));
                    require_ch(a.to, join(p, "to"));
                } else {
                    if (!heads.contains(a.cluster))
                        fail(join(p, "cluster"), "unknown cluster " + std::to_string(a.cluster.value));
                }
            },
            ev.action);
    }
}

ScenarioSpec parse_scenario(std::string_view text)
{
    json root;
    DecimalSax sax(root, text);
    json::sax_parse(text.begin(), text.end(), &sax);
    return from_json(root);
}

ScenarioSpec load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open scenario " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string canonical_text(const ScenarioSpec& spec) { return to_json(spec).dump(); }

std::string to_scenario_file(const ScenarioSpec& spec) { return to_json(spec).dump(2) + "\n"; }

std::string digest(const ScenarioSpec& spec)
{
    return fnv1a64_hex(canonical_text(spec));
}

} // namespace stegmesh::scenario
