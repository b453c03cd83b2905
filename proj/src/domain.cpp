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

#include "stegmesh/domain.hpp"

#include "stegmesh/errors.hpp"

#include <stdexcept>

namespace stegmesh {

std::string to_string(NodeId id) { return std::to_string(id.value); }

const char* to_string(NodeRole role)
{
    switch (role) {
    case NodeRole::ClusterHead: return "cluster_head";
    case NodeRole::Gateway: return "gateway";
    case NodeRole::Member: return "member";
    }
    return "?";
}

const char* to_string(LayerTag layer)
{
    switch (layer) {
    case LayerTag::Application: return "application";
    case LayerTag::Transport: return "transport";
    case LayerTag::DataLink: return "data_link";
    }
    return "?";
}

const char* to_string(CarrierKind kind)
{
    switch (kind) {
    case CarrierKind::HeaderField: return "header_field";
    case CarrierKind::PayloadLowBits: return "payload_low_bits";
    }
    return "?";
}

const char* to_string(MessageKind kind)
{
    switch (kind) {
    case MessageKind::RandomWalkDiscovery: return "random_walk";
    case MessageKind::Hello: return "hello";
    case MessageKind::RoutingUpdate: return "routing_update";
    case MessageKind::CreateStegLink: return "create_steg_link";
    case MessageKind::Data: return "data";
    case MessageKind::KeyDelivery: return "key_delivery";
    case MessageKind::IntraCluster: return "intra_cluster";
    }
    return "?";
}

const char* to_string(Cause cause)
{
    switch (cause) {
    case Cause::None: return "none";
    case Cause::Periodic: return "periodic";
    case Cause::Walk: return "walk";
    case Cause::Update: return "update";
    case Cause::Expiry: return "expiry";
    case Cause::Triggered: return "triggered";
    case Cause::Offer: return "offer";
    case Cause::Relay: return "relay";
    case Cause::Forward: return "forward";
    case Cause::Data: return "data";
    }
    return "?";
}

CapabilityProfile::CapabilityProfile(std::initializer_list<int> ids)
{
    for (int id : ids) {
        if (id < 0 || id > StegMethodId::kMax)
            throw std::invalid_argument("method id out of range: " + std::to_string(id));
        insert(StegMethodId{static_cast<std::uint8_t>(id)});
    }
}

CapabilityProfile CapabilityProfile::of(const std::vector<StegMethodId>& ids)
{
    CapabilityProfile p;
    for (auto id : ids)
        p.insert(id);
    return p;
}

void CapabilityProfile::insert(StegMethodId m)
{
    if (m.value > StegMethodId::kMax)
        throw std::invalid_argument("method id out of range: " + std::to_string(m.value));
    mask_ |= std::uint64_t{1} << m.value;
}

std::optional<StegMethodId> CapabilityProfile::lowest() const
{
    if (mask_ == 0)
        return std::nullopt;
    return StegMethodId{static_cast<std::uint8_t>(std::countr_zero(mask_))};
}

std::vector<StegMethodId> CapabilityProfile::ids() const
{
    std::vector<StegMethodId> out;
    for (std::uint64_t m = mask_; m != 0; m &= m - 1)
        out.push_back(StegMethodId{static_cast<std::uint8_t>(std::countr_zero(m))});
    return out;
}

std::string CapabilityProfile::to_string() const
{
    std::string out = "{";
    bool first = true;
    for (auto id : ids()) {
        if (!first)
            out += ',';
        out += std::to_string(id.value);
        first = false;
    }
    return out + "}";
}

CapabilityProfile capability_intersection(CapabilityProfile a, CapabilityProfile b)
{
    return CapabilityProfile(a.mask() & b.mask());
}

void MethodRegistry::add(MethodInfo info)
{
    if (info.id.value > StegMethodId::kMax)
        throw std::invalid_argument("method id out of range");
    methods_[info.id] = info;
}

const MethodInfo* MethodRegistry::find(StegMethodId id) const
{
    auto it = methods_.find(id);
    return it == methods_.end() ? nullptr : &it->second;
}

CapabilityProfile MethodRegistry::all() const
{
    CapabilityProfile p;
    for (const auto& [id, info] : methods_)
        p.insert(id);
    return p;
}

MethodRegistry MethodRegistry::standard(int count)
{
    MethodRegistry r;
    for (int i = 0; i < count; ++i) {
        const auto id = StegMethodId{static_cast<std::uint8_t>(i)};
        const bool low_bits = i % 2 == 0;
        r.add(MethodInfo{id, low_bits ? LayerTag::Application : LayerTag::Transport,
                         low_bits ? CarrierKind::PayloadLowBits : CarrierKind::HeaderField});
    }
    r.set_discovery_method(StegMethodId{0});
    return r;
}

Metric add(const Metric& a, const Metric& b, Micro infinity)
{
    if (!a.reachable(infinity) || !b.reachable(infinity))
        return Metric::unreachable(infinity);
    const Micro sum = a.cost + b.cost;
    if (sum >= infinity)
        return Metric::unreachable(infinity);
    return Metric{sum, a.hop_count + b.hop_count};
}

Metric link_cost(const StegLink& link, const MetricWeights& w, Micro infinity)
{
    if (link.capacity < 1 || link.delay < 1 || link.methods.empty())
        throw std::invalid_argument("steg-link invariant violated (capacity, delay >= 1, methods non-empty)");
    if (w.delay.units < 0 || w.capacity.units < 0 || w.methods.units < 0)
        throw std::invalid_argument("metric weights must be non-negative");

    __extension__ typedef __int128 Wide;
    const Wide cap = link.capacity;
    const Wide n = link.methods.size();
    const Wide den = cap * n;
    const Wide num = Wide{w.delay.units} * Wide{link.delay} * den + Wide{w.capacity.units} * n +
                     Wide{w.methods.units} * cap;
    const Wide rounded = (2 * num + den) / (2 * den);
    if (rounded > Wide{infinity.units})
        throw OverflowError("link cost exceeds the infinity cap of " + infinity.to_string());
    return Metric{Micro::from_units(static_cast<std::int64_t>(rounded)), 1};
}

Bytes wire_bytes(const ProtocolMessage& msg)
{
    Bytes out;
    out.reserve(msg.body.size() + 2);
    out.push_back(static_cast<std::uint8_t>(msg.kind));
    out.push_back(msg.covered ? 1 : 0);
    out.insert(out.end(), msg.body.begin(), msg.body.end());
    return out;
}

} // namespace stegmesh
