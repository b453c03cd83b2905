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

#include "stegmesh/engine.hpp"

#include "stegmesh/checksum.hpp"
#include "stegmesh/codec.hpp"
#include "stegmesh/errors.hpp"

#include <algorithm>

namespace stegmesh::engine {

const char* to_string(TimerKind kind)
{
    switch (kind) {
    case TimerKind::RandomWalk: return "random_walk";
    case TimerKind::RoutingUpdate: return "routing_update";
    case TimerKind::Hello: return "hello";
    case TimerKind::ExpiryScan: return "expiry_scan";
    }
    return "?";
}

void EngineConfig::validate() const
{
    if (random_walk_period < 1 || routing_update_period < 1 || hello_period < 1)
        throw InvalidConfig("all periods must be at least 1 tick");
    if (hello_timeout <= hello_period)
        throw InvalidConfig("hello_timeout must exceed hello_period");
    if (forward_probability < Micro{} || forward_probability > Micro::whole(1))
        throw InvalidConfig("forward_probability must lie in [0, 1]");
    if (weights.delay < Micro{} || weights.capacity < Micro{} || weights.methods < Micro{})
        throw InvalidConfig("metric weights must be non-negative");
    if (infinity_cost <= Micro{})
        throw InvalidConfig("infinity_cost must be positive");
    if (relay_depth < 1 || relay_depth > 255)
        throw InvalidConfig("relay_depth must lie in [1, 255]");
    if (hop_ceiling < 1 || hop_ceiling > 255)
        throw InvalidConfig("hop_ceiling must lie in [1, 255]");
}

void Actions::merge(Actions&& other)
{
    std::move(other.out.begin(), other.out.end(), std::back_inserter(out));
    std::move(other.notes.begin(), other.notes.end(), std::back_inserter(notes));
}

std::size_t Actions::count(MessageKind kind) const
{
    return static_cast<std::size_t>(
        std::count_if(out.begin(), out.end(), [&](const Outbound& o) { return o.message.kind == kind; }));
}

namespace {

Tick period_of(const EngineConfig& c, TimerKind kind)
{
    switch (kind) {
    case TimerKind::RandomWalk: return c.random_walk_period;
    case TimerKind::RoutingUpdate: return c.routing_update_period;
    case TimerKind::Hello:
    case TimerKind::ExpiryScan: return c.hello_period;
    }
    return 1;
}

Tick fluctuation_of(const EngineConfig& c, TimerKind kind)
{
    switch (kind) {
    case TimerKind::RandomWalk: return c.fluctuation_rw;
    case TimerKind::RoutingUpdate: return c.fluctuation_ru;
    case TimerKind::Hello:
    case TimerKind::ExpiryScan: return c.fluctuation_h;
    }
    return 0;
}

ProtocolMessage covered_message(NodeId self, MessageKind kind, const Bytes& record, StegMethodId method,
                                Cause cause, Context& ctx)
{
    const MethodInfo* info = ctx.registry.find(method);
    if (!info)
        throw UnknownMethod("steganographic method " + std::to_string(method.value) + " is not registered");
    auto carrier = codec::make_carrier(info->codec, record.size(), ctx.rng);
    auto env = codec::cover(record, method, std::move(carrier), ctx.registry);
    return ProtocolMessage{kind, self, true, std::move(env.carrier.bytes), cause};
}

Outbound over_link(const ChState& s, const Neighbour& nb, MessageKind kind, const Bytes& record, Cause cause,
                   Context& ctx)
{
    const StegMethodId method = *nb.link.methods.lowest();
    return Outbound{nb.link.peer, Via::StegLink, covered_message(s.self_id, kind, record, method, cause, ctx)};
}

std::uint32_t neighbour_digest(const ChState& s)
{
    ByteWriter w;
    for (const auto& [id, nb] : s.neighbours)
        w.u64(id.value);
    const Bytes ids = w.take();
    return crc32(ids);
}

Bytes hello_record(const ChState& s, std::uint8_t flags)
{
    return records::Hello{s.self_id, flags, neighbour_digest(s), s.profile}.encode();
}

// The whole table to every neighbour, then drop the entries whose
// invalidation has now been announced.
Actions fanout(ChState& s, Cause cause, Context& ctx)
{
    Actions a;
    const records::RoutingUpdate update{s.self_id, s.routes.advertisement()};
    const Bytes record = update.encode();
    for (const auto& [id, nb] : s.neighbours)
        a.out.push_back(over_link(s, nb, MessageKind::RoutingUpdate, record, cause, ctx));
    if (s.routes.prune_unreachable() > 0)
        ++s.table_version;
    return a;
}

void touch(ChState& s) { ++s.table_version; }

// Creates our side of a steg-link to `peer`. Returns false when the underlay
// cannot reach it or no method is shared.
bool create_link(ChState& s, NodeId peer, CapabilityProfile peer_profile, Context& ctx, Actions& a)
{
    const CapabilityProfile common = capability_intersection(s.profile, peer_profile);
    if (common.empty() || peer == s.self_id)
        return false;
    auto quality = ctx.underlay.provision(s.self_id, peer);
    if (!quality) {
        a.notes.push_back({"provision_failed", peer, "-"});
        return false;
    }
    // The peer's first hello or update needs a round trip to reach us, so
    // liveness and route age start counting once that round trip is over.
    const Tick delay = std::max<Tick>(quality->delay, 1);
    const Tick settled = ctx.now + 2 * delay;
    StegLink link{s.self_id, peer, common, std::max<std::uint32_t>(quality->capacity, 1), delay, settled};
    s.neighbours[peer] = Neighbour{link, peer_profile};
    s.incompatible.erase(peer);
    s.pending_offers.erase(peer);
    routing::adopt_direct_route(s.routes, link, peer_profile, s.config.weights, settled);
    touch(s);
    a.notes.push_back({"link_up", peer,
                       "capacity=" + std::to_string(link.capacity) + " delay=" + std::to_string(link.delay) +
                           " methods=" + common.to_string()});
    return true;
}

void drop_neighbour(ChState& s, NodeId peer)
{
    s.neighbours.erase(peer);
    s.adverts.erase(peer);
    s.routes.invalidate_via(peer);
    touch(s);
}

} // namespace

ChState init_ch(NodeId self_id, CapabilityProfile profile, EngineConfig config, Tick now)
{
    if (profile.empty())
        throw EmptyProfile("cluster head " + to_string(self_id) + " has an empty capability profile");
    config.validate();
    ChState s;
    s.self_id = self_id;
    s.profile = profile;
    s.config = config;
    s.routes = routing::RoutingTable(self_id, profile, config.infinity_cost);
    for (auto kind : kAllTimers)
        s.due[static_cast<std::size_t>(kind)] = now + period_of(config, kind);
    return s;
}

Actions on_timer(ChState& s, TimerKind kind, Context& ctx)
{
    auto& due = s.due[static_cast<std::size_t>(kind)];
    if (due > ctx.now)
        throw TimerNotDue(std::string(to_string(kind)) + " timer due at " + std::to_string(due) + ", now " +
                          std::to_string(ctx.now));

    Actions a;
    switch (kind) {
    case TimerKind::RandomWalk: {
        const auto relays = ctx.underlay.relays(s.self_id);
        if (!relays.empty()) {
            const NodeId to = relays[ctx.rng.below(relays.size())];
            const Bytes beacon = records::Beacon{s.self_id, s.profile}.encode();
            a.out.push_back(Outbound{to, Via::UnderlayHop,
                                     covered_message(s.self_id, MessageKind::RandomWalkDiscovery, beacon,
                                                     ctx.registry.discovery_method(), Cause::Periodic, ctx)});
        }
        break;
    }
    case TimerKind::RoutingUpdate:
        a = fanout(s, Cause::Periodic, ctx);
        break;
    case TimerKind::Hello: {
        const Bytes record = hello_record(s, 0);
        for (const auto& [id, nb] : s.neighbours)
            a.out.push_back(over_link(s, nb, MessageKind::Hello, record, Cause::Periodic, ctx));
        break;
    }
    case TimerKind::ExpiryScan:
        a = expire_neighbours(s, ctx);
        break;
    }
    due = ctx.now + period_of(s.config, kind) + ctx.rng.inclusive(fluctuation_of(s.config, kind));
    return a;
}

Actions handle_random_walk(ChState& s, const ProtocolMessage& walk, Context& ctx)
{
    Actions a;
    // Beacons travel under the discovery method, which every CH can read.
    auto found = codec::find_steg_msg(walk.body, ctx.registry.all(), ctx.registry);
    std::optional<records::Beacon> beacon;
    if (found)
        beacon = records::Beacon::decode(found->payload);

    if (beacon && beacon->address != s.self_id) {
        const NodeId addr = beacon->address;
        auto nb = s.neighbours.find(addr);
        auto inc = s.incompatible.find(addr);
        const bool known = (nb != s.neighbours.end() && nb->second.profile == beacon->profile) ||
                           (inc != s.incompatible.end() && inc->second == beacon->profile);
        if (!known) {
            if (!capability_intersection(s.profile, beacon->profile).empty()) {
                if (create_link(s, addr, beacon->profile, ctx, a)) {
                    a.out.push_back(Outbound{addr, Via::StegLink,
                                             covered_message(s.self_id, MessageKind::Hello,
                                                             hello_record(s, records::Hello::kOffer),
                                                             *s.neighbours.at(addr).link.methods.lowest(),
                                                             Cause::Offer, ctx)});
                    a.merge(fanout(s, Cause::Walk, ctx));
                }
            } else {
                // Ask neighbours that can talk to the newcomer to
                // open the link on our behalf.
                const records::CreateStegLink req{s.self_id, addr, beacon->profile, 1, {s.self_id}};
                const Bytes record = req.encode();
                std::vector<const Neighbour*> targets;
                for (const auto& [id, n] : s.neighbours)
                    if (!capability_intersection(n.profile, beacon->profile).empty())
                        targets.push_back(&n);
                if (targets.empty())
                    for (const auto& [id, n] : s.neighbours)
                        targets.push_back(&n);
                for (const Neighbour* n : targets)
                    a.out.push_back(over_link(s, *n, MessageKind::CreateStegLink, record, Cause::Relay, ctx));
                a.notes.push_back({"incompatible", addr, "relays=" + std::to_string(targets.size())});
                if (!targets.empty())
                    s.incompatible[addr] = beacon->profile;
            }
        }
    }

    if (auto fwd = forward_random_walk(s.self_id, walk, s.config.forward_probability, ctx.rng, ctx.underlay))
        a.out.push_back(std::move(*fwd));
    return a;
}

Actions handle_message(ChState& s, const ProtocolMessage& msg, Context& ctx)
{
    if (msg.kind == MessageKind::RandomWalkDiscovery)
        return handle_random_walk(s, msg, ctx);

    Actions a;
    Bytes record;
    if (msg.covered) {
        auto found = codec::find_steg_msg(msg.body, s.profile, ctx.registry);
        if (!found) {
            a.notes.push_back({"undecodable", msg.transport_sender, std::string("kind=") + to_string(msg.kind)});
            return a;
        }
        record = std::move(found->payload);
    } else {
        record = msg.body;
    }

    auto malformed = [&] {
        a.notes.push_back({"malformed", msg.transport_sender, std::string("kind=") + to_string(msg.kind)});
        return std::move(a);
    };

    switch (msg.kind) {
    case MessageKind::Hello: {
        auto hello = records::Hello::decode(record);
        return hello ? handle_hello(s, *hello, ctx) : malformed();
    }
    case MessageKind::RoutingUpdate: {
        auto update = records::RoutingUpdate::decode(record);
        return update ? handle_routing_update(s, update->sender, update->entries, ctx) : malformed();
    }
    case MessageKind::CreateStegLink: {
        auto req = records::CreateStegLink::decode(record);
        return req ? relay_create_steg_link(s, *req, ctx) : malformed();
    }
    case MessageKind::Data: {
        auto data = records::Data::decode(record);
        return data ? handle_data(s, std::move(*data), ctx) : malformed();
    }
    default:
        a.notes.push_back({"ignored", msg.transport_sender, std::string("kind=") + to_string(msg.kind)});
        return a;
    }
}

Actions handle_hello(ChState& s, const records::Hello& hello, Context& ctx)
{
    Actions a;
    auto nb = s.neighbours.find(hello.sender);
    if (nb != s.neighbours.end() && hello.offer()) {
        // The peer rebuilt its side, possibly over a different route.
        if (!create_link(s, hello.sender, hello.profile, ctx, a))
            return a;
    } else if (nb != s.neighbours.end()) {
        nb->second.link.last_hello = ctx.now;
    } else if (hello.offer() || (hello.ack() && s.pending_offers.contains(hello.sender))) {
        if (!create_link(s, hello.sender, hello.profile, ctx, a))
            return a;
    } else {
        a.notes.push_back({"hello_ignored", hello.sender, "-"});
        return a;
    }

    if (hello.offer()) {
        const Neighbour& n = s.neighbours.at(hello.sender);
        a.out.push_back(over_link(s, n, MessageKind::Hello, hello_record(s, records::Hello::kAck), Cause::Offer, ctx));
    }
    return a;
}

Actions handle_routing_update(ChState& s, NodeId sender, const std::vector<routing::RouteEntry>& advertised,
                              Context& ctx)
{
    Actions a;
    auto nb = s.neighbours.find(sender);
    if (nb == s.neighbours.end()) {
        a.notes.push_back({"update_dropped", sender, "reason=not_neighbour"});
        return a;
    }
    auto sorted = advertised;
    std::sort(sorted.begin(), sorted.end(),
              [](const routing::RouteEntry& x, const routing::RouteEntry& y) { return x.destination < y.destination; });

    const bool changed = routing::merge_routing_update(s.routes, sender, nb->second.link, sorted, s.config.weights,
                                                       ctx.now, s.config.hop_ceiling);
    s.adverts[sender] = std::move(sorted);
    if (changed) {
        touch(s);
        a.notes.push_back({"table_changed", sender, "entries=" + std::to_string(s.routes.size())});
        a.merge(fanout(s, Cause::Update, ctx));
    }
    return a;
}

Actions expire_neighbours(ChState& s, Context& ctx)
{
    Actions a;
    std::vector<NodeId> expired;
    for (const auto& [id, nb] : s.neighbours)
        if (ctx.now > nb.link.last_hello && ctx.now - nb.link.last_hello > s.config.hello_timeout)
            expired.push_back(id);

    for (NodeId id : expired) {
        drop_neighbour(s, id);
        a.notes.push_back({"link_down", id, "reason=hello_timeout"});
    }
    if (s.routes.collect_stale(ctx.now, s.config.stale_after()))
        touch(s);
    if (!expired.empty())
        a.merge(fanout(s, Cause::Expiry, ctx));
    return a;
}

Actions detect_malicious_removal(ChState& s, NodeId removed, Tick observed_at, Context& ctx)
{
    Actions a;
    if (s.neighbours.contains(removed)) {
        drop_neighbour(s, removed);
        a.notes.push_back({"link_down", removed, "reason=malicious_removal"});
    }
    if (s.routes.invalidate(removed))
        touch(s);
    a.notes.push_back({"evidence", removed, "observed_at=" + std::to_string(observed_at)});
    a.merge(fanout(s, Cause::Triggered, ctx));
    return a;
}

Actions relay_create_steg_link(ChState& s, const records::CreateStegLink& req, Context& ctx)
{
    Actions a;
    const bool looped = std::find(req.visited.begin(), req.visited.end(), s.self_id) != req.visited.end();
    if (looped || req.new_ch == s.self_id) {
        a.notes.push_back({"relay_dropped", req.new_ch, "reason=visited"});
        return a;
    }
    if (s.neighbours.contains(req.new_ch))
        return a;

    const CapabilityProfile common = capability_intersection(s.profile, req.new_profile);
    if (!common.empty()) {
        s.pending_offers.insert(req.new_ch);
        a.out.push_back(Outbound{req.new_ch, Via::Direct,
                                 covered_message(s.self_id, MessageKind::Hello,
                                                 hello_record(s, records::Hello::kOffer), *common.lowest(),
                                                 Cause::Offer, ctx)});
        a.notes.push_back({"offer", req.new_ch, "via=" + to_string(req.sender)});
        return a;
    }

    if (req.depth >= s.config.relay_depth) {
        a.notes.push_back({"relay_dropped", req.new_ch, "reason=depth"});
        return a;
    }
    records::CreateStegLink next = req;
    next.sender = s.self_id;
    next.depth = static_cast<std::uint8_t>(req.depth + 1);
    next.visited.push_back(s.self_id);
    const Bytes record = next.encode();
    for (const auto& [id, nb] : s.neighbours)
        if (std::find(next.visited.begin(), next.visited.end(), id) == next.visited.end())
            a.out.push_back(over_link(s, nb, MessageKind::CreateStegLink, record, Cause::Relay, ctx));
    return a;
}

namespace {

Actions send_record(ChState& s, records::Data data, Context& ctx)
{
    Actions a;
    auto outcome = routing::send_data(s.routes, s.neighbours, s.adverts, data.destination, s.config.weights);
    if (!outcome.sent() || !outcome.method || data.ttl == 0) {
        a.notes.push_back({"no_path", data.destination, "origin=" + to_string(data.origin)});
        return a;
    }
    const NodeId hop = outcome.path->first_hop();
    data.sender = s.self_id;
    a.out.push_back(Outbound{hop, Via::StegLink,
                             covered_message(s.self_id, MessageKind::Data, data.encode(), *outcome.method,
                                             Cause::Data, ctx)});
    return a;
}

} // namespace

Actions originate_data(ChState& s, NodeId destination, Bytes payload, Context& ctx)
{
    records::Data data{s.self_id, s.self_id, destination, static_cast<std::uint8_t>(s.config.hop_ceiling),
                       std::move(payload)};
    if (destination == s.self_id) {
        Actions a;
        a.notes.push_back({"delivered", s.self_id, "origin=" + to_string(s.self_id)});
        return a;
    }
    return send_record(s, std::move(data), ctx);
}

Actions handle_data(ChState& s, records::Data data, Context& ctx)
{
    if (data.destination == s.self_id) {
        Actions a;
        a.notes.push_back({"delivered", data.origin, "bytes=" + std::to_string(data.payload.size())});
        return a;
    }
    if (data.ttl > 0)
        --data.ttl;
    return send_record(s, std::move(data), ctx);
}

std::optional<Outbound> forward_random_walk(NodeId self, const ProtocolMessage& walk, Micro pf, Rng& rng,
                                            const Underlay& underlay)
{
    const bool heads = static_cast<std::int64_t>(rng.below(Micro::kScale)) < pf.units;
    if (!heads)
        return std::nullopt;
    const auto relays = underlay.relays(self);
    if (relays.empty())
        return std::nullopt;
    ProtocolMessage copy = walk;
    copy.transport_sender = self;
    copy.cause = Cause::Forward;
    return Outbound{relays[rng.below(relays.size())], Via::UnderlayHop, std::move(copy)};
}

} // namespace stegmesh::engine
