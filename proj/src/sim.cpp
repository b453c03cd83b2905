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

#include "stegmesh/sim.hpp"

#include "stegmesh/errors.hpp"
#include "stegmesh/records.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace stegmesh::sim {

namespace {

constexpr std::uint64_t kClusterStream = 1ULL << 63;
constexpr std::uint64_t kAdversaryStream = 1ULL << 62;

std::string id_or_dash(const std::optional<NodeId>& id) { return id ? to_string(*id) : "-"; }

const char* via_name(engine::Via via)
{
    switch (via) {
    case engine::Via::UnderlayHop: return "hop";
    case engine::Via::StegLink: return "steglink";
    case engine::Via::Direct: return "direct";
    }
    return "?";
}

std::optional<std::vector<std::pair<std::string, std::string>>> split_detail(const std::string& text)
{
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        if (tok == "-")
            continue;
        const auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0)
            return std::nullopt;
        out.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
    }
    return out;
}

} // namespace

// --- trace -----------------------------------------------------------------

std::string TraceRecord::to_line() const
{
    std::string line = std::to_string(tick) + ' ' + std::to_string(seq) + ' ' + kind + ' ' + id_or_dash(src) +
                       ' ' + id_or_dash(dst) + ' ';
    if (detail.empty())
        return line + '-';
    auto sorted = detail;
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    bool first = true;
    for (const auto& [k, v] : sorted) {
        if (!first)
            line += ' ';
        line += k + '=' + v;
        first = false;
    }
    return line;
}

std::optional<TraceRecord> TraceRecord::parse(std::string_view line)
{
    std::istringstream in{std::string(line)};
    TraceRecord r;
    std::string src;
    std::string dst;
    if (!(in >> r.tick >> r.seq >> r.kind >> src >> dst))
        return std::nullopt;
    auto node = [](const std::string& s) -> std::optional<std::optional<NodeId>> {
        if (s == "-")
            return std::optional<NodeId>{};
        try {
            std::size_t used = 0;
            const auto v = std::stoull(s, &used);
            if (used != s.size())
                return std::nullopt;
            return std::optional<NodeId>{NodeId{v}};
        } catch (const std::exception&) {
            return std::nullopt;
        }
    };
    auto s = node(src);
    auto d = node(dst);
    if (!s || !d)
        return std::nullopt;
    r.src = *s;
    r.dst = *d;
    std::string rest;
    std::getline(in, rest);
    auto detail = split_detail(rest);
    if (!detail)
        return std::nullopt;
    r.detail = std::move(*detail);
    return r;
}

const std::string* TraceRecord::get(std::string_view key) const
{
    for (const auto& [k, v] : detail)
        if (k == key)
            return &v;
    return nullptr;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows)
{
    std::string out = "tick,ch_count,steglink_count,routing_entries,updates_sent,hellos_sent,walks_forwarded,"
                      "data_delivered\n";
    for (const auto& r : rows) {
        out += std::to_string(r.tick) + ',' + std::to_string(r.ch_count) + ',' + std::to_string(r.steglink_count) +
               ',' + std::to_string(r.routing_entries) + ',' + std::to_string(r.updates_sent) + ',' +
               std::to_string(r.hellos_sent) + ',' + std::to_string(r.walks_forwarded) + ',' +
               std::to_string(r.data_delivered) + '\n';
    }
    return out;
}

const char* to_string(AdversaryRecord::Outcome outcome)
{
    switch (outcome) {
    case AdversaryRecord::Outcome::Failed: return "failed";
    case AdversaryRecord::Outcome::Authorized: return "authorized";
    case AdversaryRecord::Outcome::Unauthorized: return "unauthorized";
    }
    return "?";
}

// --- report ----------------------------------------------------------------

std::string RunReport::delivery_ratio() const
{
    if (data_injected == 0)
        return "-";
    const auto units = static_cast<std::int64_t>((data_delivered * 2 * Micro::kScale + data_injected) /
                                                 (2 * data_injected));
    return Micro::from_units(units).to_string();
}

std::string RunReport::to_text() const
{
    using nlohmann::json;
    json j;
    j["seed"] = seed;
    j["scenario"] = {{"name", scenario_name}, {"digest", scenario_digest}};
    j["limit"] = limit;
    j["final_tick"] = final_tick;
    j["events_executed"] = events_executed;
    j["quiescence_tick"] = quiescence_tick ? json(*quiescence_tick) : json(nullptr);

    json tables_json = json::object();
    for (const auto& [ch, entries] : tables) {
        json arr = json::array();
        for (const auto& e : entries) {
            json methods = json::array();
            for (auto m : e.methods.ids())
                methods.push_back(m.value);
            arr.push_back({{"destination", e.destination.value},
                           {"next_hop", e.next_hop.value},
                           {"cost", e.metric.cost.to_string()},
                           {"hops", e.metric.hop_count},
                           {"methods", methods}});
        }
        tables_json[to_string(ch)] = arr;
    }
    j["tables"] = tables_json;
    j["messages"] = {{"sent", messages_sent},
                     {"delivered", messages_delivered},
                     {"dropped", messages_dropped},
                     {"pending", messages_pending},
                     {"sent_by_kind", sent_by_kind}};
    j["data"] = {{"injected", data_injected}, {"delivered", data_delivered}, {"delivery_ratio", delivery_ratio()}};
    j["intra_cluster"] = {{"sent", intra_sent}, {"opened", intra_opened}};
    j["adversary"] = {{"overheard", adversary.overheard},
                      {"attempts", adversary.attempts},
                      {"recovered_authorized", adversary.recovered_authorized},
                      {"recovered_unauthorized", adversary.recovered_unauthorized},
                      {"recovered_without_key", adversary.recovered_without_key}};
    return j.dump(2) + "\n";
}

// --- oracle ----------------------------------------------------------------

std::map<std::pair<NodeId, NodeId>, Metric> oracle_shortest_paths(const StegGraph& g)
{
    std::map<std::pair<NodeId, NodeId>, Metric> out;
    const Micro inf = g.infinity;
    for (NodeId src : g.nodes) {
        std::map<NodeId, Metric> dist;
        for (NodeId n : g.nodes)
            dist[n] = Metric::unreachable(inf);
        dist[src] = Metric::zero();
        using Item = std::tuple<Micro, std::uint32_t, NodeId>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        pq.emplace(Micro{}, 0, src);
        std::set<NodeId> done;
        while (!pq.empty()) {
            auto [cost, hops, u] = pq.top();
            pq.pop();
            if (!done.insert(u).second)
                continue;
            auto it = g.links.find(u);
            if (it == g.links.end())
                continue;
            for (const StegLink& l : it->second) {
                if (!dist.contains(l.peer))
                    continue;
                Metric step;
                try {
                    step = link_cost(l, g.weights, inf);
                } catch (const OverflowError&) {
                    continue;
                }
                const Metric cand = add(dist[u], step, inf);
                if (!cand.reachable(inf))
                    continue;
                const Metric& cur = dist[l.peer];
                if (cand.cost < cur.cost || (cand.cost == cur.cost && cand.hop_count < cur.hop_count)) {
                    dist[l.peer] = cand;
                    pq.emplace(cand.cost, cand.hop_count, l.peer);
                }
            }
        }
        for (const auto& [dst, m] : dist)
            out[{src, dst}] = m;
    }
    return out;
}

// --- world -----------------------------------------------------------------

World::World(const scenario::ScenarioSpec& spec, std::uint64_t seed)
    : spec_(spec), seed_(seed), adversary_rng_(Rng::stream(seed, kAdversaryStream))
{
    scenario::validate(spec_);

    std::set<NodeId> deferred;
    for (const auto& ev : spec_.events)
        if (const auto* a = std::get_if<scenario::AdmitSpec>(&ev.action))
            deferred.insert(a->node);

    std::vector<std::pair<NodeId, crypto::TrustValue>> border;
    for (const auto& n : spec_.nodes) {
        Node node;
        node.spec = n;
        node.active = !deferred.contains(n.id);
        node.rng = Rng::stream(seed, n.id.value);
        nodes_.emplace(n.id, std::move(node));
        if (n.role == NodeRole::Gateway)
            border.emplace_back(n.id, *n.trust);
    }
    for (NodeId gw : crypto::elect_gateways(border, spec_.gateway_threshold))
        nodes_.at(gw).gateway = true;

    for (const auto& e : spec_.edges) {
        adj_[e.a][e.b] = Edge{e.delay, e.capacity, false};
        adj_[e.b][e.a] = Edge{e.delay, e.capacity, false};
    }

    for (auto& [id, node] : nodes_) {
        const auto& s = node.spec;
        record("node", id, std::nullopt,
               {{"active", node.active ? "1" : "0"},
                {"cluster", std::to_string(s.cluster.value)},
                {"gateway", node.gateway ? "1" : "0"},
                {"profile", s.profile.to_string()},
                {"role", stegmesh::to_string(s.role)}});
    }
    for (auto& [id, node] : nodes_)
        if (node.active && node.spec.role == NodeRole::ClusterHead)
            start_ch(node);

    for (const auto& ev : spec_.events) {
        std::visit(
            [&](const auto& a) {
                using T = std::decay_t<decltype(a)>;
                if constexpr (std::is_same_v<T, FaultSpec>) {
                    inject_fault(a, ev.tick);
                } else if constexpr (std::is_same_v<T, scenario::AdmitSpec>) {
                    schedule(ev.tick, Admit{a.node}, true);
                } else if constexpr (std::is_same_v<T, scenario::EvictSpec>) {
                    schedule(ev.tick, Evict{a.node}, true);
                } else if constexpr (std::is_same_v<T, scenario::SendSpec>) {
                    for (std::uint32_t i = 0; i < a.count; ++i)
                        schedule(ev.tick + i * a.interval, SendData{a.from, a.to, a.bytes}, true);
                } else {
                    for (std::uint32_t i = 0; i < a.count; ++i)
                        schedule(ev.tick + i * a.interval, IntraSend{a.cluster, a.bytes}, true);
                }
            },
            ev.action);
    }
    schedule(spec_.defaults.routing_update_period, QuiesceCheck{}, false);
}

void World::schedule(Tick tick, Body body, bool scripted)
{
    if (scripted)
        ++scripted_pending_;
    queue_.push(Event{tick, next_seq_++, std::move(body), scripted});
}

void World::record(std::string kind, std::optional<NodeId> src, std::optional<NodeId> dst,
                   std::vector<std::pair<std::string, std::string>> detail)
{
    std::stable_sort(detail.begin(), detail.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    trace_.push_back(TraceRecord{clock_, trace_seq_++, std::move(kind), src, dst, std::move(detail)});
}

std::string World::trace_text() const
{
    std::string out;
    for (const auto& r : trace_) {
        out += r.to_line();
        out += '\n';
    }
    return out;
}

std::optional<Tick> World::next_tick() const
{
    if (queue_.empty())
        return std::nullopt;
    return queue_.top().tick;
}

bool World::usable(NodeId id) const
{
    auto it = nodes_.find(id);
    return it != nodes_.end() && it->second.active && !it->second.silenced;
}

bool World::route_ok(const std::vector<NodeId>& route) const
{
    if (route.empty())
        return false;
    for (NodeId n : route)
        if (!usable(n))
            return false;
    for (std::size_t i = 1; i < route.size(); ++i) {
        auto a = adj_.find(route[i - 1]);
        if (a == adj_.end())
            return false;
        auto e = a->second.find(route[i]);
        if (e == a->second.end() || e->second.cut)
            return false;
    }
    return true;
}

Tick World::route_delay(const std::vector<NodeId>& route) const
{
    Tick d = 0;
    for (std::size_t i = 1; i < route.size(); ++i)
        d += adj_.at(route[i - 1]).at(route[i]).delay;
    return d;
}

std::optional<std::vector<NodeId>> World::shortest_route(NodeId a, NodeId b) const
{
    if (!usable(a) || !usable(b))
        return std::nullopt;
    // Least total delay, then fewest hops, then lexicographically smallest
    // node sequence via ascending neighbour iteration.
    std::map<NodeId, std::pair<Tick, std::size_t>> best;
    std::map<NodeId, NodeId> prev;
    using Item = std::tuple<Tick, std::size_t, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    best[a] = {0, 0};
    pq.emplace(0, 0, a);
    std::set<NodeId> done;
    while (!pq.empty()) {
        auto [d, h, u] = pq.top();
        pq.pop();
        if (!done.insert(u).second)
            continue;
        if (u == b)
            break;
        auto it = adj_.find(u);
        if (it == adj_.end())
            continue;
        for (const auto& [v, e] : it->second) {
            if (e.cut || !usable(v) || done.contains(v))
                continue;
            const std::pair<Tick, std::size_t> cand{d + e.delay, h + 1};
            auto cur = best.find(v);
            if (cur == best.end() || cand < cur->second) {
                best[v] = cand;
                prev[v] = u;
                pq.emplace(cand.first, cand.second, v);
            }
        }
    }
    if (!done.contains(b))
        return std::nullopt;
    std::vector<NodeId> route{b};
    while (route.back() != a)
        route.push_back(prev.at(route.back()));
    std::reverse(route.begin(), route.end());
    return route;
}

std::optional<std::vector<NodeId>> World::frozen_route(NodeId from, NodeId to) const
{
    auto it = frozen_.find(std::minmax(from, to));
    if (it == frozen_.end())
        return std::nullopt;
    std::vector<NodeId> route = it->second;
    if (route.front() != from)
        std::reverse(route.begin(), route.end());
    return route;
}

std::vector<NodeId> World::relays(NodeId node) const
{
    std::vector<NodeId> out;
    auto it = adj_.find(node);
    if (it == adj_.end() || !usable(node))
        return out;
    for (const auto& [v, e] : it->second) {
        if (e.cut || !usable(v))
            continue;
        const Node& n = nodes_.at(v);
        if (n.ch || n.gateway)
            out.push_back(v);
    }
    return out;
}

std::optional<engine::LinkQuality> World::provision(NodeId a, NodeId b)
{
    auto existing = frozen_route(a, b);
    if (!existing || !route_ok(*existing)) {
        existing = shortest_route(a, b);
        if (!existing)
            return std::nullopt;
        auto stored = *existing;
        if (stored.front() != std::min(a, b))
            std::reverse(stored.begin(), stored.end());
        frozen_[std::minmax(a, b)] = std::move(stored);
    }
    const auto& route = *existing;
    engine::LinkQuality q;
    q.delay = std::max<Tick>(route_delay(route), 1);
    q.capacity = UINT32_MAX;
    for (std::size_t i = 1; i < route.size(); ++i)
        q.capacity = std::min(q.capacity, adj_.at(route[i - 1]).at(route[i]).capacity);
    return q;
}

void World::start_ch(Node& node)
{
    node.ch = engine::init_ch(node.spec.id, node.spec.profile, node.spec.config, clock_);
    for (auto kind : engine::kAllTimers)
        schedule(node.ch->due_at(kind), TimerFire{node.spec.id, kind}, false);

    const ClusterId cid = node.spec.cluster;
    if (!clusters_.contains(cid)) {
        Rng key_rng = Rng::stream(seed_, kClusterStream | cid.value);
        clusters_.emplace(cid, crypto::ClusterState::create(cid, node.spec.id, key_rng, spec_.rekey_on_eviction));
        record("cluster_key", node.spec.id, std::nullopt,
               {{"cluster", std::to_string(cid.value)}, {"key_id", std::to_string(clusters_.at(cid).key.key_id)}});
    }
    last_change_ = clock_;
    for (auto& [id, other] : nodes_)
        if (other.active && other.spec.cluster == cid && other.spec.role != NodeRole::ClusterHead)
            admit_to_cluster(id);
}

void World::admit_to_cluster(NodeId member)
{
    const Node& node = nodes_.at(member);
    auto it = clusters_.find(node.spec.cluster);
    if (it == clusters_.end())
        return; // the cluster head is not up yet; it admits us when it starts
    if (it->second.members.contains(member))
        return;
    const auto delivery = crypto::admit_member(it->second, member);
    record("admit_member", it->second.head, member,
           {{"cluster", std::to_string(delivery.cluster.value)}, {"key_id", std::to_string(delivery.key.key_id)}});
    deliver_key(delivery, it->second.head);
}

void World::deliver_key(const crypto::KeyDelivery& delivery, NodeId from)
{
    const records::KeyDelivery rec{delivery.cluster, delivery.key};
    send(from, engine::Outbound{delivery.to, engine::Via::Direct,
                                ProtocolMessage{MessageKind::KeyDelivery, from, false, rec.encode(), Cause::None}});
}

void World::send(NodeId from, engine::Outbound out)
{
    const std::uint64_t mid = next_mid_++;
    const ProtocolMessage& msg = out.message;
    ++sent_;
    ++sent_by_kind_[stegmesh::to_string(msg.kind)];
    if (msg.kind == MessageKind::RoutingUpdate)
        ++updates_sent_;
    if (msg.kind == MessageKind::Hello)
        ++hellos_sent_;
    if (msg.cause == Cause::Forward)
        ++walks_forwarded_;
    if (tap_)
        tap_(from, out.to, msg);

    std::optional<std::vector<NodeId>> route;
    switch (out.via) {
    case engine::Via::UnderlayHop:
        route = std::vector<NodeId>{from, out.to};
        break;
    case engine::Via::StegLink:
        route = frozen_route(from, out.to);
        break;
    case engine::Via::Direct:
        route = shortest_route(from, out.to);
        break;
    }

    record("send", from, out.to,
           {{"bytes", std::to_string(msg.body.size())},
            {"cause", stegmesh::to_string(msg.cause)},
            {"kind", stegmesh::to_string(msg.kind)},
            {"mid", std::to_string(mid)},
            {"via", via_name(out.via)}});

    if (!route || !route_ok(*route)) {
        ++dropped_;
        record("drop", from, out.to,
               {{"mid", std::to_string(mid)}, {"reason", route ? "route_down" : "no_route"}});
        return;
    }
    Deliver d{from, out.to, out.via, std::move(out.message), *route, mid};
    if (d.message.kind == MessageKind::IntraCluster)
        overhear(d, *route);
    const Tick at = clock_ + std::max<Tick>(route_delay(*route), 1);
    schedule(at, std::move(d), false);
}

void World::overhear(const Deliver& d, const std::vector<NodeId>& route)
{
    auto rec = records::IntraCluster::decode(d.message.body);
    if (!rec)
        return;
    for (auto& [eid, e] : nodes_) {
        if (!e.eavesdropper || !e.active || eid == d.to)
            continue;
        const bool in_range = std::any_of(route.begin(), route.end(), [&](NodeId hop) {
            if (hop == eid)
                return true;
            auto a = adj_.find(eid);
            return a != adj_.end() && a->second.contains(hop) && !a->second.at(hop).cut;
        });
        if (!in_range)
            continue;

        AdversaryRecord log;
        log.tick = clock_;
        log.eavesdropper = eid;
        log.mid = d.mid;
        log.cluster = rec->cluster;
        log.key_id = rec->key_id;
        for (const auto& [k, key] : e.keyring) {
            if (k.first != rec->cluster)
                continue;
            log.held_key_id = std::max(log.held_key_id, key.key_id);
            ++log.attempts;
            if (log.outcome == AdversaryRecord::Outcome::Failed && crypto::try_open_intra(rec->ciphertext, key))
                log.outcome = AdversaryRecord::Outcome::Authorized;
        }
        for (std::uint32_t g = 0; g < e.guesses && log.outcome == AdversaryRecord::Outcome::Failed; ++g) {
            crypto::ClusterKey guess;
            guess.key_id = rec->key_id;
            adversary_rng_.fill(guess.bytes);
            ++log.attempts;
            if (crypto::try_open_intra(rec->ciphertext, guess))
                log.outcome = AdversaryRecord::Outcome::Unauthorized;
        }
        adversary_.push_back(log);
        record("overhear", eid, d.to,
               {{"attempts", std::to_string(log.attempts)},
                {"key_id", std::to_string(log.key_id)},
                {"mid", std::to_string(d.mid)},
                {"outcome", to_string(log.outcome)}});
    }
}

engine::Actions World::with_engine(Node& node,
                                   const std::function<engine::Actions(engine::ChState&, engine::Context&)>& fn)
{
    engine::Context ctx{clock_, node.rng, *this, spec_.registry};
    const auto before = node.ch->table_version;
    auto actions = fn(*node.ch, ctx);
    if (node.ch->table_version != before)
        last_change_ = clock_;
    return actions;
}

void World::apply(NodeId from, engine::Actions actions)
{
    for (auto& note : actions.notes) {
        if (note.kind == "delivered")
            ++data_delivered_;
        record(note.kind, from, note.peer, split_detail(note.detail).value());
    }
    for (auto& out : actions.out)
        send(from, std::move(out));
}

Executed World::step()
{
    if (queue_.empty())
        throw EmptyQueue("no pending events");
    Event ev = queue_.top();
    queue_.pop();
    if (ev.scripted)
        --scripted_pending_;
    clock_ = std::max(clock_, ev.tick);
    ++executed_;

    Executed done{ev.tick, ev.seq, ""};
    std::visit(
        [&](auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Deliver>) {
                done.kind = "deliver";
                on_deliver(b);
            } else if constexpr (std::is_same_v<T, TimerFire>) {
                done.kind = "timer";
                Node& n = nodes_.at(b.node);
                if (!usable(b.node) || !n.ch)
                    return;
                const auto kind = b.kind;
                auto actions = with_engine(n, [&](auto& s, auto& ctx) { return engine::on_timer(s, kind, ctx); });
                schedule(n.ch->due_at(kind), TimerFire{b.node, kind}, false);
                apply(b.node, std::move(actions));
            } else if constexpr (std::is_same_v<T, FaultEvent>) {
                done.kind = "fault";
                on_fault(b.fault);
            } else if constexpr (std::is_same_v<T, Admit>) {
                done.kind = "admit";
                Node& n = nodes_.at(b.node);
                if (n.active)
                    return;
                n.active = true;
                record("admit", b.node, std::nullopt, {{"role", stegmesh::to_string(n.spec.role)}});
                if (n.spec.role == NodeRole::ClusterHead)
                    start_ch(n);
                else
                    admit_to_cluster(b.node);
            } else if constexpr (std::is_same_v<T, Evict>) {
                done.kind = "evict";
                const Node& n = nodes_.at(b.node);
                auto it = clusters_.find(n.spec.cluster);
                if (it == clusters_.end() || !it->second.members.contains(b.node)) {
                    record("evict_ignored", b.node, std::nullopt, {{"reason", "not_member"}});
                    return;
                }
                Rng& rng = nodes_.at(it->second.head).rng;
                const auto deliveries = crypto::evict_member(it->second, b.node, rng);
                record("evict", it->second.head, b.node,
                       {{"cluster", std::to_string(n.spec.cluster.value)},
                        {"key_id", std::to_string(it->second.key.key_id)}});
                for (const auto& dl : deliveries)
                    deliver_key(dl, it->second.head);
            } else if constexpr (std::is_same_v<T, Evidence>) {
                done.kind = "evidence";
                Node& n = nodes_.at(b.node);
                if (!usable(b.node) || !n.ch)
                    return;
                const auto removed = b.removed;
                const auto observed = b.observed_at;
                auto actions = with_engine(n, [&](auto& s, auto& ctx) {
                    return engine::detect_malicious_removal(s, removed, observed, ctx);
                });
                apply(b.node, std::move(actions));
            } else if constexpr (std::is_same_v<T, SendData>) {
                done.kind = "send_data";
                Node& n = nodes_.at(b.from);
                ++data_injected_;
                if (!usable(b.from) || !n.ch) {
                    record("no_path", b.from, b.to, {{"reason", "source_down"}});
                    return;
                }
                Bytes payload(b.bytes);
                n.rng.fill(payload);
                const auto to = b.to;
                auto actions = with_engine(n, [&](auto& s, auto& ctx) {
                    return engine::originate_data(s, to, std::move(payload), ctx);
                });
                apply(b.from, std::move(actions));
            } else if constexpr (std::is_same_v<T, IntraSend>) {
                done.kind = "intra_send";
                auto it = clusters_.find(b.cluster);
                if (it == clusters_.end() || it->second.members.empty() || !usable(it->second.head))
                    return;
                Node& head = nodes_.at(it->second.head);
                const std::vector<NodeId> members(it->second.members.begin(), it->second.members.end());
                const NodeId to = members[head.round_robin++ % members.size()];
                Bytes payload(b.bytes);
                head.rng.fill(payload);
                const records::IntraCluster rec{b.cluster, it->second.key.key_id,
                                                crypto::seal_intra(payload, it->second.key, ++head.nonce)};
                ++intra_sent_;
                send(it->second.head,
                     engine::Outbound{to, engine::Via::Direct,
                                      ProtocolMessage{MessageKind::IntraCluster, it->second.head, false, rec.encode(),
                                                      Cause::None}});
            } else {
                done.kind = "quiesce_check";
                on_quiesce_check();
            }
        },
        ev.body);
    return done;
}

void World::on_deliver(Deliver& d)
{
    if (!route_ok(d.route)) {
        ++dropped_;
        record("drop", d.from, d.to, {{"mid", std::to_string(d.mid)}, {"reason", "route_down"}});
        return;
    }
    ++delivered_;
    record("deliver", d.from, d.to,
           {{"kind", stegmesh::to_string(d.message.kind)}, {"mid", std::to_string(d.mid)}});

    Node& n = nodes_.at(d.to);
    ProtocolMessage msg = std::move(d.message);
    msg.transport_sender = d.from;

    if (n.ch) {
        auto actions = with_engine(n, [&](auto& s, auto& ctx) { return engine::handle_message(s, msg, ctx); });
        apply(d.to, std::move(actions));
        return;
    }

    switch (msg.kind) {
    case MessageKind::RandomWalkDiscovery:
        if (n.gateway) {
            if (auto fwd = engine::forward_random_walk(d.to, msg, spec_.defaults.forward_probability, n.rng, *this))
                send(d.to, std::move(*fwd));
        }
        return;
    case MessageKind::KeyDelivery: {
        auto rec = records::KeyDelivery::decode(msg.body);
        if (!rec)
            return;
        n.keyring[{rec->cluster, rec->key.key_id}] = rec->key;
        record("key_installed", d.to, d.from,
               {{"cluster", std::to_string(rec->cluster.value)}, {"key_id", std::to_string(rec->key.key_id)}});
        return;
    }
    case MessageKind::IntraCluster: {
        auto rec = records::IntraCluster::decode(msg.body);
        if (!rec)
            return;
        auto key = n.keyring.find({rec->cluster, rec->key_id});
        const bool ok = key != n.keyring.end() && crypto::try_open_intra(rec->ciphertext, key->second).has_value();
        if (ok)
            ++intra_opened_;
        record("intra_open", d.to, d.from,
               {{"key_id", std::to_string(rec->key_id)}, {"mid", std::to_string(d.mid)}, {"ok", ok ? "1" : "0"}});
        return;
    }
    default:
        return;
    }
}

void World::inject_fault(const FaultSpec& fault, Tick at)
{
    if (at < clock_)
        throw std::invalid_argument("fault scheduled in the past (tick " + std::to_string(at) + ", clock " +
                                    std::to_string(clock_) + ")");
    if (!nodes_.contains(fault.node))
        throw UnknownTarget("fault targets unknown node " + to_string(fault.node));
    if (fault.kind == FaultSpec::Kind::LinkCut) {
        auto a = adj_.find(fault.node);
        if (a == adj_.end() || !a->second.contains(fault.peer))
            throw UnknownTarget("no underlay edge " + to_string(fault.node) + "-" + to_string(fault.peer));
    }
    schedule(at, FaultEvent{fault}, true);
}

void World::on_fault(const FaultSpec& f)
{
    Node& node = nodes_.at(f.node);
    switch (f.kind) {
    case FaultSpec::Kind::BenignChDeparture:
        node.silenced = true;
        record("fault", f.node, std::nullopt, {{"kind", scenario::to_string(f.kind)}});
        break;
    case FaultSpec::Kind::MaliciousChRemoval: {
        std::set<NodeId> witnesses;
        if (node.ch)
            for (const auto& [peer, nb] : node.ch->neighbours)
                witnesses.insert(peer);
        for (const auto& [id, other] : nodes_)
            if (other.ch && other.ch->neighbours.contains(f.node))
                witnesses.insert(id);
        node.silenced = true;
        record("fault", f.node, std::nullopt,
               {{"kind", scenario::to_string(f.kind)}, {"witnesses", std::to_string(witnesses.size())}});
        for (NodeId w : witnesses)
            if (usable(w))
                schedule(clock_ + 1, Evidence{w, f.node, clock_}, true);
        break;
    }
    case FaultSpec::Kind::LinkCut:
        adj_.at(f.node).at(f.peer).cut = true;
        adj_.at(f.peer).at(f.node).cut = true;
        record("fault", f.node, f.peer, {{"kind", scenario::to_string(f.kind)}});
        break;
    case FaultSpec::Kind::Eavesdropper:
        node.eavesdropper = true;
        node.guesses = f.guesses;
        record("fault", f.node, std::nullopt,
               {{"guesses", std::to_string(f.guesses)}, {"kind", scenario::to_string(f.kind)}});
        break;
    }
    last_change_ = clock_;
}

void World::on_quiesce_check()
{
    sample_metrics();
    const Tick window = 3 * spec_.defaults.routing_update_period;
    if (!quiescent_at_ && scripted_pending_ == 0 && clock_ >= last_change_ + window) {
        quiescent_at_ = clock_;
        record("quiescent", std::nullopt, std::nullopt, {{"last_change", std::to_string(last_change_)}});
    }
    schedule(clock_ + spec_.defaults.routing_update_period, QuiesceCheck{}, false);
}

void World::sample_metrics()
{
    MetricsRow row;
    row.tick = clock_;
    std::set<std::pair<NodeId, NodeId>> links;
    for (NodeId id : active_chs()) {
        const auto& s = *nodes_.at(id).ch;
        ++row.ch_count;
        row.routing_entries += s.routes.reachable_count();
        for (const auto& [peer, nb] : s.neighbours)
            links.insert(std::minmax(id, peer));
    }
    row.steglink_count = links.size();
    row.updates_sent = updates_sent_;
    row.hellos_sent = hellos_sent_;
    row.walks_forwarded = walks_forwarded_;
    row.data_delivered = data_delivered_;
    metrics_.push_back(row);
}

std::vector<NodeId> World::active_chs() const
{
    std::vector<NodeId> out;
    for (const auto& [id, n] : nodes_)
        if (n.ch && usable(id))
            out.push_back(id);
    return out;
}

const engine::ChState* World::ch(NodeId id) const
{
    auto it = nodes_.find(id);
    return it == nodes_.end() || !it->second.ch ? nullptr : &*it->second.ch;
}

const crypto::ClusterState* World::cluster(ClusterId id) const
{
    auto it = clusters_.find(id);
    return it == clusters_.end() ? nullptr : &it->second;
}

bool World::is_gateway(NodeId id) const
{
    auto it = nodes_.find(id);
    return it != nodes_.end() && it->second.gateway;
}

StegGraph World::steg_link_graph() const
{
    StegGraph g;
    g.weights = spec_.defaults.weights;
    g.infinity = spec_.defaults.infinity_cost;
    g.nodes = active_chs();
    for (NodeId id : g.nodes) {
        auto& out = g.links[id];
        for (const auto& [peer, nb] : nodes_.at(id).ch->neighbours)
            if (usable(peer) && nodes_.at(peer).ch)
                out.push_back(nb.link);
    }
    return g;
}

AdversarySummary World::adversary_summary() const
{
    AdversarySummary s;
    for (const auto& r : adversary_) {
        ++s.overheard;
        s.attempts += r.attempts;
        if (r.outcome == AdversaryRecord::Outcome::Authorized)
            ++s.recovered_authorized;
        if (r.outcome == AdversaryRecord::Outcome::Unauthorized)
            ++s.recovered_unauthorized;
        if (r.outcome != AdversaryRecord::Outcome::Failed && r.key_id > r.held_key_id)
            ++s.recovered_without_key;
    }
    return s;
}

RunReport World::report(Tick limit) const
{
    RunReport r;
    r.seed = seed_;
    r.scenario_name = spec_.name;
    r.scenario_digest = scenario::digest(spec_);
    r.limit = limit;
    r.final_tick = clock_;
    r.events_executed = executed_;
    r.quiescence_tick = quiescent_at_;
    for (NodeId id : active_chs())
        r.tables[id] = nodes_.at(id).ch->routes.advertisement();
    r.sent_by_kind = sent_by_kind_;
    r.messages_sent = sent_;
    r.messages_delivered = delivered_;
    r.messages_dropped = dropped_;
    r.messages_pending = sent_ - delivered_ - dropped_;
    r.data_injected = data_injected_;
    r.data_delivered = data_delivered_;
    r.intra_sent = intra_sent_;
    r.intra_opened = intra_opened_;
    r.adversary = adversary_summary();
    return r;
}

RunReport World::run_until(const RunOptions& options)
{
    while (!queue_.empty() && queue_.top().tick <= options.limit) {
        step();
        if (options.stop_at_quiescence && quiescent_at_)
            break;
    }
    if (metrics_.empty() || metrics_.back().tick != clock_)
        sample_metrics();
    return report(options.limit);
}

} // namespace stegmesh::sim
