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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [--regenerate-golden]
//
// Golden files live in tests/golden; regenerate them only after an intended
// change to the trace or report format.

#include "fixtures.hpp"
#include "stegmesh/checksum.hpp"
#include "stegmesh/cli.hpp"
#include "stegmesh/codec.hpp"
#include "stegmesh/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

using namespace stegmesh;
namespace fs = std::filesystem;
using scenario::FaultSpec;
using scenario::ScenarioSpec;
using sim::TraceRecord;
using sim::World;

namespace {

const fs::path kRoot = STEGMESH_SOURCE_DIR;
const fs::path kScenarios = kRoot / "scenarios";
const fs::path kGolden = kRoot / "tests" / "golden";
bool g_regenerate = false;

struct Result {
    bool pass = false;
    std::string detail;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

bool all_pairs_routable(const World& w)
{
    const auto chs = w.active_chs();
    for (NodeId a : chs)
        for (NodeId b : chs) {
            if (a == b)
                continue;
            const auto* e = w.ch(a)->routes.find(b);
            if (!e || !e->reachable(w.ch(a)->routes.infinity()))
                return false;
        }
    return true;
}

bool forgotten(const World& w, NodeId at, NodeId removed)
{
    const auto* e = w.ch(at)->routes.find(removed);
    return !e || !e->reachable(w.ch(at)->routes.infinity());
}

// Steps until the next event is past `limit` or `done` holds. Returns the tick
// at which `done` first held.
std::optional<Tick> step_until(World& w, Tick limit, const std::function<bool(const World&)>& done)
{
    if (done(w))
        return w.clock();
    while (!w.idle() && *w.next_tick() <= limit) {
        w.step();
        if (done(w))
            return w.clock();
    }
    return std::nullopt;
}

// --- 1 ---------------------------------------------------------------------

ScenarioSpec c1_topology(std::uint64_t index)
{
    Rng rng = Rng::stream(0xC1, index);
    ScenarioSpec s = fixtures::base("c1_" + std::to_string(index), 6);
    const int n = 3 + static_cast<int>(rng.below(8));
    for (int i = 1; i <= n; ++i) {
        CapabilityProfile p;
        const int size = 1 + static_cast<int>(rng.below(4));
        while (p.size() < size)
            p.insert(StegMethodId{static_cast<std::uint8_t>(rng.below(6))});
        fixtures::add_ch(s, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(i), p);
    }
    std::set<std::pair<std::uint64_t, std::uint64_t>> present;
    auto edge = [&](std::uint64_t a, std::uint64_t b) {
        if (!present.insert(std::minmax(a, b)).second)
            return;
        fixtures::add_edge(s, a, b, 1 + rng.below(8), static_cast<std::uint32_t>(1 + rng.below(16)));
    };
    for (int i = 2; i <= n; ++i)
        edge(1 + rng.below(static_cast<std::uint64_t>(i - 1)), static_cast<std::uint64_t>(i));
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
            if (rng.below(100) < 30)
                edge(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
    return s;
}

Result criterion1()
{
    const auto start = std::chrono::steady_clock::now();
    int exact = 0;
    std::size_t pairs = 0;
    std::size_t links = 0;
    std::string first_problem;
    for (std::uint64_t i = 0; i < 200; ++i) {
        World w(c1_topology(i), i + 1);
        w.run_until({100'000, true});
        std::string problem;
        if (!w.quiescence_tick())
            problem = "no quiescence";
        else
            problem = cli::compare_with_oracle(w);
        if (problem.empty())
            problem = cli::find_routing_loop(w);
        if (problem.empty()) {
            ++exact;
            const auto chs = w.active_chs();
            pairs += chs.size() * (chs.size() - 1);
            for (NodeId id : chs)
                links += w.ch(id)->neighbours.size();
        } else if (first_problem.empty()) {
            first_problem = "topology " + std::to_string(i) + ": " + problem;
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream d;
    d << exact << "/200 topologies exact (" << pairs << " ordered CH pairs, " << links / 2 << " steg-links), "
      << static_cast<int>(secs * 10) / 10.0 << " s";
    if (!first_problem.empty())
        d << "; first mismatch: " << first_problem;
    return {exact == 200 && secs < 30.0, d.str()};
}

// --- 2 ---------------------------------------------------------------------

// Five CHs on an underlay ring; the 3-4 hop runs through an elected gateway
// pair so walks also cross non-CH relays.
ScenarioSpec c2_topology()
{
    ScenarioSpec s = fixtures::base("c2_ring", 4);
    s.defaults.forward_probability = Micro::parse("0.7").value();
    s.defaults.fluctuation_rw = 0;
    s.defaults.fluctuation_ru = 0;
    s.defaults.fluctuation_h = 0;
    fixtures::add_ch(s, 1, 1, {0, 1});
    fixtures::add_ch(s, 2, 2, {1, 2});
    fixtures::add_ch(s, 3, 3, {0, 2});
    fixtures::add_ch(s, 4, 4, {0, 1, 3});
    fixtures::add_ch(s, 5, 5, {1, 2, 3});
    fixtures::add_gateway(s, 31, 3, {0}, "0.9");
    fixtures::add_gateway(s, 41, 4, {0}, "0.9");
    fixtures::add_edge(s, 1, 2, 1, 4);
    fixtures::add_edge(s, 2, 3, 2, 2);
    fixtures::add_edge(s, 3, 31, 1, 8);
    fixtures::add_edge(s, 31, 41, 1, 8);
    fixtures::add_edge(s, 41, 4, 1, 8);
    fixtures::add_edge(s, 4, 5, 1, 1);
    fixtures::add_edge(s, 5, 1, 3, 2);
    fixtures::sync_config(s);
    return s;
}

Result criterion2()
{
    const ScenarioSpec spec = c2_topology();
    const Tick deadline = 10 * spec.defaults.random_walk_period;
    int ok = 0;
    Tick worst = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        World w(spec, seed);
        auto t = step_until(w, deadline - 1, all_pairs_routable);
        if (t) {
            ++ok;
            worst = std::max(worst, *t);
        }
    }
    std::ostringstream d;
    d << ok << "/100 seeds had all 10 pairs mutually routable before tick " << deadline
      << " (slowest success at tick " << worst << "); need >= 95";
    return {ok >= 95, d.str()};
}

// --- 3 ---------------------------------------------------------------------

bool has(const std::vector<TraceRecord>& trace, std::string_view kind, std::uint64_t src, std::uint64_t dst,
         std::string_view key = {}, std::string_view value = {})
{
    return std::any_of(trace.begin(), trace.end(), [&](const TraceRecord& r) {
        if (r.kind != kind || r.src != NodeId{src} || r.dst != NodeId{dst})
            return false;
        if (key.empty())
            return true;
        const auto* v = r.get(key);
        return v && *v == value;
    });
}

Result criterion3()
{
    World w(scenario::load_scenario(kScenarios / "relay_join.scn"), 1);
    w.run_until({5000, true});
    const auto& t = w.trace();
    std::vector<std::string> problems;
    if (!w.quiescence_tick())
        problems.push_back("no quiescence");
    if (!has(t, "incompatible", 1, 3))
        problems.push_back("CH1 never flagged the new CH as incompatible");
    if (!has(t, "send", 1, 2, "kind", "create_steg_link"))
        problems.push_back("no Create_steg_link from CH1 to CH2");
    if (!has(t, "offer", 2, 3, "via", "1"))
        problems.push_back("CH2 did not offer on CH1's behalf");
    if (!has(t, "link_up", 2, 3) || !has(t, "link_up", 3, 2))
        problems.push_back("no steg-link new<->CH2");
    if (has(t, "link_up", 1, 3) || has(t, "link_up", 3, 1))
        problems.push_back("unexpected link CH1<->new");
    if (auto p = cli::compare_with_oracle(w); !p.empty())
        problems.push_back(p);
    const auto* to1 = w.ch(NodeId{3})->routes.find(NodeId{1});
    if (!to1 || to1->next_hop != NodeId{2})
        problems.push_back("new CH does not reach CH1 through CH2");

    const fs::path golden = kGolden / "relay_join_seed1.trace";
    if (g_regenerate)
        spit(golden, w.trace_text());
    const bool golden_ok = slurp(golden) == w.trace_text();
    if (!golden_ok)
        problems.push_back("trace differs from " + golden.filename().string());

    if (!problems.empty())
        return {false, problems.front()};
    std::ostringstream d;
    d << "relay 1->2, link 2<->3, oracle-exact at tick " << *w.quiescence_tick() << ", cost 3->1 "
      << to1->metric.cost.to_string() << ", golden trace matches (" << t.size() << " records)";
    return {true, d.str()};
}

// --- 4 ---------------------------------------------------------------------

// Underlay line 3 - 1 - 2 - 4. Cutting 1-2 partitions the pair, and the
// profiles keep 1-4 and 2-3 incompatible, so each endpoint loses exactly one
// steg-link and cannot rediscover the other.
ScenarioSpec c4_topology(std::uint64_t seed)
{
    ScenarioSpec s = fixtures::base("c4_bridge", 3);
    Rng rng = Rng::stream(0xC4, seed);
    s.defaults.forward_probability = Micro::from_units(static_cast<std::int64_t>(300'000 + rng.below(600'001)));
    fixtures::add_ch(s, 1, 1, {0, 1});
    fixtures::add_ch(s, 2, 2, {1, 2});
    fixtures::add_ch(s, 3, 3, {0});
    fixtures::add_ch(s, 4, 4, {2});
    fixtures::add_edge(s, 3, 1, 1 + rng.below(3), 2);
    fixtures::add_edge(s, 1, 2, 1 + rng.below(3), 2);
    fixtures::add_edge(s, 2, 4, 1 + rng.below(3), 2);
    fixtures::sync_config(s);
    return s;
}

Result criterion4()
{
    int ok = 0;
    std::string first_problem;
    Tick worst_margin = UINT64_MAX;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const ScenarioSpec spec = c4_topology(seed);
        const auto& c = spec.defaults;
        World w(spec, seed);
        const auto linked = step_until(w, 5000, [](const World& world) {
            return world.ch(NodeId{1})->neighbours.contains(NodeId{2}) &&
                   world.ch(NodeId{2})->neighbours.contains(NodeId{1});
        });
        std::string problem;
        if (!linked)
            problem = "1-2 never linked";
        const Tick cut = (linked ? *linked : w.clock()) + 50 + seed % 17;
        w.run_until({cut - 1, false});
        w.inject_fault({FaultSpec::Kind::LinkCut, NodeId{1}, NodeId{2}}, cut);
        const Tick bound = cut + c.hello_timeout + c.hello_period + c.fluctuation_h;
        w.run_until({bound + 200, false});

        for (std::uint64_t end : {1, 2}) {
            const std::uint64_t other = end == 1 ? 2 : 1;
            std::optional<Tick> removed;
            std::set<Tick> expiry_fanouts;
            for (const auto& r : w.trace()) {
                if (r.tick < cut || r.src != NodeId{end})
                    continue;
                if (!removed && r.kind == "link_down" && r.dst == NodeId{other})
                    removed = r.tick;
                const auto* cause = r.get("cause");
                if (r.kind == "send" && cause && *cause == "expiry")
                    expiry_fanouts.insert(r.tick);
            }
            if (problem.empty() && !removed)
                problem = "CH" + std::to_string(end) + " never removed CH" + std::to_string(other);
            else if (problem.empty() && *removed > bound)
                problem = "CH" + std::to_string(end) + " removed at " + std::to_string(*removed) + " > bound " +
                          std::to_string(bound);
            else if (problem.empty() && expiry_fanouts.size() != 1)
                problem = "CH" + std::to_string(end) + " sent " + std::to_string(expiry_fanouts.size()) +
                          " expiry fanouts";
            if (removed && *removed <= bound)
                worst_margin = std::min(worst_margin, bound - *removed);
        }
        if (problem.empty())
            ++ok;
        else if (first_problem.empty())
            first_problem = "seed " + std::to_string(seed) + ": " + problem;
    }
    std::ostringstream d;
    d << ok << "/50 seeds: both endpoints removed the peer within T+timeout+hp+fh (tightest margin " << worst_margin
      << " ticks) with exactly one expiry fanout";
    if (!first_problem.empty())
        d << "; " << first_problem;
    return {ok == 50, d.str()};
}

// --- 5 ---------------------------------------------------------------------

// Tick at which every remaining CH has dropped or poisoned `removed`.
std::optional<Tick> propagation(const ScenarioSpec& spec, std::uint64_t seed, FaultSpec::Kind kind, Tick at,
                                std::string& problem)
{
    World w(spec, seed);
    w.run_until({at - 1, false});
    const NodeId removed{3};
    for (NodeId id : w.active_chs())
        if (id != removed && forgotten(w, id, removed))
            problem = "CH " + to_string(id) + " had no route to the victim before the fault";
    w.inject_fault({kind, removed, NodeId{}}, at);
    return step_until(w, at + 2000, [&](const World& world) {
        if (world.clock() < at)
            return false;
        for (NodeId id : world.active_chs())
            if (id != removed && !forgotten(world, id, removed))
                return false;
        return true;
    });
}

Result criterion5()
{
    const auto spec = scenario::load_scenario(kScenarios / "malicious_removal.scn");
    auto quiet = spec;
    quiet.events.clear();
    int ok = 0;
    Tick worst_malicious = 0;
    Tick best_benign = UINT64_MAX;
    std::string first_problem;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const Tick at = 400 + seed % 13;
        std::string problem;
        auto m = propagation(quiet, seed, FaultSpec::Kind::MaliciousChRemoval, at, problem);
        auto b = propagation(quiet, seed, FaultSpec::Kind::BenignChDeparture, at, problem);
        if (problem.empty() && (!m || !b))
            problem = "removal never propagated";
        if (problem.empty() && !(*m < *b))
            problem = "malicious " + std::to_string(*m - at) + " ticks vs benign " + std::to_string(*b - at);
        if (problem.empty()) {
            ++ok;
            worst_malicious = std::max(worst_malicious, *m - at);
            best_benign = std::min(best_benign, *b - at);
        } else if (first_problem.empty()) {
            first_problem = "seed " + std::to_string(seed) + ": " + problem;
        }
    }
    std::ostringstream d;
    d << ok << "/50 seeds malicious strictly earlier (malicious at most +" << worst_malicious
      << " ticks, benign at least +" << best_benign << ")";
    if (!first_problem.empty())
        d << "; " << first_problem;
    return {ok == 50, d.str()};
}

// --- 6 ---------------------------------------------------------------------

ScenarioSpec c6_big_ids()
{
    ScenarioSpec s = fixtures::base("c6_big_ids", 4);
    const std::uint64_t ids[] = {0x5EED0000DEADBEEFULL, 0x0123456789ABCDEFULL, 0xFEDCBA9876543210ULL,
                                 0x00000000CAFEF00DULL};
    for (std::size_t i = 0; i < 4; ++i)
        fixtures::add_ch(s, ids[i], i + 1, {0, static_cast<int>(1 + i % 3)});
    for (std::size_t i = 0; i < 4; ++i)
        fixtures::add_edge(s, ids[i], ids[(i + 1) % 4], 1 + i, 2);
    s.events.push_back({200, scenario::SendSpec{NodeId{ids[0]}, NodeId{ids[2]}, 32, 10, 3}});
    return s;
}

std::string scan_walks(const ScenarioSpec& spec, std::uint64_t seed, std::size_t& walks)
{
    World w(spec, seed);
    std::string problem;
    std::set<NodeId> ids;
    for (const auto& n : spec.nodes)
        ids.insert(n.id);
    w.set_wire_tap([&](NodeId, NodeId, const ProtocolMessage& msg) {
        if (msg.kind != MessageKind::RandomWalkDiscovery)
            return;
        ++walks;
        const Bytes wire = wire_bytes(msg);
        auto found = codec::find_steg_msg(msg.body, spec.registry.all(), spec.registry);
        auto beacon = found ? records::Beacon::decode(found->payload) : std::nullopt;
        if (!beacon && problem.empty())
            problem = "walk without a decodable beacon";
        for (NodeId id : ids) {
            Bytes be;
            ByteWriter(be).u64(id.value);
            Bytes le(be.rbegin(), be.rend());
            for (const Bytes* pat : {&be, &le})
                if (std::search(wire.begin(), wire.end(), pat->begin(), pat->end()) != wire.end() && problem.empty())
                    problem = "node id " + to_string(id) + " visible in a walk";
        }
    });
    w.run_until({3000, true});
    return problem;
}

Result criterion6()
{
    const MethodRegistry reg = MethodRegistry::standard(6);
    Rng rng(0xC6);
    std::string problem;
    for (int i = 0; i < 10'000 && problem.empty(); ++i) {
        const StegMethodId m{static_cast<std::uint8_t>(rng.below(6))};
        const CarrierKind kind = reg.find(m)->codec;
        Bytes payload(rng.below(64));
        rng.fill(payload);
        auto carrier = codec::make_carrier(kind, payload.size() + rng.below(40), rng);
        const std::size_t len = carrier.bytes.size();
        Key256 key{};
        rng.fill(key);
        const bool keyed = rng.below(2) == 0;
        const auto env = codec::cover(payload, m, std::move(carrier), reg, keyed ? &key : nullptr);
        if (env.carrier.bytes.size() != len)
            problem = "length changed in case " + std::to_string(i);
        const auto got = codec::find_steg_msg(env.carrier.bytes, reg.all(), reg, keyed ? &key : nullptr);
        if (problem.empty() && (!got || got->method != m || got->payload != payload))
            problem = "round trip failed in case " + std::to_string(i);
    }
    int false_accepts = 0;
    for (int i = 0; i < 100'000; ++i) {
        Bytes c(64);
        rng.fill(c);
        if (codec::find_steg_msg(c, reg.all(), reg))
            ++false_accepts;
    }
    if (problem.empty() && false_accepts != 0)
        problem = std::to_string(false_accepts) + " random carriers accepted";

    std::size_t walks = 0;
    if (problem.empty())
        problem = scan_walks(scenario::load_scenario(kScenarios / "two_clusters.scn"), 7, walks);
    if (problem.empty())
        problem = scan_walks(c6_big_ids(), 7, walks);
    if (problem.empty() && walks == 0)
        problem = "no walks observed";

    std::ostringstream d;
    d << "10000 round trips bit-exact, " << false_accepts << "/100000 false accepts, " << walks
      << " walk wire forms scanned";
    if (!problem.empty())
        return {false, problem};
    return {true, d.str()};
}

// --- 7 ---------------------------------------------------------------------

Result criterion7()
{
    const auto spec = scenario::load_scenario(kScenarios / "eavesdropper.scn");
    const NodeId insider{14};
    const NodeId outsider{21};
    Tick evicted_at = 0;
    for (const auto& ev : spec.events)
        if (std::holds_alternative<scenario::EvictSpec>(ev.action))
            evicted_at = ev.tick;

    std::uint64_t outsider_seen = 0;
    std::uint64_t post_rekey = 0;
    std::uint64_t intra = 0;
    std::string problem;
    for (std::uint64_t seed = 1; seed <= 5 && problem.empty(); ++seed) {
        World w(spec, seed);
        const auto r = w.run_until({20'000, true});
        intra += r.intra_sent;
        if (r.intra_sent < 1000)
            problem = "only " + std::to_string(r.intra_sent) + " intra-cluster messages";
        if (r.adversary.recovered_unauthorized != 0 || r.adversary.recovered_without_key != 0)
            problem = "plaintext recovered without the key (seed " + std::to_string(seed) + ")";
        for (const auto& a : w.adversary_log()) {
            const bool recovered = a.outcome != sim::AdversaryRecord::Outcome::Failed;
            if (a.eavesdropper == outsider) {
                ++outsider_seen;
                if (recovered && problem.empty())
                    problem = "outsider recovered message " + std::to_string(a.mid);
            }
            if (a.eavesdropper == insider && a.tick > evicted_at) {
                ++post_rekey;
                if (a.key_id <= a.held_key_id && problem.empty())
                    problem = "evicted member still holds the current key";
                if (recovered && problem.empty())
                    problem = "evicted member recovered message " + std::to_string(a.mid);
            }
        }
    }
    if (problem.empty() && (outsider_seen < 1000 || post_rekey == 0))
        problem = "fixture too small: outsider saw " + std::to_string(outsider_seen) + ", post-rekey " +
                  std::to_string(post_rekey);
    if (!problem.empty())
        return {false, problem};
    std::ostringstream d;
    d << intra << " intra messages over 5 seeds; outsider 0/" << outsider_seen
      << " recovered; evicted member 0/" << post_rekey << " recovered after re-key";
    return {true, d.str()};
}

// --- 8 ---------------------------------------------------------------------

Result criterion8()
{
    const std::vector<std::pair<std::string, std::uint64_t>> runs{
        {"two_clusters.scn", 7}, {"relay_join.scn", 1}, {"eavesdropper.scn", 3}, {"malicious_removal.scn", 11}};
    std::ostringstream digests;
    std::string problem;
    const fs::path tmp = fs::temp_directory_path() / "stegmesh_acceptance_c8";
    for (const auto& [file, seed] : runs) {
        std::ostringstream err;
        const fs::path a = tmp / (file + ".a");
        const fs::path b = tmp / (file + ".b");
        fs::remove_all(a);
        fs::remove_all(b);
        const cli::RunArgs args{kScenarios / file, seed, 3000, a};
        if (cli::cmd_run(args, err) != cli::kOk || cli::cmd_run({args.scenario, seed, 3000, b}, err) != cli::kOk) {
            problem = file + ": run failed: " + err.str();
            break;
        }
        for (const char* out : {"trace.log", "report.json", "metrics.csv"}) {
            const std::string x = slurp(a / out);
            if (x != slurp(b / out) && problem.empty())
                problem = file + " " + out + " differs between runs";
            digests << file << " seed=" << seed << " " << out << " " << fnv1a64_hex(x) << '\n';
        }
    }
    const fs::path golden = kGolden / "digests.txt";
    if (g_regenerate)
        spit(golden, digests.str());
    if (problem.empty() && slurp(golden) != digests.str())
        problem = "output digests differ from " + golden.filename().string() + " (platform-dependent output)";
    if (!problem.empty())
        return {false, problem};
    return {true, std::to_string(runs.size()) +
                      " runs byte-identical twice over and equal to the frozen golden digests"};
}

} // namespace

int main(int argc, char** argv)
{
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string_view arg = argv[i];
        if (arg == "--regenerate-golden")
            g_regenerate = true;
        else if (arg == "--only" && i + 1 < argc)
            only = std::atoi(argv[++i]);
    }

    const std::vector<std::pair<const char*, std::function<Result()>>> criteria{
        {"dv_oracle_equivalence", criterion1}, {"discovery_completeness", criterion2},
        {"relay_join_convergence", criterion3},   {"hello_expiry_bound", criterion4},
        {"triggered_update_contrast", criterion5}, {"codec_suite", criterion6},
        {"adversary_soundness", criterion7},   {"determinism", criterion8},
    };
    bool all = true;
    int n = 0;
    for (const auto& [name, fn] : criteria) {
        ++n;
        if (only != 0 && only != n)
            continue;
        Result r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        all = all && r.pass;
        std::cout << "C" << n << ' ' << (r.pass ? "PASS" : "FAIL") << ' ' << name << ": " << r.detail << std::endl;
    }
    return all ? 0 : 1;
}
