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

#include "stegmesh/cli.hpp"

#include "stegmesh/errors.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

namespace stegmesh::cli {

namespace {

// Diagnostics go to standard error through this logger only; it stays
// silent until configure_logging says otherwise.
spdlog::logger& diag()
{
    static const auto logger = [] {
        auto l = std::make_shared<spdlog::logger>("stegmesh", std::make_shared<spdlog::sinks::stderr_sink_st>());
        l->set_pattern("[%l] %v");
        l->set_level(spdlog::level::off);
        return l;
    }();
    return *logger;
}

} // namespace

void configure_logging()
{
    const char* env = std::getenv("STEGMESH_LOG");
    const std::string level = env ? env : "off";
    if (level == "debug")
        diag().set_level(spdlog::level::debug);
    else if (level == "info")
        diag().set_level(spdlog::level::info);
    else
        diag().set_level(spdlog::level::off);
}

const char* to_string(Check::Status status)
{
    switch (status) {
    case Check::Status::Pass: return "PASS";
    case Check::Status::Fail: return "FAIL";
    case Check::Status::Info: return "INFO";
    }
    return "?";
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write " + path.string());
    out << text;
    if (!out)
        throw Error("write failed for " + path.string());
}

std::string cost_text(const Metric& m, Micro inf) { return m.reachable(inf) ? m.cost.to_string() : "inf"; }

} // namespace

int cmd_run(const RunArgs& args, std::ostream& err)
{
    scenario::ScenarioSpec spec;
    try {
        spec = scenario::load_scenario(args.scenario);
    } catch (const ParseError& e) {
        err << "error: " << args.scenario.string() << ": " << e.what() << '\n';
        return kInvalidInput;
    } catch (const ValidationError& e) {
        err << "error: " << args.scenario.string() << ": " << e.what() << '\n';
        return kInvalidInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }

    try {
        diag().info("scenario {} digest {}", spec.name, scenario::digest(spec));
        sim::World world(spec, args.seed);
        const auto report = world.run_until({args.limit, true});
        diag().info("stopped at tick {} after {} events, quiescence {}", report.final_tick, report.events_executed,
                     report.quiescence_tick ? std::to_string(*report.quiescence_tick) : "none");
        diag().debug("{} trace records, {} messages sent", world.trace().size(), report.messages_sent);

        std::filesystem::create_directories(args.out);
        write_file(args.out / "trace.log", world.trace_text());
        write_file(args.out / "report.json", report.to_text());
        write_file(args.out / "metrics.csv", sim::metrics_csv(world.metrics()));
        diag().info("wrote trace.log, report.json, metrics.csv to {}", args.out.string());
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeFault;
    }
    return kOk;
}

std::string compare_with_oracle(const sim::World& world)
{
    const auto graph = world.steg_link_graph();
    const auto oracle = sim::oracle_shortest_paths(graph);
    const Micro inf = graph.infinity;
    for (NodeId src : graph.nodes) {
        const auto& table = world.ch(src)->routes;
        for (NodeId dst : graph.nodes) {
            const Metric& want = oracle.at({src, dst});
            const routing::RouteEntry* e = table.find(dst);
            const Metric got = e ? e->metric : Metric::unreachable(inf);
            const bool same = want.reachable(inf) ? got.reachable(inf) && got.cost == want.cost : !got.reachable(inf);
            if (!same)
                return "CH " + to_string(src) + " -> " + to_string(dst) + ": table " + cost_text(got, inf) +
                       ", oracle " + cost_text(want, inf);
        }
        for (const auto& [dst, e] : table.entries()) {
            if (e.reachable(inf) && !oracle.contains({src, dst}))
                return "CH " + to_string(src) + " keeps a finite route to inactive node " + to_string(dst);
        }
    }
    return {};
}

std::string find_routing_loop(const sim::World& world)
{
    const auto chs = world.active_chs();
    const std::size_t n = chs.size();
    for (NodeId src : chs) {
        const auto& table = world.ch(src)->routes;
        for (const auto& [dst, entry] : table.entries()) {
            if (!entry.reachable(table.infinity()))
                continue;
            NodeId at = src;
            std::size_t hops = 0;
            while (at != dst) {
                const engine::ChState* s = world.ch(at);
                const routing::RouteEntry* e = s ? s->routes.find(dst) : nullptr;
                if (!e || !e->reachable(table.infinity()))
                    return "route " + to_string(src) + " -> " + to_string(dst) + " dead-ends at " + to_string(at);
                at = e->next_hop;
                if (++hops > (n == 0 ? 0 : n - 1))
                    return "route " + to_string(src) + " -> " + to_string(dst) + " exceeds " +
                           std::to_string(n - 1) + " hops";
            }
        }
    }
    return {};
}

std::string codec_sweep(const MethodRegistry& registry, std::uint64_t seed, std::size_t cases,
                        const CodecUnderTest& codec)
{
    Rng rng = Rng::stream(seed, 0xC0DEC);
    const auto methods = registry.all().ids();
    if (methods.empty())
        return "registry is empty";
    for (std::size_t i = 0; i < cases; ++i) {
        const StegMethodId m = methods[rng.below(methods.size())];
        const MethodInfo& info = *registry.find(m);
        Bytes payload(rng.below(65));
        rng.fill(payload);
        const std::size_t slack = rng.below(24);
        auto carrier = codec::make_carrier(info.codec, payload.size(), rng);
        Bytes extra(slack);
        rng.fill(extra);
        carrier.bytes.insert(carrier.bytes.end(), extra.begin(), extra.end());
        const std::size_t len = carrier.bytes.size();

        std::optional<Key256> key;
        if (rng.below(2) == 1) {
            key.emplace();
            rng.fill(*key);
        }
        const Key256* kp = key ? &*key : nullptr;
        const auto env = codec.cover(payload, m, std::move(carrier), registry, kp);
        const std::string where = "case " + std::to_string(i) + " (method " + std::to_string(m.value) +
                                  ", payload " + std::to_string(payload.size()) + " bytes)";
        if (env.carrier.bytes.size() != len)
            return where + ": carrier length changed";
        const auto found = codec.find(env.carrier.bytes, registry.all(), registry, kp);
        if (!found)
            return where + ": no method validated";
        if (found->method != m || found->payload != payload)
            return where + ": decoded a different payload";
    }
    return {};
}

std::vector<Check> verify_world(sim::World& world, Tick limit, const CodecUnderTest& codec)
{
    std::vector<Check> checks;
    world.run_until({limit, true});
    const bool quiet = world.quiescence_tick().has_value();

    auto add = [&](std::string name, const std::string& problem, std::string ok_detail) {
        checks.push_back({std::move(name), problem.empty() ? Check::Status::Pass : Check::Status::Fail,
                          problem.empty() ? std::move(ok_detail) : problem});
    };

    if (!quiet) {
        checks.push_back({"dv_oracle", Check::Status::Fail,
                          "no quiescence by tick " + std::to_string(world.clock())});
    } else {
        add("dv_oracle", compare_with_oracle(world),
            std::to_string(world.active_chs().size()) + " CHs match the oracle at tick " +
                std::to_string(*world.quiescence_tick()));
    }
    add("loop_freedom", find_routing_loop(world), "every next-hop chain reaches its destination");

    const std::size_t cases = 512;
    add("codec_roundtrip", codec_sweep(world.spec().registry, world.seed(), cases, codec),
        std::to_string(cases) + " round trips bit-exact");

    const auto adv = world.adversary_summary();
    std::string adv_problem;
    if (adv.recovered_unauthorized != 0 || adv.recovered_without_key != 0)
        adv_problem = std::to_string(adv.recovered_unauthorized + adv.recovered_without_key) +
                      " plaintexts recovered without the cluster key";
    add("adversary_soundness", adv_problem,
        std::to_string(adv.overheard) + " overheard, " + std::to_string(adv.recovered_authorized) +
            " opened with held keys, 0 without");

    const auto chs = world.active_chs();
    std::size_t pairs = 0;
    std::size_t linked = 0;
    std::vector<std::string> isolated;
    for (NodeId a : chs) {
        bool any = false;
        for (NodeId b : chs) {
            if (a == b)
                continue;
            const auto* e = world.ch(a)->routes.find(b);
            const bool r = e && e->reachable(world.ch(a)->routes.infinity());
            any = any || r;
            if (a < b) {
                ++pairs;
                const auto* back = world.ch(b)->routes.find(a);
                if (r && back && back->reachable(world.ch(b)->routes.infinity()))
                    ++linked;
            }
        }
        if (!any && chs.size() > 1)
            isolated.push_back(to_string(a));
    }
    std::string detail = std::to_string(linked) + "/" + std::to_string(pairs) + " CH pairs mutually routable";
    if (!isolated.empty()) {
        detail += "; isolated:";
        for (const auto& id : isolated)
            detail += " " + id;
    }
    checks.push_back({"discovery_completeness", Check::Status::Info, detail});
    return checks;
}

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err, const CodecUnderTest& codec)
{
    scenario::ScenarioSpec spec;
    try {
        spec = scenario::load_scenario(args.scenario);
    } catch (const ParseError& e) {
        err << "error: " << args.scenario.string() << ": " << e.what() << '\n';
        return kInvalidInput;
    } catch (const ValidationError& e) {
        err << "error: " << args.scenario.string() << ": " << e.what() << '\n';
        return kInvalidInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }

    std::vector<Check> checks;
    try {
        sim::World world(spec, args.seed);
        checks = verify_world(world, args.limit, codec);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeFault;
    }
    bool failed = false;
    for (const auto& c : checks) {
        out << to_string(c.status) << ' ' << c.name << ": " << c.detail << '\n';
        failed = failed || c.status == Check::Status::Fail;
    }
    return failed ? kCheckFailed : kOk;
}

int cmd_report(const std::filesystem::path& path, std::ostream& out, std::ostream& err)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err << "error: cannot open trace " << path.string() << '\n';
        return kRuntimeFault;
    }

    std::map<std::string, std::uint64_t> records;
    std::map<std::string, std::uint64_t> sent_by_kind;
    std::map<std::string, std::uint64_t> sent_by_cause;
    std::set<NodeId> chs;
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t lines = 0;
    Tick last_tick = 0;
    std::optional<Tick> quiescent;
    std::string line;
    while (std::getline(in, line)) {
        ++lines;
        if (line.empty())
            continue;
        auto rec = sim::TraceRecord::parse(line);
        if (!rec) {
            err << "error: " << path.string() << ":" << lines << ": malformed trace record\n";
            return kInvalidInput;
        }
        if (rec->tick < last_tick) {
            err << "error: " << path.string() << ":" << lines << ": tick goes backwards\n";
            return kInvalidInput;
        }
        last_tick = rec->tick;
        ++records[rec->kind];
        if (rec->kind == "send") {
            ++sent;
            if (const auto* k = rec->get("kind"))
                ++sent_by_kind[*k];
            if (const auto* c = rec->get("cause"))
                ++sent_by_cause[*c];
        } else if (rec->kind == "deliver") {
            ++delivered;
        } else if (rec->kind == "drop") {
            ++dropped;
        } else if (rec->kind == "quiescent") {
            quiescent = rec->tick;
        } else if (rec->kind == "node") {
            const auto* role = rec->get("role");
            if (role && *role == "cluster_head" && rec->src)
                chs.insert(*rec->src);
        }
    }

    out << "records: " << lines << '\n';
    out << "final_tick: " << last_tick << '\n';
    out << "cluster_heads: " << chs.size() << '\n';
    out << "quiescence_tick: " << (quiescent ? std::to_string(*quiescent) : "none") << '\n';
    out << "messages: sent=" << sent << " delivered=" << delivered << " dropped=" << dropped
        << " pending=" << (sent - std::min(sent, delivered + dropped)) << '\n';
    for (const auto& [k, v] : sent_by_kind)
        out << "sent." << k << ": " << v << '\n';
    for (const auto& [k, v] : sent_by_cause)
        out << "cause." << k << ": " << v << '\n';
    for (const auto& [k, v] : records)
        out << "record." << k << ": " << v << '\n';
    return kOk;
}

} // namespace stegmesh::cli
