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

#include "stegmesh/codec.hpp"
#include "stegmesh/sim.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace stegmesh::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kInvalidInput = 2, kRuntimeFault = 3 };

/// Applies STEGMESH_LOG (off, info, debug; default off) to the diagnostic
/// logger on standard error.
void configure_logging();

struct RunArgs {
    std::filesystem::path scenario;
    std::uint64_t seed = 1;
    Tick limit = 10'000;
    std::filesystem::path out = "out";
};

/// Writes trace.log, report.json and metrics.csv into `out`.
int cmd_run(const RunArgs& args, std::ostream& err);

/// Codec entry points exercised by the round-trip sweep; replaceable so that
/// a broken codec can be shown to fail the check.
struct CodecUnderTest {
    std::function<codec::StegEnvelope(ByteView, StegMethodId, codec::CoverCarrier, const MethodRegistry&,
                                      const Key256*)>
        cover = [](ByteView p, StegMethodId m, codec::CoverCarrier c, const MethodRegistry& r, const Key256* k) {
            return codec::cover(p, m, std::move(c), r, k);
        };
    std::function<std::optional<codec::Uncovered>(ByteView, CapabilityProfile, const MethodRegistry&,
                                                  const Key256*)>
        find = [](ByteView c, CapabilityProfile p, const MethodRegistry& r, const Key256* k) {
            return codec::find_steg_msg(c, p, r, k);
        };
};

struct Check {
    enum class Status { Pass, Fail, Info };
    std::string name;
    Status status = Status::Pass;
    std::string detail;
};

const char* to_string(Check::Status status);

/// Table of every CH versus the oracle; empty string when all match,
/// otherwise the first mismatch.
std::string compare_with_oracle(const sim::World& world);
/// Follows next hops from every CH to every reachable destination.
std::string find_routing_loop(const sim::World& world);
/// Randomized cover/find round trips over the scenario registry.
std::string codec_sweep(const MethodRegistry& registry, std::uint64_t seed, std::size_t cases,
                        const CodecUnderTest& codec = {});

/// Runs the world to quiescence (bounded by `limit`) and evaluates every check.
std::vector<Check> verify_world(sim::World& world, Tick limit, const CodecUnderTest& codec = {});

struct VerifyArgs {
    std::filesystem::path scenario;
    std::uint64_t seed = 1;
    Tick limit = 100'000;
};

/// Prints one PASS/FAIL/INFO line per check; exit 0 iff nothing failed.
int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err, const CodecUnderTest& codec = {});

/// Summarizes an existing trace file.
int cmd_report(const std::filesystem::path& trace, std::ostream& out, std::ostream& err);

} // namespace stegmesh::cli
