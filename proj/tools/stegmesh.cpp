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

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    using namespace stegmesh;
    cli::configure_logging();

    CLI::App app{"stegmesh: covert-channel cluster routing simulator"};
    app.require_subcommand(1);

    cli::RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario and write trace, report and metrics");
    run_cmd->add_option("--scenario", run.scenario, "Scenario file")->required();
    run_cmd->add_option("--seed", run.seed, "World seed")->required();
    run_cmd->add_option("--limit", run.limit, "Last tick to simulate")->required();
    run_cmd->add_option("--out", run.out, "Output directory")->required();

    cli::VerifyArgs verify;
    auto* verify_cmd = app.add_subcommand("verify", "Run a scenario to quiescence and check it against the oracles");
    verify_cmd->add_option("--scenario", verify.scenario, "Scenario file")->required();
    verify_cmd->add_option("--seed", verify.seed, "World seed")->required();
    verify_cmd->add_option("--limit", verify.limit, "Give up after this tick");

    std::string trace;
    auto* report_cmd = app.add_subcommand("report", "Summarize an existing trace");
    report_cmd->add_option("--trace", trace, "Trace file written by run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cli::kInvalidInput;
    }

    if (*run_cmd)
        return cli::cmd_run(run, std::cerr);
    if (*verify_cmd)
        return cli::cmd_verify(verify, std::cout, std::cerr);
    return cli::cmd_report(trace, std::cout, std::cerr);
}
