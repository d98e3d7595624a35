/**
 * Copyright 2026 The havld Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "havld/commands.hpp"

#include <csignal>
#include <exception>
#include <fstream>
#include <ostream>
#include <pthread.h>
#include <system_error>
#include <vector>

#include <CLI11.hpp>

#include "havld/backend.hpp"
#include "havld/config.hpp"
#include "havld/director.hpp"
#include "havld/log.hpp"
#include "havld/node.hpp"
#include "havld/scenario.hpp"
#include "havld/sim.hpp"

namespace havld::cli {
namespace {

struct RunArgs {
    std::string config;
    std::string node = "primary";
};

struct ListArgs {
    std::string config;
    std::string node = "primary";
};

struct SimArgs {
    std::string config;
    std::string scenario;
    std::uint64_t seed = 1;
    std::string trace;
    bool cold_start = false;
};

struct BackendArgs {
    std::string name;
    std::uint16_t port = 0;
    std::string bind = "0.0.0.0";
    int status = 200;
};

std::optional<ClusterConfig> load(const std::string& path, std::ostream& err)
{
    auto parsed = load_config_file(path);
    if (!parsed) {
        for (const auto& e : parsed.error())
            err << path << ": " << to_string(e) << '\n';
        return std::nullopt;
    }
    return std::move(parsed).value();
}

NodeSide parse_side(const std::string& s)
{
    return s == "backup" ? NodeSide::Backup : NodeSide::Primary;
}

// Blocks SIGINT/SIGTERM in the calling thread (and every thread it spawns
// afterwards) so sigwait can collect them.
sigset_t block_termination_signals()
{
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
    return set;
}

int wait_for_termination(const sigset_t& set)
{
    int sig = 0;
    sigwait(&set, &sig);
    return sig;
}

int cmd_run(const RunArgs& a, std::ostream& err)
{
    auto config = load(a.config, err);
    if (!config)
        return kExitUsage;

    std::unique_ptr<ClusterNode> node;
    try {
        node = std::make_unique<ClusterNode>(std::move(*config), parse_side(a.node));
    } catch (const std::invalid_argument& e) {
        err << a.config << ": " << e.what() << '\n';
        return kExitUsage;
    }

    auto signals = block_termination_signals();
    try {
        node->start();
    } catch (const std::system_error& e) {
        err << "cannot start " << node->name() << ": " << e.what() << '\n';
        return kExitRuntime;
    }
    int sig = wait_for_termination(signals);
    log::get("pulse")->info("signal {} received, shutting down", sig);
    node->stop();
    return kExitOk;
}

int cmd_list(const ListArgs& a, std::ostream& out, std::ostream& err)
{
    auto config = load(a.config, err);
    if (!config)
        return kExitUsage;
    if (parse_side(a.node) == NodeSide::Backup && !config->backup) {
        err << a.config << ": no backup node configured\n";
        return kExitUsage;
    }

    // Only the primary serves right after start-up; a standby director has
    // an empty table.
    Director director;
    if (parse_side(a.node) == NodeSide::Primary) {
        for (const auto& svc : config->services)
            director.add_service(make_virtual_service(svc));
    }
    out << director.render_table();
    return kExitOk;
}

int cmd_sim(const SimArgs& a, std::ostream& out, std::ostream& err)
{
    auto config = load(a.config, err);
    if (!config)
        return kExitUsage;
    auto scenario = load_scenario_file(a.scenario);
    if (!scenario) {
        err << a.scenario << ": " << to_string(scenario.error()) << '\n';
        return kExitUsage;
    }

    sim::Options options;
    options.seed = a.seed;
    options.warm_start = !a.cold_start;
    auto result = sim::run(*scenario, sim::Topology::from_config(*config), options);
    if (!result) {
        err << to_string(result.error()) << '\n';
        return kExitUsage;
    }

    if (!a.trace.empty()) {
        std::ofstream f(a.trace, std::ios::binary | std::ios::trunc);
        f << result->trace_text();
        if (!f) {
            err << "cannot write trace to " << a.trace << '\n';
            return kExitRuntime;
        }
    }
    out << sim::format_metrics(result->metrics);
    return kExitOk;
}

int cmd_backend(const BackendArgs& a, std::ostream& err)
{
    auto bind = parse_endpoint(a.bind, false);
    if (!bind) {
        err << "bad --bind address: " << a.bind << '\n';
        return kExitUsage;
    }
    bind->port = a.port;

    auto signals = block_termination_signals();
    std::unique_ptr<TestBackend> backend;
    try {
        backend = std::make_unique<TestBackend>(a.name, *bind);
    } catch (const std::system_error& e) {
        err << "cannot listen on " << to_string(*bind) << ": " << e.what() << '\n';
        return kExitRuntime;
    }
    backend->set_status(a.status);
    backend->start();
    log::get("backend")->info("{} listening on port {}", a.name, backend->port());
    wait_for_termination(signals);
    backend->stop();
    return kExitOk;
}

} // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"High-availability virtual server director"};
    app.name(args.empty() ? "havld" : args.front());
    app.require_subcommand(1);

    std::string level = "info";
    app.add_option("--log-level", level, "trace, debug, info, warn, error or off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

    const std::vector<std::string> sides{"primary", "backup"};

    RunArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "Run a director node");
    run_cmd->add_option("--config", run_args.config, "Cluster config file")->required();
    run_cmd->add_option("--node", run_args.node, "Which configured node this is")
        ->check(CLI::IsMember(sides));

    ListArgs list_args;
    auto* list_cmd = app.add_subcommand("list", "Print the virtual server table");
    list_cmd->add_option("--config", list_args.config, "Cluster config file")->required();
    list_cmd->add_option("--node", list_args.node, "Show the table as seen by this node")
        ->check(CLI::IsMember(sides));

    SimArgs sim_args;
    auto* sim_cmd = app.add_subcommand("sim", "Run a scenario in the simulator");
    sim_cmd->add_option("--config", sim_args.config, "Cluster config file")->required();
    sim_cmd->add_option("--scenario", sim_args.scenario, "Scenario file")->required();
    sim_cmd->add_option("--seed", sim_args.seed, "Random seed");
    sim_cmd->add_option("--trace", sim_args.trace, "Write the event trace here");
    sim_cmd->add_flag("--cold-start", sim_args.cold_start, "Start both directors in Init");

    BackendArgs backend_args;
    auto* backend_cmd = app.add_subcommand("backend", "Run a test web server");
    backend_cmd->add_option("--name", backend_args.name, "Value of the serve_server header")->required();
    backend_cmd->add_option("--port", backend_args.port, "TCP port")->required();
    backend_cmd->add_option("--bind", backend_args.bind, "Listen address");
    backend_cmd->add_option("--status", backend_args.status, "HTTP status to answer with")
        ->check(CLI::Range(100, 599));

    std::vector<std::string> rest(args.rbegin(), args.rend());
    if (!rest.empty())
        rest.pop_back();
    try {
        app.parse(rest);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    log::set_level(spdlog::level::from_str(level));

    try {
        if (*run_cmd)
            return cmd_run(run_args, err);
        if (*list_cmd)
            return cmd_list(list_args, out, err);
        if (*sim_cmd)
            return cmd_sim(sim_args, out, err);
        return cmd_backend(backend_args, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

} // namespace havld::cli
