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

#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "havld/config.hpp"
#include "havld/director.hpp"
#include "havld/failover.hpp"
#include "havld/health.hpp"
#include "havld/net.hpp"
#include "havld/proxy.hpp"

namespace havld {

enum class NodeSide : std::uint8_t { Primary, Backup };

// A live director: heartbeats with its peer over UDP, binds the virtual
// service listeners while Active, and probes backends of the services it
// serves.
class ClusterNode {
public:
    // Throws std::invalid_argument when `side` is Backup and the config has
    // no backup node.
    ClusterNode(ClusterConfig config, NodeSide side);
    ClusterNode(const ClusterNode&) = delete;
    ClusterNode& operator=(const ClusterNode&) = delete;
    ~ClusterNode();

    // Binds the heartbeat socket (std::system_error on failure) and starts
    // the failover and health threads.
    void start();
    void stop();

    NodeState state() const;
    const std::string& name() const noexcept { return self_.name; }
    std::string render_table() const;

    // Test helper: true once the node has reached `state`.
    bool wait_for_state(NodeState state, Millis timeout) const;

private:
    void failover_loop();
    void health_loop();
    void execute(FailoverAction action, NodeRole& role);
    bool bring_up_services();
    void tear_down_services();
    void on_backend_failure(std::size_t service, const std::string& backend);
    void apply(std::size_t service, const std::string& backend, const ProbeResult& result);

    ClusterConfig config_;
    NodeConfig self_;
    std::optional<Endpoint> peer_;
    FailoverConfig failover_;
    std::uint64_t node_id_;

    net::Socket udp_;
    std::atomic<bool> stopping_{false};
    std::thread failover_thread_;
    std::thread health_thread_;

    mutable std::mutex state_mu_;
    mutable std::condition_variable state_cv_;
    NodeState state_ = NodeState::Init;
    std::uint64_t sequence_ = 0;

    SynchronizedDirector director_;
    // Guards proxies_, monitors_ and serving_.
    mutable std::mutex services_mu_;
    std::vector<std::unique_ptr<Proxy>> proxies_;
    std::vector<HealthMonitor> monitors_;
    bool serving_ = false;
};

} // namespace havld
