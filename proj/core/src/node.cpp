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

#include "havld/node.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include <arpa/inet.h>
#include <sys/socket.h>

#include "havld/log.hpp"

namespace havld {

ClusterNode::ClusterNode(ClusterConfig config, NodeSide side)
    : config_(std::move(config)), failover_(failover_config(config_))
{
    if (side == NodeSide::Primary) {
        self_ = config_.primary;
        if (config_.backup)
            peer_ = heartbeat_endpoint(config_, *config_.backup);
        node_id_ = 1;
    } else {
        if (!config_.backup)
            throw std::invalid_argument("config has no backup node");
        self_ = *config_.backup;
        peer_ = heartbeat_endpoint(config_, config_.primary);
        node_id_ = 2;
    }
}

ClusterNode::~ClusterNode()
{
    stop();
}

void ClusterNode::start()
{
    udp_ = net::bind_udp(heartbeat_endpoint(config_, self_));
    stopping_ = false;
    failover_thread_ = std::thread([this] { failover_loop(); });
    health_thread_ = std::thread([this] { health_loop(); });
}

void ClusterNode::stop()
{
    stopping_ = true;
    if (failover_thread_.joinable())
        failover_thread_.join();
    if (health_thread_.joinable())
        health_thread_.join();
    tear_down_services();
    udp_.reset();
}

NodeState ClusterNode::state() const
{
    std::lock_guard lock(state_mu_);
    return state_;
}

bool ClusterNode::wait_for_state(NodeState state, Millis timeout) const
{
    std::unique_lock lock(state_mu_);
    return state_cv_.wait_for(lock, timeout, [&] { return state_ == state; });
}

std::string ClusterNode::render_table() const
{
    return director_.with([](const Director& d) { return d.render_table(); });
}

void ClusterNode::failover_loop()
{
    auto logger = log::get("pulse");
    NodeRole role = make_role(self_.priority, node_id_, ClusterClock::now());
    logger->info("{} starting in {} (priority {})", self_.name, to_string(role.state), int{self_.priority});

    std::vector<HeartbeatMessage> inbox;
    while (!stopping_) {
        auto now = ClusterClock::now();
        auto wake = std::min(next_deadline(role, failover_), now + failover_.interval);
        auto wait = std::clamp(std::chrono::duration_cast<Millis>(wake - now), Millis{0}, Millis{200});

        inbox.clear();
        if (net::wait_readable(udp_.fd(), wait)) {
            std::array<std::byte, 64> buf{};
            for (;;) {
                ssize_t n = ::recv(udp_.fd(), buf.data(), buf.size(), MSG_DONTWAIT | MSG_TRUNC);
                if (n < 0)
                    break;
                auto len = std::min(static_cast<std::size_t>(n), buf.size());
                auto msg = decode(std::span<const std::byte>(buf.data(), len));
                if (msg)
                    inbox.push_back(*msg);
                else
                    logger->warn("dropping heartbeat: {}", to_string(msg.error()));
            }
        }

        const NodeState before = role.state;
        auto [next, actions] = tick(role, ClusterClock::now(), inbox, failover_);
        role = std::move(next);
        for (auto a : actions)
            execute(a, role);

        if (role.state != before)
            logger->info("{} state {} -> {}", self_.name, to_string(before), to_string(role.state));
        {
            std::lock_guard lock(state_mu_);
            state_ = role.state;
        }
        state_cv_.notify_all();
    }

    if (role.vip_held)
        tear_down_services();
}

void ClusterNode::execute(FailoverAction action, NodeRole& role)
{
    auto logger = log::get("pulse");
    switch (action) {
    case FailoverAction::SendHeartbeat: {
        if (!peer_)
            return;
        auto bytes = encode(make_heartbeat(role, ++sequence_));
        auto addr = net::resolve(*peer_);
        if (addr)
            ::sendto(udp_.fd(), bytes.data(), bytes.size(), 0, reinterpret_cast<const sockaddr*>(&*addr),
                     sizeof(*addr));
        break;
    }
    case FailoverAction::AcquireVip:
        if (!bring_up_services()) {
            role = vip_acquire_failed(std::move(role), ClusterClock::now());
            logger->error("{} could not take over the virtual services; entering Fault", self_.name);
        } else {
            logger->info("{} holds the virtual services", self_.name);
        }
        break;
    case FailoverAction::ReleaseVip:
        tear_down_services();
        logger->info("{} released the virtual services", self_.name);
        break;
    }
}

bool ClusterNode::bring_up_services()
{
    auto logger = log::get("pulse");
    director_.with([&](Director& d) {
        d.clear();
        for (const auto& svc : config_.services)
            d.add_service(make_virtual_service(svc));
    });
    std::vector<HealthMonitor> monitors;
    for (const auto& svc : config_.services) {
        HealthMonitor mon(svc.probe);
        for (const auto& s : svc.servers)
            mon.track(s.name);
        monitors.push_back(std::move(mon));
    }
    {
        std::lock_guard lock(services_mu_);
        monitors_ = std::move(monitors);
        serving_ = true;
    }

    std::vector<std::unique_ptr<Proxy>> proxies;
    try {
        for (std::size_t i = 0; i < config_.services.size(); ++i) {
            const auto& svc = config_.services[i];
            proxies.push_back(std::make_unique<Proxy>(
                svc.address, service_key(svc), director_,
                [this, i](const std::string& backend) { on_backend_failure(i, backend); }));
            proxies.back()->start();
        }
    } catch (const std::system_error& e) {
        logger->error("bind failed: {}", e.what());
        proxies.clear();
        tear_down_services();
        return false;
    }
    std::lock_guard lock(services_mu_);
    proxies_ = std::move(proxies);
    return true;
}

void ClusterNode::tear_down_services()
{
    std::vector<std::unique_ptr<Proxy>> doomed;
    {
        std::lock_guard lock(services_mu_);
        doomed.swap(proxies_);
        serving_ = false;
        monitors_.clear();
    }
    // Proxy::stop waits for in-flight connections, which call back into
    // on_backend_failure; keep services_mu_ released meanwhile.
    doomed.clear();
    director_.with([](Director& d) { d.clear(); });
}

void ClusterNode::apply(std::size_t service, const std::string& backend, const ProbeResult& result)
{
    static const auto logger = log::get("nanny");
    std::lock_guard lock(services_mu_);
    if (!serving_ || service >= monitors_.size())
        return;
    Transition t = monitors_[service].observe(backend, result);
    if (t == Transition::None)
        return;
    director_.with([&](Director& d) { (void)reconcile(d, backend, t, ClusterClock::now()); });
    logger->info("{} {} ({})", backend, to_string(t), result.ok() ? "probe ok" : result.detail);
}

void ClusterNode::on_backend_failure(std::size_t service, const std::string& backend)
{
    apply(service, backend, {ProbeOutcome::Refused, "proxy connect failed"});
}

void ClusterNode::health_loop()
{
    std::vector<Instant> next_probe(config_.services.size(), ClusterClock::now());
    while (!stopping_) {
        std::this_thread::sleep_for(Millis{50});
        bool serving;
        {
            std::lock_guard lock(services_mu_);
            serving = serving_;
        }
        const auto now = ClusterClock::now();
        if (!serving) {
            std::fill(next_probe.begin(), next_probe.end(), now);
            continue;
        }
        for (std::size_t i = 0; i < config_.services.size() && !stopping_; ++i) {
            if (now < next_probe[i])
                continue;
            const auto& svc = config_.services[i];
            next_probe[i] = now + svc.probe.interval;
            for (const auto& server : svc.servers)
                apply(i, server.name, probe(server.address, svc.probe));
        }
        director_.with([&](Director& d) { d.expire(ClusterClock::now()); });
    }
}

} // namespace havld
