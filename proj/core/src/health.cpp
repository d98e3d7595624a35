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

#include "havld/health.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

#include <sys/socket.h>

#include "havld/net.hpp"

namespace havld {

std::string validate(const ProbeSpec& spec)
{
    if (spec.interval <= Millis::zero())
        return "interval must be positive";
    if (spec.timeout <= Millis::zero())
        return "timeout must be positive";
    if (spec.timeout >= spec.interval)
        return "timeout must be shorter than interval";
    if (spec.fall < 1)
        return "fall must be >= 1";
    if (spec.rise < 1)
        return "rise must be >= 1";
    if (spec.kind == ProbeKind::HttpGet) {
        if (spec.path.empty() || spec.path.front() != '/')
            return "path must start with '/'";
        if (spec.expect_status < 100 || spec.expect_status > 599)
            return "expect must be an HTTP status code";
    }
    return {};
}

std::string_view to_string(ProbeOutcome o) noexcept
{
    switch (o) {
    case ProbeOutcome::Success:
        return "Success";
    case ProbeOutcome::Timeout:
        return "Timeout";
    case ProbeOutcome::Refused:
        return "Refused";
    case ProbeOutcome::BadStatus:
        return "BadStatus";
    }
    return "?";
}

std::string_view to_string(Transition t) noexcept
{
    switch (t) {
    case Transition::None:
        return "None";
    case Transition::WentDown:
        return "WentDown";
    case Transition::CameUp:
        return "CameUp";
    }
    return "?";
}

namespace {

ProbeResult http_status_check(net::Socket& sock, const Endpoint& backend, const ProbeSpec& spec,
                              ClusterClock::time_point deadline)
{
    std::string req = "GET " + spec.path + " HTTP/1.0\r\nHost: " + backend.host +
                      "\r\nUser-Agent: havld-health\r\nConnection: close\r\n\r\n";
    if (!net::write_all(sock.fd(), req))
        return {ProbeOutcome::Refused, "send failed"};

    std::string head;
    char buf[512];
    while (head.find("\r\n") == std::string::npos) {
        auto left = std::chrono::duration_cast<Millis>(deadline - ClusterClock::now());
        if (left <= Millis::zero() || !net::wait_readable(sock.fd(), left))
            return {ProbeOutcome::Timeout, "no status line before timeout"};
        ssize_t n = ::recv(sock.fd(), buf, sizeof(buf), 0);
        if (n <= 0)
            return {ProbeOutcome::Refused, "connection closed before status line"};
        head.append(buf, static_cast<std::size_t>(n));
        if (head.size() > 8192)
            return {ProbeOutcome::BadStatus, "status line too long"};
    }

    // "HTTP/1.1 200 OK"
    auto sp = head.find(' ');
    int status = 0;
    if (head.rfind("HTTP/", 0) != 0 || sp == std::string::npos ||
        std::from_chars(head.data() + sp + 1, head.data() + head.size(), status).ec != std::errc{}) {
        return {ProbeOutcome::BadStatus, "malformed status line"};
    }
    if (status != spec.expect_status)
        return {ProbeOutcome::BadStatus, "status " + std::to_string(status)};
    return {ProbeOutcome::Success, {}};
}

} // namespace

ProbeResult probe(const Endpoint& backend, const ProbeSpec& spec)
{
    const auto deadline = ClusterClock::now() + spec.timeout;
    auto conn = net::connect_with_timeout(backend, spec.timeout);
    switch (conn.status) {
    case net::ConnectStatus::Connected:
        break;
    case net::ConnectStatus::Timeout:
        return {ProbeOutcome::Timeout, conn.detail};
    case net::ConnectStatus::Refused:
    case net::ConnectStatus::Unreachable:
        return {ProbeOutcome::Refused, conn.detail};
    }
    if (spec.kind == ProbeKind::TcpConnect)
        return {ProbeOutcome::Success, {}};
    return http_status_check(conn.socket, backend, spec, deadline);
}

ProbeResult probe(const RealServer& backend, const ProbeSpec& spec)
{
    return probe(backend.address(), spec);
}

std::pair<HealthState, Transition> record(HealthState state, const ProbeResult& result, const ProbeSpec& spec)
{
    if (result.ok()) {
        state.consecutive_failures = 0;
        state.consecutive_successes = std::min(state.consecutive_successes + 1, spec.rise);
        if (!state.alive && state.consecutive_successes >= spec.rise) {
            state.alive = true;
            return {state, Transition::CameUp};
        }
    } else {
        state.consecutive_successes = 0;
        state.consecutive_failures = std::min(state.consecutive_failures + 1, spec.fall);
        if (state.alive && state.consecutive_failures >= spec.fall) {
            state.alive = false;
            return {state, Transition::WentDown};
        }
    }
    return {state, Transition::None};
}

Result<void, ReconcileError> reconcile(Director& director, std::string_view backend_id, Transition transition,
                                       Instant now)
{
    if (transition == Transition::None)
        throw std::invalid_argument("reconcile requires a liveness transition");

    const bool alive = transition == Transition::CameUp;
    if (!director.set_backend_alive(backend_id, alive))
        return unexpected(ReconcileError::UnknownBackend);
    if (!alive)
        director.force_release(backend_id, now);
    return {};
}

void HealthMonitor::track(const std::string& backend_id, bool alive)
{
    states_[backend_id] = HealthState{0, 0, alive};
}

Transition HealthMonitor::observe(std::string_view backend_id, const ProbeResult& result)
{
    auto it = states_.find(backend_id);
    if (it == states_.end())
        return Transition::None;
    auto [next, transition] = record(it->second, result, spec_);
    it->second = next;
    return transition;
}

const HealthState* HealthMonitor::state(std::string_view backend_id) const
{
    auto it = states_.find(backend_id);
    return it == states_.end() ? nullptr : &it->second;
}

} // namespace havld
