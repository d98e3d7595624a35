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

#include <compare>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "havld/endpoint.hpp"
#include "havld/result.hpp"
#include "havld/scheduler.hpp"
#include "havld/time.hpp"

namespace havld {

enum class Protocol : std::uint8_t { Tcp };

struct ServiceKey {
    std::string vip;
    std::uint16_t port = 0;
    Protocol protocol = Protocol::Tcp;

    auto operator<=>(const ServiceKey&) const = default;
};

std::string to_string(const ServiceKey& key);

// Display label only; the data plane always proxies.
enum class ForwardMethod : std::uint8_t { Route, Masq };

std::string_view to_string(ForwardMethod m) noexcept;

struct VirtualService {
    // Display name used by the table ("www.orange.com").
    std::string name;
    ServiceKey key;
    SchedulerState scheduler;
    ForwardMethod forward = ForwardMethod::Route;
    std::vector<RealServer> pool;
};

enum class ConnectionState : std::uint8_t { Active, Inactive };

struct ConnectionEntry {
    Endpoint client;
    ServiceKey service;
    std::string backend;
    ConnectionState state = ConnectionState::Active;
    // Meaningful once Inactive.
    Instant expires_at{};
};

enum class Refusal : std::uint8_t {
    NoBackend,
    UnknownService,
    // The client endpoint already has an Active flow on this service.
    DuplicateFlow,
};

std::string_view to_string(Refusal r) noexcept;

struct Admission {
    std::string backend;
    Endpoint address;
};

enum class ReleaseError : std::uint8_t { UnknownConnection };

// Owns virtual services and the connection table. Not internally
// synchronized; see SynchronizedDirector for shared use.
class Director {
public:
    using FlowKey = std::pair<ServiceKey, Endpoint>;

    static constexpr Millis kDefaultInactiveTtl{15'000};

    explicit Director(Millis inactive_ttl = kDefaultInactiveTtl);

    // Throws std::invalid_argument on a duplicate (vip, port, protocol) or a
    // duplicate server id inside the pool.
    void add_service(VirtualService service);
    // Drops every service and connection.
    void clear() noexcept;

    Result<Admission, Refusal> admit(const ServiceKey& key, const Endpoint& client, Instant now);
    Result<void, ReleaseError> release(const ServiceKey& key, const Endpoint& client, Instant now);
    // Removes Inactive entries with expires_at <= now.
    std::size_t expire(Instant now);

    // Moves every Active flow on the backend (in any service) to Inactive.
    std::size_t force_release(std::string_view backend_id, Instant now);
    // Flips liveness in every service containing the backend and resets those
    // services' rotation. Returns false if no service has that backend.
    bool set_backend_alive(std::string_view backend_id, bool alive);
    bool set_backend_weight(const ServiceKey& key, std::string_view backend_id, std::uint32_t weight);

    const std::vector<VirtualService>& services() const noexcept { return services_; }
    const VirtualService* find_service(const ServiceKey& key) const;
    const RealServer* find_backend(const ServiceKey& key, std::string_view backend_id) const;
    const std::map<FlowKey, ConnectionEntry>& connections() const noexcept { return conns_; }
    Millis inactive_ttl() const noexcept { return ttl_; }

    // ipvsadm -l style listing.
    std::string render_table() const;

private:
    VirtualService* find_mut(const ServiceKey& key);
    RealServer* backend_mut(const ServiceKey& key, std::string_view backend_id);

    Millis ttl_;
    std::vector<VirtualService> services_;
    std::map<FlowKey, ConnectionEntry> conns_;
};

// Serializes all access to one Director across threads.
class SynchronizedDirector {
public:
    explicit SynchronizedDirector(Millis inactive_ttl = Director::kDefaultInactiveTtl)
        : director_(inactive_ttl)
    {
    }

    template <class F>
    decltype(auto) with(F&& f)
    {
        std::lock_guard lock(mu_);
        return std::forward<F>(f)(director_);
    }

    template <class F>
    decltype(auto) with(F&& f) const
    {
        std::lock_guard lock(mu_);
        return std::forward<F>(f)(static_cast<const Director&>(director_));
    }

private:
    mutable std::mutex mu_;
    Director director_;
};

} // namespace havld
