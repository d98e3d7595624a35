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

#include "havld/director.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace havld {

std::string to_string(const ServiceKey& key)
{
    return "TCP " + key.vip + ":" + std::to_string(key.port);
}

std::string_view to_string(ForwardMethod m) noexcept
{
    return m == ForwardMethod::Route ? "Route" : "Masq";
}

std::string_view to_string(Refusal r) noexcept
{
    switch (r) {
    case Refusal::NoBackend:
        return "NoBackend";
    case Refusal::UnknownService:
        return "UnknownService";
    case Refusal::DuplicateFlow:
        return "DuplicateFlow";
    }
    return "?";
}

Director::Director(Millis inactive_ttl) : ttl_(inactive_ttl) {}

void Director::add_service(VirtualService service)
{
    if (find_service(service.key))
        throw std::invalid_argument("duplicate virtual service " + to_string(service.key));
    std::set<std::string, std::less<>> ids;
    for (const auto& s : service.pool) {
        if (!ids.insert(s.id()).second)
            throw std::invalid_argument("duplicate server id " + s.id() + " in " + service.name);
    }
    note_pool_change(service.scheduler);
    services_.push_back(std::move(service));
}

void Director::clear() noexcept
{
    services_.clear();
    conns_.clear();
}

VirtualService* Director::find_mut(const ServiceKey& key)
{
    auto it = std::find_if(services_.begin(), services_.end(),
                           [&](const VirtualService& s) { return s.key == key; });
    return it == services_.end() ? nullptr : &*it;
}

const VirtualService* Director::find_service(const ServiceKey& key) const
{
    return const_cast<Director*>(this)->find_mut(key);
}

RealServer* Director::backend_mut(const ServiceKey& key, std::string_view backend_id)
{
    auto* svc = find_mut(key);
    if (!svc)
        return nullptr;
    auto it = std::find_if(svc->pool.begin(), svc->pool.end(),
                           [&](const RealServer& s) { return s.id() == backend_id; });
    return it == svc->pool.end() ? nullptr : &*it;
}

const RealServer* Director::find_backend(const ServiceKey& key, std::string_view backend_id) const
{
    return const_cast<Director*>(this)->backend_mut(key, backend_id);
}

Result<Admission, Refusal> Director::admit(const ServiceKey& key, const Endpoint& client, Instant now)
{
    auto* svc = find_mut(key);
    if (!svc)
        return unexpected(Refusal::UnknownService);

    FlowKey flow{key, client};
    auto existing = conns_.find(flow);
    if (existing != conns_.end()) {
        if (existing->second.state == ConnectionState::Active)
            return unexpected(Refusal::DuplicateFlow);
        // A new flow from the same endpoint supersedes its lingering entry.
        if (auto* old = backend_mut(key, existing->second.backend))
            old->drop_inactive();
        conns_.erase(existing);
    }

    auto idx = select(svc->scheduler, svc->pool);
    if (!idx)
        return unexpected(Refusal::NoBackend);

    auto& server = svc->pool[*idx];
    server.open_connection();
    conns_.emplace(std::move(flow), ConnectionEntry{client, key, server.id(), ConnectionState::Active, now});
    return Admission{server.id(), server.address()};
}

Result<void, ReleaseError> Director::release(const ServiceKey& key, const Endpoint& client, Instant now)
{
    auto it = conns_.find(FlowKey{key, client});
    if (it == conns_.end() || it->second.state != ConnectionState::Active)
        return unexpected(ReleaseError::UnknownConnection);

    if (auto* server = backend_mut(key, it->second.backend))
        server->deactivate_connection();
    it->second.state = ConnectionState::Inactive;
    it->second.expires_at = now + ttl_;
    return {};
}

std::size_t Director::expire(Instant now)
{
    std::size_t removed = 0;
    for (auto it = conns_.begin(); it != conns_.end();) {
        const auto& e = it->second;
        if (e.state == ConnectionState::Inactive && e.expires_at <= now) {
            if (auto* server = backend_mut(e.service, e.backend))
                server->drop_inactive();
            it = conns_.erase(it);
            ++removed;
        } else {
            ++it;
        }
    }
    return removed;
}

std::size_t Director::force_release(std::string_view backend_id, Instant now)
{
    std::size_t released = 0;
    for (auto& [flow, e] : conns_) {
        if (e.backend != backend_id || e.state != ConnectionState::Active)
            continue;
        if (auto* server = backend_mut(e.service, e.backend))
            server->deactivate_connection();
        e.state = ConnectionState::Inactive;
        e.expires_at = now + ttl_;
        ++released;
    }
    return released;
}

bool Director::set_backend_alive(std::string_view backend_id, bool alive)
{
    bool found = false;
    for (auto& svc : services_) {
        for (auto& s : svc.pool) {
            if (s.id() == backend_id) {
                s.set_alive(alive);
                note_pool_change(svc.scheduler);
                found = true;
            }
        }
    }
    return found;
}

bool Director::set_backend_weight(const ServiceKey& key, std::string_view backend_id, std::uint32_t weight)
{
    auto* s = backend_mut(key, backend_id);
    if (!s)
        return false;
    s->set_weight(weight);
    note_pool_change(find_mut(key)->scheduler);
    return true;
}

namespace {

// ipvsadm prints well-known ports by service name.
std::string port_label(std::uint16_t port)
{
    switch (port) {
    case 21:
        return "ftp";
    case 80:
        return "http";
    case 443:
        return "https";
    default:
        return std::to_string(port);
    }
}

std::string pad_right(std::string s, std::size_t width)
{
    if (s.size() < width)
        s.append(width - s.size(), ' ');
    return s;
}

} // namespace

std::string Director::render_table() const
{
    std::ostringstream out;
    out << "IP Virtual Server version 1.2.1 (size=4096)\n";
    out << "Prot LocalAddress:Port Scheduler Flags\n";
    out << "  -> " << pad_right("RemoteAddress:Port", 28) << " Forward Weight ActiveConn InActConn\n";
    for (const auto& svc : services_) {
        out << "TCP " << svc.name << ':' << port_label(svc.key.port) << ' ' << to_string(svc.scheduler.kind)
            << '\n';
        for (const auto& s : svc.pool) {
            out << "  -> " << pad_right(s.id() + ":" + port_label(s.address().port), 28) << ' '
                << to_string(svc.forward) << ' ' << s.weight() << ' ' << s.active_conns() << ' '
                << s.inactive_conns() << '\n';
        }
    }
    return out.str();
}

} // namespace havld
