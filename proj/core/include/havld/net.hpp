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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>

#include <netinet/in.h>

#include "havld/endpoint.hpp"
#include "havld/time.hpp"

namespace havld::net {

// Owning file descriptor.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) noexcept : fd_(fd) {}
    Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
    Socket& operator=(Socket&& o) noexcept
    {
        if (this != &o) {
            reset();
            fd_ = std::exchange(o.fd_, -1);
        }
        return *this;
    }
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket() { reset(); }

    int fd() const noexcept { return fd_; }
    bool valid() const noexcept { return fd_ >= 0; }
    void reset() noexcept;

private:
    int fd_ = -1;
};

// IPv4 only. Accepts dotted quads and resolvable host names.
std::optional<sockaddr_in> resolve(const Endpoint& ep);

enum class ConnectStatus : std::uint8_t { Connected, Refused, Timeout, Unreachable };

struct ConnectResult {
    ConnectStatus status;
    Socket socket;
    std::string detail;
};

// Blocking-mode socket on success.
ConnectResult connect_with_timeout(const Endpoint& ep, Millis timeout);

// Throws std::system_error when the address cannot be bound (e.g. port in
// use). Port 0 picks an ephemeral port.
Socket listen_tcp(const Endpoint& ep, int backlog = 128);
Socket bind_udp(const Endpoint& ep);

std::uint16_t local_port(const Socket& s);

bool write_all(int fd, std::span<const std::byte> data);
bool write_all(int fd, std::string_view data);

// Waits for readability. Returns false on timeout.
bool wait_readable(int fd, Millis timeout);

} // namespace havld::net
