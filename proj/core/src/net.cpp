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

#include "havld/net.hpp"

#include <cerrno>
#include <cstring>

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

namespace havld::net {

void Socket::reset() noexcept
{
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

std::optional<sockaddr_in> resolve(const Endpoint& ep)
{
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(ep.port);
    if (::inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) == 1)
        return addr;

    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(ep.host.c_str(), nullptr, &hints, &res) != 0 || !res)
        return std::nullopt;
    addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
    ::freeaddrinfo(res);
    return addr;
}

namespace {

bool set_nonblocking(int fd, bool on)
{
    int flags = ::fcntl(fd, F_GETFL, 0);
    if (flags < 0)
        return false;
    flags = on ? (flags | O_NONBLOCK) : (flags & ~O_NONBLOCK);
    return ::fcntl(fd, F_SETFL, flags) == 0;
}

ConnectStatus classify(int err)
{
    switch (err) {
    case ECONNREFUSED:
    case ECONNRESET:
        return ConnectStatus::Refused;
    case ETIMEDOUT:
        return ConnectStatus::Timeout;
    default:
        return ConnectStatus::Unreachable;
    }
}

} // namespace

ConnectResult connect_with_timeout(const Endpoint& ep, Millis timeout)
{
    auto addr = resolve(ep);
    if (!addr)
        return {ConnectStatus::Unreachable, {}, "cannot resolve " + ep.host};

    Socket s(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!s.valid())
        return {ConnectStatus::Unreachable, {}, std::strerror(errno)};
    set_nonblocking(s.fd(), true);

    int rc = ::connect(s.fd(), reinterpret_cast<const sockaddr*>(&*addr), sizeof(*addr));
    if (rc != 0 && errno != EINPROGRESS) {
        int err = errno;
        return {classify(err), {}, std::strerror(err)};
    }
    if (rc != 0) {
        pollfd pfd{s.fd(), POLLOUT, 0};
        int n = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
        if (n == 0)
            return {ConnectStatus::Timeout, {}, "connect timed out"};
        int err = 0;
        socklen_t len = sizeof(err);
        ::getsockopt(s.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
        if (n < 0)
            err = errno;
        if (err != 0)
            return {classify(err), {}, std::strerror(err)};
    }
    set_nonblocking(s.fd(), false);
    return {ConnectStatus::Connected, std::move(s), {}};
}

namespace {

Socket bind_socket(const Endpoint& ep, int type)
{
    auto addr = resolve(ep);
    if (!addr)
        throw std::system_error(std::make_error_code(std::errc::address_not_available),
                                "cannot resolve " + ep.host);
    Socket s(::socket(AF_INET, type | SOCK_CLOEXEC, 0));
    if (!s.valid())
        throw std::system_error(errno, std::generic_category(), "socket");
    int one = 1;
    ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(s.fd(), reinterpret_cast<const sockaddr*>(&*addr), sizeof(*addr)) != 0)
        throw std::system_error(errno, std::generic_category(), "bind " + to_string(ep));
    return s;
}

} // namespace

Socket listen_tcp(const Endpoint& ep, int backlog)
{
    Socket s = bind_socket(ep, SOCK_STREAM);
    if (::listen(s.fd(), backlog) != 0)
        throw std::system_error(errno, std::generic_category(), "listen " + to_string(ep));
    return s;
}

Socket bind_udp(const Endpoint& ep)
{
    return bind_socket(ep, SOCK_DGRAM);
}

std::uint16_t local_port(const Socket& s)
{
    sockaddr_in addr{};
    socklen_t len = sizeof(addr);
    if (::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&addr), &len) != 0)
        return 0;
    return ntohs(addr.sin_port);
}

bool write_all(int fd, std::span<const std::byte> data)
{
    while (!data.empty()) {
        ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            return false;
        }
        data = data.subspan(static_cast<std::size_t>(n));
    }
    return true;
}

bool write_all(int fd, std::string_view data)
{
    return write_all(fd, std::as_bytes(std::span(data.data(), data.size())));
}

bool wait_readable(int fd, Millis timeout)
{
    pollfd pfd{fd, POLLIN, 0};
    int n;
    do {
        n = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
    } while (n < 0 && errno == EINTR);
    return n > 0;
}

} // namespace havld::net
