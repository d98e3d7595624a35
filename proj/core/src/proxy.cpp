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

#include "havld/proxy.hpp"

#include <array>
#include <cerrno>
#include <vector>

#include <arpa/inet.h>
#include <fcntl.h>
#include <poll.h>
#include <sys/socket.h>

#include "havld/log.hpp"

namespace havld {

namespace {

constexpr std::size_t kBufferSize = 64 * 1024;

// One direction of a spliced connection.
struct Pipe {
    int from;
    int to;
    std::vector<char> buf = std::vector<char>(kBufferSize);
    std::size_t off = 0;
    std::size_t len = 0;
    bool eof = false;
    bool shut = false;

    bool drained() const { return eof && off == len; }
};

void set_nonblocking(int fd)
{
    ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL, 0) | O_NONBLOCK);
}

// Returns false on a hard socket error.
bool pump(Pipe& p, short read_events, short write_events)
{
    if (p.len > p.off && (write_events & (POLLOUT | POLLERR | POLLHUP))) {
        ssize_t n = ::send(p.to, p.buf.data() + p.off, p.len - p.off, MSG_NOSIGNAL);
        if (n < 0 && errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR)
            return false;
        if (n > 0)
            p.off += static_cast<std::size_t>(n);
        if (p.off == p.len)
            p.off = p.len = 0;
    }
    if (!p.eof && p.len == 0 && (read_events & (POLLIN | POLLHUP | POLLERR))) {
        ssize_t n = ::recv(p.from, p.buf.data(), p.buf.size(), 0);
        if (n == 0)
            p.eof = true;
        else if (n < 0 && errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR)
            return false;
        else if (n > 0)
            p.len = static_cast<std::size_t>(n);
    }
    if (p.drained() && !p.shut) {
        ::shutdown(p.to, SHUT_WR);
        p.shut = true;
    }
    return true;
}

void splice(int client, int backend, const std::atomic<bool>& stopping)
{
    set_nonblocking(client);
    set_nonblocking(backend);
    Pipe up{client, backend};
    Pipe down{backend, client};

    while (!stopping && !(up.shut && down.shut)) {
        std::array<pollfd, 4> fds{};
        fds[0] = {up.from, static_cast<short>(!up.eof && up.len == 0 ? POLLIN : 0), 0};
        fds[1] = {up.to, static_cast<short>(up.len > up.off ? POLLOUT : 0), 0};
        fds[2] = {down.from, static_cast<short>(!down.eof && down.len == 0 ? POLLIN : 0), 0};
        fds[3] = {down.to, static_cast<short>(down.len > down.off ? POLLOUT : 0), 0};
        int n = ::poll(fds.data(), fds.size(), 200);
        if (n < 0 && errno != EINTR)
            return;
        if (n <= 0)
            continue;
        if (!pump(up, fds[0].revents, fds[1].revents) || !pump(down, fds[2].revents, fds[3].revents))
            return;
    }
}

Endpoint peer_endpoint(int fd)
{
    sockaddr_in addr{};
    socklen_t len = sizeof(addr);
    if (::getpeername(fd, reinterpret_cast<sockaddr*>(&addr), &len) != 0)
        return {"0.0.0.0", 0};
    char text[INET_ADDRSTRLEN] = {};
    ::inet_ntop(AF_INET, &addr.sin_addr, text, sizeof(text));
    return {text, ntohs(addr.sin_port)};
}

} // namespace

Proxy::Proxy(Endpoint listen, ServiceKey service, SynchronizedDirector& director, FailureHint hint,
             Millis connect_timeout)
    : service_(std::move(service)), director_(director), hint_(std::move(hint)), connect_timeout_(connect_timeout),
      listener_(net::listen_tcp(listen)), port_(net::local_port(listener_))
{
}

Proxy::~Proxy()
{
    stop();
}

void Proxy::start()
{
    if (acceptor_.joinable())
        return;
    acceptor_ = std::thread([this] { accept_loop(); });
}

void Proxy::stop()
{
    stopping_ = true;
    if (acceptor_.joinable())
        acceptor_.join();
    workers_.join_all();
    listener_.reset();
}

void Proxy::accept_loop()
{
    while (!stopping_) {
        if (!net::wait_readable(listener_.fd(), Millis{100}))
            continue;
        int fd = ::accept4(listener_.fd(), nullptr, nullptr, SOCK_CLOEXEC);
        if (fd < 0)
            continue;
        workers_.spawn([this, conn = std::make_shared<net::Socket>(fd)]() mutable { handle(std::move(*conn)); });
    }
}

void Proxy::handle(net::Socket client)
{
    static const auto logger = log::get("proxy");
    const Endpoint from = peer_endpoint(client.fd());

    auto admitted = director_.with([&](Director& d) { return d.admit(service_, from, ClusterClock::now()); });
    if (!admitted) {
        logger->warn("{} refused: {}", to_string(from), to_string(admitted.error()));
        return;
    }

    auto release = [&] {
        director_.with([&](Director& d) { (void)d.release(service_, from, ClusterClock::now()); });
    };

    auto conn = net::connect_with_timeout(admitted->address, connect_timeout_);
    if (conn.status != net::ConnectStatus::Connected) {
        logger->warn("backend {} ({}) unreachable: {}", admitted->backend, to_string(admitted->address), conn.detail);
        release();
        if (hint_)
            hint_(admitted->backend);
        return;
    }

    logger->debug("{} -> {}", to_string(from), admitted->backend);
    splice(client.fd(), conn.socket.fd(), stopping_);
    release();
}

} // namespace havld
