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

#include "havld/backend.hpp"

#include <sys/socket.h>

#include "havld/log.hpp"

namespace havld {

namespace {

std::string_view reason_phrase(int status)
{
    switch (status) {
    case 200:
        return "OK";
    case 404:
        return "Not Found";
    case 500:
        return "Internal Server Error";
    case 503:
        return "Service Unavailable";
    default:
        return "Status";
    }
}

} // namespace

std::string default_backend_body(const std::string& name)
{
    return "<html><body><h1>" + name + "</h1></body></html>\n";
}

TestBackend::TestBackend(std::string name, Endpoint listen)
    : name_(std::move(name)), listener_(net::listen_tcp(listen)), port_(net::local_port(listener_)),
      body_(default_backend_body(name_))
{
}

TestBackend::~TestBackend()
{
    stop();
}

void TestBackend::start()
{
    if (acceptor_.joinable())
        return;
    acceptor_ = std::thread([this] { accept_loop(); });
}

void TestBackend::stop()
{
    stopping_ = true;
    if (acceptor_.joinable())
        acceptor_.join();
    workers_.join_all();
    listener_.reset();
}

void TestBackend::wait()
{
    if (acceptor_.joinable())
        acceptor_.join();
}

void TestBackend::set_status(int status)
{
    std::lock_guard lock(mu_);
    status_ = status;
}

void TestBackend::set_body(std::string body)
{
    std::lock_guard lock(mu_);
    body_ = std::move(body);
}

void TestBackend::accept_loop()
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

std::string TestBackend::response(std::string_view method)
{
    std::lock_guard lock(mu_);
    std::string head = "HTTP/1.1 " + std::to_string(status_) + " " + std::string(reason_phrase(status_)) + "\r\n";
    head += "Server: havld-test-backend\r\n";
    head += "serve_server: " + name_ + "\r\n";
    head += "Connection: close\r\n";
    head += "Content-Type: text/html; charset=UTF-8\r\n";
    head += "Content-Length: " + std::to_string(body_.size()) + "\r\n\r\n";
    if (method != "HEAD")
        head += body_;
    return head;
}

void TestBackend::handle(net::Socket conn)
{
    std::string request;
    char buf[4096];
    while (request.find("\r\n\r\n") == std::string::npos) {
        if (stopping_ || !net::wait_readable(conn.fd(), Millis{2000}))
            return;
        ssize_t n = ::recv(conn.fd(), buf, sizeof(buf), 0);
        if (n <= 0)
            return;
        request.append(buf, static_cast<std::size_t>(n));
        if (request.size() > 64 * 1024)
            return;
    }
    auto method = std::string_view(request).substr(0, request.find(' '));
    ++requests_;
    net::write_all(conn.fd(), response(method));
    ::shutdown(conn.fd(), SHUT_WR);
}

} // namespace havld
