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
#include <cstdint>
#include <mutex>
#include <string>
#include <thread>

#include "havld/endpoint.hpp"
#include "havld/net.hpp"
#include "havld/task_group.hpp"

namespace havld {

// Minimal HTTP/1.1 responder standing in for a web server. Every request
// gets the configured status with a "serve_server: <name>" header and
// "Connection: close"; HEAD omits the body.
class TestBackend {
public:
    // Binds immediately; throws std::system_error if the port is taken.
    TestBackend(std::string name, Endpoint listen);
    TestBackend(const TestBackend&) = delete;
    TestBackend& operator=(const TestBackend&) = delete;
    ~TestBackend();

    void start();
    void stop();

    std::uint16_t port() const noexcept { return port_; }
    const std::string& name() const noexcept { return name_; }
    std::uint64_t requests() const noexcept { return requests_.load(); }

    void set_status(int status);
    void set_body(std::string body);

    // Blocks until stop(); used by the CLI.
    void wait();

private:
    void accept_loop();
    void handle(net::Socket conn);
    std::string response(std::string_view method);

    std::string name_;
    net::Socket listener_;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::atomic<std::uint64_t> requests_{0};
    std::thread acceptor_;
    TaskGroup workers_;

    std::mutex mu_;
    int status_ = 200;
    std::string body_;
};

std::string default_backend_body(const std::string& name);

} // namespace havld
