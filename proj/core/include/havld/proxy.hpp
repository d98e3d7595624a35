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
#include <functional>
#include <string>
#include <thread>

#include "havld/director.hpp"
#include "havld/endpoint.hpp"
#include "havld/net.hpp"
#include "havld/task_group.hpp"

namespace havld {

// User-space data plane for one virtual service: every accepted client
// connection is admitted through the director, spliced byte-for-byte to the
// chosen backend, and released when either side closes.
class Proxy {
public:
    // Called with the backend id when a connect to it fails after admission.
    using FailureHint = std::function<void(const std::string& backend)>;

    // Binds `listen` immediately (port 0 = ephemeral); throws
    // std::system_error if that fails. Admissions use `service` as the key.
    Proxy(Endpoint listen, ServiceKey service, SynchronizedDirector& director, FailureHint hint = {},
          Millis connect_timeout = Millis{1000});
    Proxy(const Proxy&) = delete;
    Proxy& operator=(const Proxy&) = delete;
    ~Proxy();

    void start();
    // Stops accepting, closes in-flight connections and waits for them.
    void stop();

    std::uint16_t port() const noexcept { return port_; }
    const ServiceKey& service() const noexcept { return service_; }

private:
    void accept_loop();
    void handle(net::Socket client);

    ServiceKey service_;
    SynchronizedDirector& director_;
    FailureHint hint_;
    Millis connect_timeout_;
    net::Socket listener_;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::thread acceptor_;
    TaskGroup workers_;
};

} // namespace havld
