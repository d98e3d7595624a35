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
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <thread>

namespace havld {

// Owns a set of short-lived worker threads; finished workers are joined
// lazily on the next spawn.
class TaskGroup {
public:
    TaskGroup() = default;
    TaskGroup(const TaskGroup&) = delete;
    TaskGroup& operator=(const TaskGroup&) = delete;
    ~TaskGroup() { join_all(); }

    void spawn(std::function<void()> fn)
    {
        std::lock_guard lock(mu_);
        reap_locked();
        auto done = std::make_shared<std::atomic<bool>>(false);
        workers_.push_back({std::thread([fn = std::move(fn), done] {
                                fn();
                                done->store(true);
                            }),
                            done});
    }

    void join_all()
    {
        std::list<Worker> all;
        {
            std::lock_guard lock(mu_);
            all.swap(workers_);
        }
        for (auto& w : all) {
            if (w.thread.joinable())
                w.thread.join();
        }
    }

private:
    struct Worker {
        std::thread thread;
        std::shared_ptr<std::atomic<bool>> done;
    };

    void reap_locked()
    {
        for (auto it = workers_.begin(); it != workers_.end();) {
            if (it->done->load()) {
                it->thread.join();
                it = workers_.erase(it);
            } else {
                ++it;
            }
        }
    }

    std::mutex mu_;
    std::list<Worker> workers_;
};

} // namespace havld
