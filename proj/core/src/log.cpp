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

#include "havld/log.hpp"

#include <mutex>

#include <spdlog/sinks/stdout_sinks.h>

namespace havld::log {

namespace {

std::mutex g_mu;
spdlog::level::level_enum g_level = spdlog::level::info;

} // namespace

std::shared_ptr<spdlog::logger> get(const std::string& component)
{
    std::lock_guard lock(g_mu);
    if (auto existing = spdlog::get(component))
        return existing;
    auto logger = spdlog::stderr_logger_mt(component);
    logger->set_pattern("%Y-%m-%dT%H:%M:%S.%e%z %l %n %v");
    logger->set_level(g_level);
    return logger;
}

void set_level(spdlog::level::level_enum level)
{
    std::lock_guard lock(g_mu);
    g_level = level;
    spdlog::apply_all([level](const std::shared_ptr<spdlog::logger>& l) { l->set_level(level); });
}

} // namespace havld::log
