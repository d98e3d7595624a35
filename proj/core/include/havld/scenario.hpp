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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "havld/result.hpp"
#include "havld/time.hpp"

namespace havld {

enum class EventKind : std::uint8_t { ClientRequest, CrashNode, RecoverNode, PartitionLink, HealLink, EndScenario };

std::string_view to_string(EventKind k) noexcept;

struct ScenarioEvent {
    Millis at{0};
    EventKind kind = EventKind::ClientRequest;
    // Crash/Recover target, or first end of a link.
    std::string node;
    // Second end of a link.
    std::string peer;
    // ClientRequest document path.
    std::string path;

    bool operator==(const ScenarioEvent&) const = default;
};

struct ScenarioParseError {
    int line = 0;
    std::string message;
};

std::string to_string(const ScenarioParseError& e);

// One event per line, "<time_ms> <event> [args...]":
//
//   <t> request [path]
//   <t> requests <count> <every_ms> [path]    expands to <count> requests
//   <t> crash <node>
//   <t> recover <node>
//   <t> partition <a> <b>
//   <t> heal <a> <b>
//   <t> end
//
// Blank lines and '#' comments are ignored. Events keep file order; the
// simulator orders them by (time, position).
Result<std::vector<ScenarioEvent>, ScenarioParseError> load_scenario(std::string_view text);
Result<std::vector<ScenarioEvent>, ScenarioParseError> load_scenario_file(const std::filesystem::path& path);

inline constexpr std::string_view kDefaultRequestPath = "/index.html";

} // namespace havld
