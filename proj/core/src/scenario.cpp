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

#include "havld/scenario.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace havld {

std::string_view to_string(EventKind k) noexcept
{
    switch (k) {
    case EventKind::ClientRequest:
        return "request";
    case EventKind::CrashNode:
        return "crash";
    case EventKind::RecoverNode:
        return "recover";
    case EventKind::PartitionLink:
        return "partition";
    case EventKind::HealLink:
        return "heal";
    case EventKind::EndScenario:
        return "end";
    }
    return "?";
}

std::string to_string(const ScenarioParseError& e)
{
    return "line " + std::to_string(e.line) + ": " + e.message;
}

namespace {

std::optional<std::int64_t> parse_ms(const std::string& s)
{
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || v < 0)
        return std::nullopt;
    return v;
}

} // namespace

Result<std::vector<ScenarioEvent>, ScenarioParseError> load_scenario(std::string_view text)
{
    std::vector<ScenarioEvent> events;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream words(line);
        std::vector<std::string> w;
        for (std::string tok; words >> tok;)
            w.push_back(tok);
        if (w.empty())
            continue;

        auto fail = [&](std::string msg) { return unexpected(ScenarioParseError{lineno, std::move(msg)}); };

        auto at = parse_ms(w[0]);
        if (!at)
            return fail("invalid time '" + w[0] + "'");
        if (w.size() < 2)
            return fail("missing event after time");

        const std::string& verb = w[1];
        const std::size_t nargs = w.size() - 2;
        ScenarioEvent ev;
        ev.at = Millis{*at};

        if (verb == "request") {
            if (nargs > 1)
                return fail("usage: <t> request [path]");
            ev.kind = EventKind::ClientRequest;
            ev.path = nargs == 1 ? w[2] : std::string(kDefaultRequestPath);
            events.push_back(std::move(ev));
        } else if (verb == "requests") {
            if (nargs < 2 || nargs > 3)
                return fail("usage: <t> requests <count> <every_ms> [path]");
            auto count = parse_ms(w[2]);
            auto every = parse_ms(w[3]);
            if (!count || !every || *every == 0)
                return fail("requests needs a count and a positive spacing");
            std::string path = nargs == 3 ? w[4] : std::string(kDefaultRequestPath);
            for (std::int64_t i = 0; i < *count; ++i)
                events.push_back({Millis{*at + i * *every}, EventKind::ClientRequest, {}, {}, path});
        } else if (verb == "crash" || verb == "recover") {
            if (nargs != 1)
                return fail("usage: <t> " + verb + " <node>");
            ev.kind = verb == "crash" ? EventKind::CrashNode : EventKind::RecoverNode;
            ev.node = w[2];
            events.push_back(std::move(ev));
        } else if (verb == "partition" || verb == "heal") {
            if (nargs != 2)
                return fail("usage: <t> " + verb + " <a> <b>");
            ev.kind = verb == "partition" ? EventKind::PartitionLink : EventKind::HealLink;
            ev.node = w[2];
            ev.peer = w[3];
            events.push_back(std::move(ev));
        } else if (verb == "end") {
            if (nargs != 0)
                return fail("end takes no arguments");
            ev.kind = EventKind::EndScenario;
            events.push_back(std::move(ev));
        } else {
            return fail("unknown event '" + verb + "'");
        }
    }
    return events;
}

Result<std::vector<ScenarioEvent>, ScenarioParseError> load_scenario_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        return unexpected(ScenarioParseError{0, "cannot open " + path.string()});
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

} // namespace havld
