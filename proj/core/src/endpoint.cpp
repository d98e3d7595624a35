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

#include "havld/endpoint.hpp"

#include <charconv>

namespace havld {

std::optional<Endpoint> parse_endpoint(std::string_view text, bool require_port)
{
    auto colon = text.rfind(':');
    if (colon == std::string_view::npos) {
        if (require_port || text.empty())
            return std::nullopt;
        return Endpoint{std::string(text), 0};
    }
    auto host = text.substr(0, colon);
    auto port_text = text.substr(colon + 1);
    if (host.empty() || port_text.empty() || host.find(':') != std::string_view::npos)
        return std::nullopt;

    unsigned port = 0;
    auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
    if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port == 0 || port > 65535)
        return std::nullopt;
    return Endpoint{std::string(host), static_cast<std::uint16_t>(port)};
}

std::string to_string(const Endpoint& ep)
{
    if (ep.port == 0)
        return ep.host;
    return ep.host + ":" + std::to_string(ep.port);
}

} // namespace havld
