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

#include "havld/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace havld {

std::string to_string(const ConfigError& e)
{
    std::string out = "line " + std::to_string(e.line) + ": ";
    if (!e.path.empty())
        out += e.path + ": ";
    return out + e.message;
}

namespace {

// ---- lexing ---------------------------------------------------------------

enum class Tok : std::uint8_t { Word, LBrace, RBrace, Equals, End };

struct Token {
    Tok kind;
    std::string text;
    int line;
};

std::vector<Token> lex(std::string_view text)
{
    std::vector<Token> out;
    int line = 1;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') {
            ++line;
            ++i;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '#') {
            while (i < text.size() && text[i] != '\n')
                ++i;
        } else if (c == '{' || c == '}' || c == '=') {
            out.push_back({c == '{' ? Tok::LBrace : c == '}' ? Tok::RBrace : Tok::Equals, std::string(1, c), line});
            ++i;
        } else {
            std::size_t start = i;
            while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '{' &&
                   text[i] != '}' && text[i] != '=' && text[i] != '#')
                ++i;
            out.push_back({Tok::Word, std::string(text.substr(start, i - start)), line});
        }
    }
    out.push_back({Tok::End, {}, line});
    return out;
}

// ---- generic block tree ---------------------------------------------------

struct Assign {
    std::string key;
    std::string value;
    int line;
};

struct Block {
    std::string keyword;
    std::optional<std::string> label;
    int line = 0;
    std::vector<Assign> assigns;
    std::vector<Block> children;
};

class TreeParser {
public:
    TreeParser(std::vector<Token> toks, std::vector<ConfigError>& errors) : toks_(std::move(toks)), errors_(errors)
    {
    }

    Block parse_root()
    {
        Block root;
        parse_items(root, /*top=*/true);
        return root;
    }

private:
    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

    void error(int line, std::string msg) { errors_.push_back({line, {}, std::move(msg)}); }

    void parse_items(Block& into, bool top)
    {
        for (;;) {
            const Token& t = peek();
            if (t.kind == Tok::End) {
                if (!top)
                    error(t.line, "missing '}' to close '" + into.keyword + "' block opened on line " +
                                      std::to_string(into.line));
                return;
            }
            if (t.kind == Tok::RBrace) {
                next();
                if (top) {
                    error(t.line, "unexpected '}'");
                    continue;
                }
                return;
            }
            if (t.kind != Tok::Word) {
                error(t.line, "unexpected '" + t.text + "'");
                next();
                continue;
            }
            parse_item(into);
        }
    }

    void parse_item(Block& into)
    {
        Token key = next();
        const Token& t = peek();
        if (t.kind == Tok::Equals) {
            next();
            if (peek().kind != Tok::Word) {
                error(key.line, "missing value for '" + key.text + "'");
                return;
            }
            into.assigns.push_back({key.text, next().text, key.line});
            return;
        }
        Block child;
        child.keyword = key.text;
        child.line = key.line;
        if (t.kind == Tok::Word && peek(1).kind == Tok::LBrace)
            child.label = next().text;
        if (peek().kind != Tok::LBrace) {
            error(key.line, "expected '=' or '{' after '" + key.text + "'");
            return;
        }
        next();
        parse_items(child, false);
        into.children.push_back(std::move(child));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<ConfigError>& errors_;
};

// ---- scalar parsing -------------------------------------------------------

template <class Int>
std::optional<Int> parse_uint(std::string_view s, Int max)
{
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || v > max)
        return std::nullopt;
    return static_cast<Int>(v);
}

// "2", "0.5", "1.25" seconds -> milliseconds.
std::optional<Millis> parse_seconds(std::string_view s)
{
    auto dot = s.find('.');
    auto whole_text = s.substr(0, dot);
    std::string_view frac_text = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if (whole_text.empty() || (dot != std::string_view::npos && (frac_text.empty() || frac_text.size() > 3)))
        return std::nullopt;
    auto whole = parse_uint<std::uint64_t>(whole_text, 86'400'000);
    if (!whole)
        return std::nullopt;
    std::uint64_t frac = 0;
    if (!frac_text.empty()) {
        auto f = parse_uint<std::uint64_t>(frac_text, 999);
        if (!f)
            return std::nullopt;
        frac = *f;
        for (std::size_t i = frac_text.size(); i < 3; ++i)
            frac *= 10;
    }
    return Millis{static_cast<Millis::rep>(*whole * 1000 + frac)};
}

std::string format_seconds(Millis ms)
{
    auto v = ms.count();
    std::string out = std::to_string(v / 1000);
    if (auto frac = v % 1000; frac != 0) {
        std::string f = std::to_string(frac);
        f.insert(0, 3 - f.size(), '0');
        while (f.back() == '0')
            f.pop_back();
        out += "." + f;
    }
    return out;
}

std::optional<bool> parse_bool(std::string_view s)
{
    if (s == "true" || s == "yes" || s == "on")
        return true;
    if (s == "false" || s == "no" || s == "off")
        return false;
    return std::nullopt;
}

bool valid_name(std::string_view s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_';
    });
}

// ---- interpretation -------------------------------------------------------

class Builder {
public:
    explicit Builder(std::vector<ConfigError>& errors) : errors_(errors) {}

    ClusterConfig build(const Block& root)
    {
        ClusterConfig cfg;
        for (const auto& a : root.assigns)
            err(a.line, a.key, "assignment outside of a block");

        bool have_primary = false;
        bool have_heartbeat = false;
        int primary_line = 0;
        int backup_line = 0;
        for (const auto& b : root.children) {
            if (b.keyword == "node") {
                std::string role = b.label.value_or("");
                if (role != "primary" && role != "backup") {
                    err(b.line, "node", "node role must be 'primary' or 'backup'");
                    continue;
                }
                if ((role == "primary" && have_primary) || (role == "backup" && cfg.backup)) {
                    err(b.line, role, "duplicate node " + role);
                    continue;
                }
                NodeConfig node = build_node(b, role);
                if (role == "primary") {
                    cfg.primary = std::move(node);
                    have_primary = true;
                    primary_line = b.line;
                } else {
                    cfg.backup = std::move(node);
                    backup_line = b.line;
                }
            } else if (b.keyword == "heartbeat") {
                if (have_heartbeat) {
                    err(b.line, "heartbeat", "duplicate heartbeat block");
                    continue;
                }
                have_heartbeat = true;
                cfg.heartbeat = build_heartbeat(b);
            } else if (b.keyword == "virtual") {
                std::size_t idx = cfg.services.size();
                cfg.services.push_back(build_service(b, "services[" + std::to_string(idx) + "]"));
                service_lines_.push_back(b.line);
            } else {
                err(b.line, b.keyword, "unknown block '" + b.keyword + "'");
            }
        }

        if (!have_primary)
            err(0, "primary", "missing 'node primary' block");
        if (cfg.services.empty())
            err(0, "services", "at least one 'virtual' block is required");

        if (have_primary && cfg.backup && cfg.heartbeat.preempt && cfg.primary.priority <= cfg.backup->priority) {
            err(primary_line, "primary.priority",
                "must be greater than backup.priority while preemption is enabled");
        }
        if (cfg.backup && have_primary && cfg.primary.name == cfg.backup->name && !cfg.primary.name.empty())
            err(backup_line, "backup.name", "duplicate node name '" + cfg.backup->name + "'");

        check_cross_service(cfg);
        return cfg;
    }

private:
    void err(int line, std::string path, std::string msg) { errors_.push_back({line, std::move(path), std::move(msg)}); }

    void no_children(const Block& b, const std::string& path)
    {
        for (const auto& c : b.children)
            err(c.line, path + "." + c.keyword, "unexpected nested block");
    }

    // Rejects repeated keys; returns false for the duplicate.
    bool first_time(std::set<std::string>& seen, const Assign& a, const std::string& path)
    {
        if (!seen.insert(a.key).second) {
            err(a.line, path + "." + a.key, "duplicate key");
            return false;
        }
        return true;
    }

    NodeConfig build_node(const Block& b, const std::string& path)
    {
        NodeConfig node;
        std::set<std::string> seen;
        if (b.label && b.label->empty())
            err(b.line, path, "empty label");
        no_children(b, path);
        for (const auto& a : b.assigns) {
            if (!first_time(seen, a, path))
                continue;
            std::string field = path + "." + a.key;
            if (a.key == "name") {
                if (!valid_name(a.value))
                    err(a.line, field, "invalid name '" + a.value + "'");
                node.name = a.value;
            } else if (a.key == "address") {
                auto ep = parse_endpoint(a.value, false);
                if (!ep)
                    err(a.line, field, "expected <ip> or <ip:port>, got '" + a.value + "'");
                else
                    node.address = *ep;
            } else if (a.key == "priority") {
                auto p = parse_uint<std::uint8_t>(a.value, 255);
                if (!p)
                    err(a.line, field, "expected an integer 0-255, got '" + a.value + "'");
                else
                    node.priority = *p;
            } else {
                err(a.line, field, "unknown key '" + a.key + "'");
            }
        }
        for (const char* required : {"name", "address", "priority"}) {
            if (!seen.count(required))
                err(b.line, path + "." + required, "missing required key");
        }
        return node;
    }

    HeartbeatConfig build_heartbeat(const Block& b)
    {
        HeartbeatConfig hb;
        std::set<std::string> seen;
        const std::string path = "heartbeat";
        if (b.label)
            err(b.line, path, "heartbeat block takes no name");
        no_children(b, path);
        for (const auto& a : b.assigns) {
            if (!first_time(seen, a, path))
                continue;
            std::string field = path + "." + a.key;
            if (a.key == "interval") {
                auto v = parse_seconds(a.value);
                if (!v || *v <= Millis::zero())
                    err(a.line, field, "expected a positive duration in seconds, got '" + a.value + "'");
                else
                    hb.interval = *v;
            } else if (a.key == "dead_factor") {
                auto v = parse_uint<std::uint32_t>(a.value, 1000);
                if (!v || *v == 0)
                    err(a.line, field, "expected an integer >= 1, got '" + a.value + "'");
                else
                    hb.dead_factor = *v;
            } else if (a.key == "port") {
                auto v = parse_uint<std::uint16_t>(a.value, 65535);
                if (!v || *v == 0)
                    err(a.line, field, "expected a port 1-65535, got '" + a.value + "'");
                else
                    hb.port = *v;
            } else if (a.key == "preempt") {
                auto v = parse_bool(a.value);
                if (!v)
                    err(a.line, field, "expected true or false, got '" + a.value + "'");
                else
                    hb.preempt = *v;
            } else {
                err(a.line, field, "unknown key '" + a.key + "'");
            }
        }
        return hb;
    }

    ProbeSpec build_probe(const Block& b, const std::string& path)
    {
        ProbeSpec spec;
        std::set<std::string> seen;
        if (b.label)
            err(b.line, path, "probe block takes no name");
        no_children(b, path);
        for (const auto& a : b.assigns) {
            if (!first_time(seen, a, path))
                continue;
            std::string field = path + "." + a.key;
            if (a.key == "kind") {
                if (a.value == "tcp")
                    spec.kind = ProbeKind::TcpConnect;
                else if (a.value == "http")
                    spec.kind = ProbeKind::HttpGet;
                else
                    err(a.line, field, "expected tcp or http, got '" + a.value + "'");
            } else if (a.key == "path") {
                spec.path = a.value;
            } else if (a.key == "expect") {
                auto v = parse_uint<int>(a.value, 999);
                if (!v)
                    err(a.line, field, "expected an HTTP status code, got '" + a.value + "'");
                else
                    spec.expect_status = *v;
            } else if (a.key == "interval" || a.key == "timeout") {
                auto v = parse_seconds(a.value);
                if (!v)
                    err(a.line, field, "expected a duration in seconds, got '" + a.value + "'");
                else
                    (a.key == "interval" ? spec.interval : spec.timeout) = *v;
            } else if (a.key == "fall" || a.key == "rise") {
                auto v = parse_uint<int>(a.value, 1000);
                if (!v)
                    err(a.line, field, "expected an integer >= 1, got '" + a.value + "'");
                else
                    (a.key == "fall" ? spec.fall : spec.rise) = *v;
            } else {
                err(a.line, field, "unknown key '" + a.key + "'");
            }
        }
        if (spec.kind == ProbeKind::TcpConnect) {
            for (const char* http_only : {"path", "expect"}) {
                if (seen.count(http_only))
                    err(b.line, path + "." + http_only, "only valid with kind=http");
            }
        }
        if (auto problem = validate(spec); !problem.empty())
            err(b.line, path, problem);
        return spec;
    }

    ServerConfig build_server(const Block& b, const std::string& path)
    {
        ServerConfig server;
        server.name = b.label.value_or("");
        if (!valid_name(server.name))
            err(b.line, path + ".name", "server needs a name: server <name> { ... }");
        std::set<std::string> seen;
        no_children(b, path);
        for (const auto& a : b.assigns) {
            if (!first_time(seen, a, path))
                continue;
            std::string field = path + "." + a.key;
            if (a.key == "address") {
                auto ep = parse_endpoint(a.value);
                if (!ep)
                    err(a.line, field, "expected <ip:port>, got '" + a.value + "'");
                else
                    server.address = *ep;
            } else if (a.key == "weight") {
                auto v = parse_uint<std::uint32_t>(a.value, 1'000'000);
                if (!v)
                    err(a.line, field, "expected a non-negative integer, got '" + a.value + "'");
                else
                    server.weight = *v;
            } else {
                err(a.line, field, "unknown key '" + a.key + "'");
            }
        }
        if (!seen.count("address"))
            err(b.line, path + ".address", "missing required key");
        return server;
    }

    ServiceConfig build_service(const Block& b, const std::string& path)
    {
        ServiceConfig svc;
        svc.name = b.label.value_or("");
        if (!valid_name(svc.name))
            err(b.line, path + ".name", "virtual service needs a name: virtual <name> { ... }");

        std::set<std::string> seen;
        for (const auto& a : b.assigns) {
            if (!first_time(seen, a, path))
                continue;
            std::string field = path + "." + a.key;
            if (a.key == "address") {
                auto ep = parse_endpoint(a.value);
                if (!ep)
                    err(a.line, field, "expected <ip:port>, got '" + a.value + "'");
                else
                    svc.address = *ep;
            } else if (a.key == "scheduler") {
                auto k = parse_scheduler_kind(a.value);
                if (!k)
                    err(a.line, field, "unknown scheduler '" + a.value + "' (expected rr, wrr, lc or wlc)");
                else
                    svc.scheduler = *k;
            } else if (a.key == "forward") {
                if (a.value == "route")
                    svc.forward = ForwardMethod::Route;
                else if (a.value == "masq")
                    svc.forward = ForwardMethod::Masq;
                else
                    err(a.line, field, "expected route or masq, got '" + a.value + "'");
            } else {
                err(a.line, field, "unknown key '" + a.key + "'");
            }
        }
        for (const char* required : {"address", "scheduler"}) {
            if (!seen.count(required))
                err(b.line, path + "." + required, "missing required key");
        }

        bool have_probe = false;
        std::set<std::string> server_names;
        for (const auto& c : b.children) {
            if (c.keyword == "probe") {
                if (have_probe) {
                    err(c.line, path + ".probe", "duplicate probe block");
                    continue;
                }
                have_probe = true;
                svc.probe = build_probe(c, path + ".probe");
            } else if (c.keyword == "server") {
                std::string spath = path + ".servers[" + std::to_string(svc.servers.size()) + "]";
                auto server = build_server(c, spath);
                if (!server.name.empty() && !server_names.insert(server.name).second)
                    err(c.line, spath + ".name", "duplicate server '" + server.name + "'");
                svc.servers.push_back(std::move(server));
            } else {
                err(c.line, path + "." + c.keyword, "unknown block '" + c.keyword + "'");
            }
        }
        if (svc.servers.empty())
            err(b.line, path + ".servers", "at least one server is required");
        return svc;
    }

    void check_cross_service(const ClusterConfig& cfg)
    {
        std::map<std::pair<std::string, std::uint16_t>, std::size_t> vips;
        std::map<std::string, Endpoint> hosts;
        std::set<std::string> node_names{cfg.primary.name};
        if (cfg.backup)
            node_names.insert(cfg.backup->name);

        for (std::size_t i = 0; i < cfg.services.size(); ++i) {
            const auto& svc = cfg.services[i];
            const int line = service_lines_[i];
            const std::string path = "services[" + std::to_string(i) + "]";
            if (svc.address.port != 0) {
                auto [it, fresh] = vips.emplace(std::make_pair(svc.address.host, svc.address.port), i);
                if (!fresh)
                    err(line, path + ".address", "same address as services[" + std::to_string(it->second) + "]");
            }
            for (std::size_t j = 0; j < svc.servers.size(); ++j) {
                const auto& s = svc.servers[j];
                const std::string spath = path + ".servers[" + std::to_string(j) + "].name";
                if (s.name.empty())
                    continue;
                if (node_names.count(s.name))
                    err(line, spath, "'" + s.name + "' is already a director node name");
                auto [it, fresh] = hosts.emplace(s.name, s.address);
                if (!fresh && it->second != s.address)
                    err(line, spath, "'" + s.name + "' is used with two different addresses");
            }
        }
    }

    std::vector<ConfigError>& errors_;
    std::vector<int> service_lines_;
};

} // namespace

Result<ClusterConfig, std::vector<ConfigError>> parse_config(std::string_view text)
{
    std::vector<ConfigError> errors;
    TreeParser parser(lex(text), errors);
    Block root = parser.parse_root();
    ClusterConfig cfg = Builder(errors).build(root);
    if (!errors.empty()) {
        std::stable_sort(errors.begin(), errors.end(),
                         [](const ConfigError& a, const ConfigError& b) { return a.line < b.line; });
        return unexpected(std::move(errors));
    }
    return cfg;
}

Result<ClusterConfig, std::vector<ConfigError>> load_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        return unexpected(std::vector<ConfigError>{{0, {}, "cannot open " + path.string()}});
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize(const ClusterConfig& config)
{
    std::ostringstream out;
    auto node = [&](const char* role, const NodeConfig& n) {
        out << "node " << role << " {\n";
        out << "    name = " << n.name << "\n";
        out << "    address = " << to_string(n.address) << "\n";
        out << "    priority = " << static_cast<int>(n.priority) << "\n";
        out << "}\n\n";
    };
    node("primary", config.primary);
    if (config.backup)
        node("backup", *config.backup);

    const HeartbeatConfig hb_default;
    if (config.heartbeat != hb_default) {
        const auto& hb = config.heartbeat;
        out << "heartbeat {\n";
        if (hb.interval != hb_default.interval)
            out << "    interval = " << format_seconds(hb.interval) << "\n";
        if (hb.dead_factor != hb_default.dead_factor)
            out << "    dead_factor = " << hb.dead_factor << "\n";
        if (hb.port != hb_default.port)
            out << "    port = " << hb.port << "\n";
        if (hb.preempt != hb_default.preempt)
            out << "    preempt = " << (hb.preempt ? "true" : "false") << "\n";
        out << "}\n\n";
    }

    const ProbeSpec probe_default;
    for (std::size_t i = 0; i < config.services.size(); ++i) {
        const auto& svc = config.services[i];
        if (i)
            out << "\n";
        out << "virtual " << svc.name << " {\n";
        out << "    address = " << to_string(svc.address) << "\n";
        out << "    scheduler = " << to_string(svc.scheduler) << "\n";
        if (svc.forward != ForwardMethod::Route)
            out << "    forward = masq\n";
        if (svc.probe != probe_default) {
            const auto& p = svc.probe;
            out << "    probe {\n";
            if (p.kind == ProbeKind::HttpGet) {
                out << "        kind = http\n";
                if (p.path != probe_default.path)
                    out << "        path = " << p.path << "\n";
                if (p.expect_status != probe_default.expect_status)
                    out << "        expect = " << p.expect_status << "\n";
            }
            if (p.interval != probe_default.interval)
                out << "        interval = " << format_seconds(p.interval) << "\n";
            if (p.timeout != probe_default.timeout)
                out << "        timeout = " << format_seconds(p.timeout) << "\n";
            if (p.fall != probe_default.fall)
                out << "        fall = " << p.fall << "\n";
            if (p.rise != probe_default.rise)
                out << "        rise = " << p.rise << "\n";
            out << "    }\n";
        }
        for (const auto& s : svc.servers) {
            out << "    server " << s.name << " {\n";
            out << "        address = " << to_string(s.address) << "\n";
            if (s.weight != 1)
                out << "        weight = " << s.weight << "\n";
            out << "    }\n";
        }
        out << "}\n";
    }
    return out.str();
}

ServiceKey service_key(const ServiceConfig& service)
{
    return ServiceKey{service.address.host, service.address.port, Protocol::Tcp};
}

VirtualService make_virtual_service(const ServiceConfig& service)
{
    VirtualService vs;
    vs.name = service.name;
    vs.key = service_key(service);
    vs.scheduler.kind = service.scheduler;
    vs.forward = service.forward;
    for (const auto& s : service.servers)
        vs.pool.emplace_back(s.name, s.address, s.weight);
    return vs;
}

FailoverConfig failover_config(const ClusterConfig& config)
{
    FailoverConfig fc;
    fc.interval = config.heartbeat.interval;
    fc.dead_factor = config.heartbeat.dead_factor;
    fc.preempt = config.heartbeat.preempt;
    fc.primary_priority = config.primary.priority;
    return fc;
}

Endpoint heartbeat_endpoint(const ClusterConfig& config, const NodeConfig& node)
{
    Endpoint ep = node.address;
    if (ep.port == 0)
        ep.port = config.heartbeat.port;
    return ep;
}

} // namespace havld
