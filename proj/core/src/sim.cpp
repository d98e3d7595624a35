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

#include "havld/sim.hpp"

#include <algorithm>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <variant>

#include "havld/director.hpp"
#include "havld/heartbeat.hpp"

namespace havld::sim {

const std::string* SharedStore::get(std::string_view path) const
{
    auto it = documents.find(path);
    return it == documents.end() ? nullptr : &it->second;
}

SharedStore SharedStore::defaults()
{
    SharedStore store;
    const std::string index = "<html><head><title>www.orange.com</title></head>"
                              "<body><h1>orange.com</h1><p>Served from shared storage.</p></body></html>\n";
    store.documents["/"] = index;
    store.documents["/index.html"] = index;
    store.documents["/about.html"] = "<html><body><p>Three-tier web cluster.</p></body></html>\n";
    return store;
}

Topology Topology::from_config(const ClusterConfig& config)
{
    Topology t;
    t.directors.push_back({config.primary.name, config.primary.priority});
    if (config.backup)
        t.directors.push_back({config.backup->name, config.backup->priority});
    t.failover = failover_config(config);
    t.services = config.services;
    t.store = SharedStore::defaults();
    return t;
}

Topology Topology::orange_cluster()
{
    Topology t;
    t.directors = {{"lbnode1", 200}, {"lbnode2", 100}};
    t.failover.primary_priority = 200;
    ServiceConfig svc;
    svc.name = "www.orange.com";
    svc.address = {"192.168.1.150", 80};
    svc.scheduler = SchedulerKind::RR;
    svc.servers = {{"websrv1", {"192.168.1.100", 80}, 1}, {"websrv2", {"192.168.1.101", 80}, 1}};
    t.services.push_back(std::move(svc));
    t.store = SharedStore::defaults();
    return t;
}

std::uint64_t Metrics::served() const
{
    std::uint64_t n = 0;
    for (const auto& [name, count] : per_server_served)
        n += count;
    return n;
}

std::string format_metrics(const Metrics& m)
{
    std::ostringstream out;
    out << "requests=" << m.requests << "\n";
    out << "served=" << m.served() << "\n";
    out << "refused=" << m.refused << "\n";
    for (const auto& [name, count] : m.per_server_served)
        out << "served." << name << "=" << count << "\n";
    out << "downtime_ms=" << m.downtime_ms << "\n";
    out << "failover_latency_ms=";
    if (m.failover_latency_ms)
        out << *m.failover_latency_ms;
    else
        out << "none";
    out << "\n";
    return out.str();
}

std::string SimResult::trace_text() const
{
    std::string out;
    for (const auto& t : trace) {
        out += std::to_string(t.at_ms);
        out += ' ';
        out += t.component;
        out += ' ';
        out += t.event;
        if (!t.detail.empty()) {
            out += ' ';
            out += t.detail;
        }
        out += '\n';
    }
    return out;
}

std::optional<NodeState> SimResult::state_at(std::string_view node, std::int64_t at_ms) const
{
    std::optional<NodeState> state = NodeState::Init;
    for (const auto& s : states) {
        if (s.at_ms > at_ms)
            break;
        if (s.node == node)
            state = s.state;
    }
    return state;
}

std::vector<std::string> SimResult::active_at(std::int64_t at_ms) const
{
    std::set<std::string> nodes;
    for (const auto& s : states)
        nodes.insert(s.node);
    std::vector<std::string> out;
    for (const auto& n : nodes) {
        if (state_at(n, at_ms) == NodeState::Active)
            out.push_back(n);
    }
    return out;
}

std::string to_string(const SimError& e)
{
    return std::string(e.kind == SimErrorKind::InvalidTopology ? "invalid topology: " : "unknown node: ") +
           e.message;
}

namespace {

struct Step {
    std::size_t index;
};
struct Tick {
    std::size_t node;
    std::uint64_t incarnation;
    bool periodic;
};
struct Deliver {
    std::size_t from;
    std::size_t to;
    HeartbeatBytes bytes;
};
struct ProbeRound {
    std::size_t node;
    std::uint64_t epoch;
    std::size_t service;
};
struct ProbeDone {
    std::size_t node;
    std::uint64_t epoch;
    std::size_t service;
    std::string backend;
    ProbeResult result;
};
struct Release {
    std::size_t node;
    std::uint64_t epoch;
    ServiceKey key;
    Endpoint client;
};
struct Sweep {
    std::size_t node;
    std::uint64_t epoch;
};

using Payload = std::variant<Step, Tick, Deliver, ProbeRound, ProbeDone, Release, Sweep>;

struct Event {
    std::int64_t at;
    std::uint64_t seq;
    Payload payload;
};

struct Later {
    bool operator()(const Event& a, const Event& b) const
    {
        return a.at != b.at ? a.at > b.at : a.seq > b.seq;
    }
};

struct DirectorNode {
    std::string name;
    std::uint8_t priority = 0;
    std::uint64_t node_id = 0;
    bool crashed = false;
    // Bumped on crash/recover; invalidates failover timers.
    std::uint64_t incarnation = 0;
    // Bumped whenever the service set is loaded or dropped; invalidates
    // probe, release and sweep events.
    std::uint64_t epoch = 0;
    bool serving = false;
    NodeRole role;
    std::uint64_t sequence = 0;
    std::optional<Instant> pending_deadline;
    Director director;
    std::vector<HealthMonitor> monitors;
};

class Engine {
public:
    Engine(std::span<const ScenarioEvent> scenario, const Topology& topo, const Options& opts)
        : scenario_(scenario), topo_(topo), opts_(opts), rng_(opts.seed)
    {
    }

    Result<SimResult, SimError> run()
    {
        if (auto err = validate())
            return unexpected(std::move(*err));

        for (std::size_t i = 0; i < topo_.directors.size(); ++i) {
            DirectorNode d;
            d.name = topo_.directors[i].name;
            d.priority = topo_.directors[i].priority;
            d.node_id = i + 1;
            nodes_.push_back(std::move(d));
        }
        for (const auto& svc : topo_.services) {
            for (const auto& s : svc.servers) {
                backends_.emplace(s.name, false);
                result_.metrics.per_server_served.emplace(s.name, 0);
            }
        }

        end_ = 0;
        for (std::size_t i = 0; i < scenario_.size(); ++i) {
            end_ = std::max<std::int64_t>(end_, scenario_[i].at.count());
            push(scenario_[i].at.count(), Step{i});
        }
        for (const auto& ev : scenario_) {
            if (ev.kind == EventKind::EndScenario) {
                end_ = ev.at.count();
                break;
            }
        }

        bootstrap();

        while (!queue_.empty() && !finished_) {
            Event ev = queue_.top();
            if (ev.at > end_)
                break;
            queue_.pop();
            now_ = ev.at;
            std::visit([this](auto& p) { handle(p); }, ev.payload);
        }

        result_.end_ms = end_;
        finalize_metrics();
        return std::move(result_);
    }

private:
    std::optional<SimError> validate() const
    {
        const auto& ds = topo_.directors;
        if (ds.empty())
            return SimError{SimErrorKind::InvalidTopology, "at least one director is required"};
        if (ds.size() > 2)
            return SimError{SimErrorKind::InvalidTopology, "at most two directors are supported"};
        if (topo_.services.empty())
            return SimError{SimErrorKind::InvalidTopology, "at least one virtual service is required"};
        if (topo_.failover.interval <= Millis::zero() || topo_.failover.dead_factor == 0)
            return SimError{SimErrorKind::InvalidTopology, "heartbeat interval and dead factor must be positive"};

        std::set<std::string> names;
        for (const auto& d : ds) {
            if (!names.insert(d.name).second)
                return SimError{SimErrorKind::InvalidTopology, "duplicate node name " + d.name};
        }
        std::set<std::string> servers;
        for (const auto& svc : topo_.services) {
            if (svc.servers.empty())
                return SimError{SimErrorKind::InvalidTopology, "service " + svc.name + " has no servers"};
            if (auto problem = havld::validate(svc.probe); !problem.empty())
                return SimError{SimErrorKind::InvalidTopology, svc.name + " probe: " + problem};
            for (const auto& s : svc.servers) {
                if (names.count(s.name))
                    return SimError{SimErrorKind::InvalidTopology, s.name + " is both a director and a server"};
                servers.insert(s.name);
            }
        }
        names.insert(servers.begin(), servers.end());

        for (const auto& ev : scenario_) {
            switch (ev.kind) {
            case EventKind::CrashNode:
            case EventKind::RecoverNode:
                if (!names.count(ev.node))
                    return SimError{SimErrorKind::UnknownNode, ev.node};
                break;
            case EventKind::PartitionLink:
            case EventKind::HealLink:
                if (!names.count(ev.node))
                    return SimError{SimErrorKind::UnknownNode, ev.node};
                if (!names.count(ev.peer))
                    return SimError{SimErrorKind::UnknownNode, ev.peer};
                break;
            default:
                break;
            }
        }
        return std::nullopt;
    }

    // ---- plumbing ---------------------------------------------------------

    void push(std::int64_t at, Payload p) { queue_.push(Event{at, seq_++, std::move(p)}); }

    void trace(std::string component, std::string event, std::string detail = {})
    {
        result_.trace.push_back({now_, std::move(component), std::move(event), std::move(detail)});
    }

    Instant now() const { return at_ms(now_); }

    bool link_up(const std::string& a, const std::string& b) const
    {
        return !cut_links_.count(std::minmax(a, b));
    }

    bool backend_reachable(const DirectorNode& d, const std::string& backend) const
    {
        auto it = backends_.find(backend);
        return it != backends_.end() && !it->second && link_up(d.name, backend);
    }

    std::optional<std::size_t> vip_holder() const
    {
        if (vip_claims_.empty())
            return std::nullopt;
        return vip_claims_.back();
    }

    // ---- bootstrap --------------------------------------------------------

    void bootstrap()
    {
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            auto& d = nodes_[i];
            d.role = make_role(d.priority, d.node_id, now());
            if (opts_.warm_start) {
                // Settled cluster: the primary already serves, the peer
                // watches it. The primary's first tick sends its heartbeat.
                if (i == 0) {
                    d.role.state = NodeState::Active;
                    d.role.vip_held = true;
                    record_state(d, NodeState::Active);
                    trace(d.name, "state", "Init->Active");
                    acquire_vip(i);
                } else {
                    d.role.state = NodeState::Backup;
                    record_state(d, NodeState::Backup);
                    trace(d.name, "state", "Init->Backup");
                }
            } else {
                record_state(d, NodeState::Init);
            }
            push(0, Tick{i, d.incarnation, true});
        }
    }

    void record_state(const DirectorNode& d, std::optional<NodeState> s)
    {
        result_.states.push_back({now_, d.name, s});
    }

    // ---- failover ---------------------------------------------------------

    void run_tick(std::size_t idx, std::span<const HeartbeatMessage> inbox)
    {
        auto& d = nodes_[idx];
        const NodeState before = d.role.state;
        auto [role, actions] = tick(d.role, now(), inbox, topo_.failover);
        d.role = std::move(role);
        if (d.role.state != before) {
            trace(d.name, "state", std::string(to_string(before)) + "->" + std::string(to_string(d.role.state)));
            record_state(d, d.role.state);
        }
        for (auto a : actions)
            execute(idx, a);
        schedule_deadline(idx);
    }

    void schedule_deadline(std::size_t idx)
    {
        auto& d = nodes_[idx];
        Instant due = next_deadline(d.role, topo_.failover);
        if (due <= now() || d.pending_deadline == due)
            return;
        d.pending_deadline = due;
        push(to_ms(due), Tick{idx, d.incarnation, false});
    }

    void execute(std::size_t idx, FailoverAction action)
    {
        auto& d = nodes_[idx];
        switch (action) {
        case FailoverAction::SendHeartbeat: {
            auto bytes = encode(make_heartbeat(d.role, ++d.sequence));
            for (std::size_t j = 0; j < nodes_.size(); ++j) {
                if (j != idx && link_up(d.name, nodes_[j].name))
                    push(now_ + opts_.link_delay.count(), Deliver{idx, j, bytes});
            }
            break;
        }
        case FailoverAction::AcquireVip:
            acquire_vip(idx);
            break;
        case FailoverAction::ReleaseVip:
            release_vip(idx);
            break;
        }
    }

    void acquire_vip(std::size_t idx)
    {
        auto& d = nodes_[idx];
        std::erase(vip_claims_, idx);
        vip_claims_.push_back(idx);

        // A fresh director: connection state is not replicated between peers.
        d.director.clear();
        d.monitors.clear();
        ++d.epoch;
        for (std::size_t s = 0; s < topo_.services.size(); ++s) {
            const auto& svc = topo_.services[s];
            d.director.add_service(make_virtual_service(svc));
            HealthMonitor mon(svc.probe);
            for (const auto& server : svc.servers)
                mon.track(server.name);
            d.monitors.push_back(std::move(mon));
            push(now_ + svc.probe.interval.count(), ProbeRound{idx, d.epoch, s});
        }
        d.serving = true;
        push(now_ + opts_.expire_sweep.count(), Sweep{idx, d.epoch});
        trace(d.name, "acquire_vip", to_string(topo_.services.front().address));
        result_.vip.push_back({now_, d.name, true});
    }

    void release_vip(std::size_t idx)
    {
        auto& d = nodes_[idx];
        std::erase(vip_claims_, idx);
        d.director.clear();
        d.monitors.clear();
        d.serving = false;
        ++d.epoch;
        trace(d.name, "release_vip", to_string(topo_.services.front().address));
        result_.vip.push_back({now_, d.name, false});
    }

    // ---- health -----------------------------------------------------------

    void apply_health(std::size_t idx, std::size_t service, const std::string& backend, const ProbeResult& r)
    {
        auto& d = nodes_[idx];
        Transition t = d.monitors[service].observe(backend, r);
        if (t == Transition::None)
            return;
        (void)reconcile(d.director, backend, t, now());
        trace(d.name, "health", backend + " " + std::string(to_string(t)));
        result_.health.push_back({now_, d.name, backend, t});
    }

    // ---- event handlers ---------------------------------------------------

    void handle(Step& s)
    {
        const auto& ev = scenario_[s.index];
        switch (ev.kind) {
        case EventKind::ClientRequest:
            client_request(ev.path);
            break;
        case EventKind::CrashNode:
            crash(ev.node);
            break;
        case EventKind::RecoverNode:
            recover(ev.node);
            break;
        case EventKind::PartitionLink:
            cut_links_.insert(std::minmax(ev.node, ev.peer));
            trace("sim", "partition", ev.node + " " + ev.peer);
            break;
        case EventKind::HealLink:
            cut_links_.erase(std::minmax(ev.node, ev.peer));
            trace("sim", "heal", ev.node + " " + ev.peer);
            break;
        case EventKind::EndScenario:
            trace("sim", "end");
            finished_ = true;
            break;
        }
    }

    void handle(Tick& t)
    {
        auto& d = nodes_[t.node];
        if (d.crashed || d.incarnation != t.incarnation)
            return;
        if (t.periodic)
            push(now_ + topo_.failover.interval.count(), Tick{t.node, t.incarnation, true});
        else if (d.pending_deadline == now())
            d.pending_deadline.reset();
        run_tick(t.node, {});
    }

    void handle(Deliver& m)
    {
        auto& d = nodes_[m.to];
        if (d.crashed || !link_up(nodes_[m.from].name, d.name))
            return;
        auto msg = decode(m.bytes);
        if (!msg) {
            trace(d.name, "malformed_heartbeat", std::string(to_string(msg.error())));
            return;
        }
        HeartbeatMessage inbox[] = {*msg};
        run_tick(m.to, inbox);
    }

    void handle(ProbeRound& p)
    {
        auto& d = nodes_[p.node];
        if (d.crashed || d.epoch != p.epoch)
            return;
        const auto& svc = topo_.services[p.service];
        for (const auto& server : svc.servers) {
            if (backend_reachable(d, server.name)) {
                push(now_ + 2 * opts_.link_delay.count(),
                     ProbeDone{p.node, p.epoch, p.service, server.name, {ProbeOutcome::Success, {}}});
            } else {
                push(now_ + svc.probe.timeout.count(),
                     ProbeDone{p.node, p.epoch, p.service, server.name, {ProbeOutcome::Timeout, "no answer"}});
            }
        }
        push(now_ + svc.probe.interval.count(), ProbeRound{p.node, p.epoch, p.service});
    }

    void handle(ProbeDone& p)
    {
        auto& d = nodes_[p.node];
        if (d.crashed || d.epoch != p.epoch)
            return;
        apply_health(p.node, p.service, p.backend, p.result);
    }

    void handle(Release& r)
    {
        auto& d = nodes_[r.node];
        if (d.crashed || d.epoch != r.epoch)
            return;
        (void)d.director.release(r.key, r.client, now());
    }

    void handle(Sweep& s)
    {
        auto& d = nodes_[s.node];
        if (d.crashed || d.epoch != s.epoch)
            return;
        d.director.expire(now());
        push(now_ + opts_.expire_sweep.count(), Sweep{s.node, s.epoch});
    }

    Endpoint next_client()
    {
        const std::uint64_t n = client_seq_++;
        const std::uint64_t host = n / 60000;
        return Endpoint{"10." + std::to_string((host >> 16) & 0xff) + "." + std::to_string((host >> 8) & 0xff) +
                            "." + std::to_string(host & 0xff),
                        static_cast<std::uint16_t>(1024 + n % 60000)};
    }

    void client_request(const std::string& path)
    {
        ++result_.metrics.requests;
        RequestRecord rec;
        rec.at_ms = now_;
        rec.path = path;

        auto refuse = [&](const std::string& component, std::string reason) {
            ++result_.metrics.refused;
            rec.reason = std::move(reason);
            trace(component, "refused", path + " " + rec.reason);
            result_.requests.push_back(std::move(rec));
        };

        auto holder = vip_holder();
        if (!holder)
            return refuse("client", "no_vip");
        auto& d = nodes_[*holder];
        rec.director = d.name;
        if (d.crashed)
            return refuse("client", "director_down");

        const std::size_t service = 0;
        const ServiceKey key = service_key(topo_.services[service]);
        const Endpoint client = next_client();
        auto admitted = d.director.admit(key, client, now());
        if (!admitted)
            return refuse(d.name, std::string(to_string(admitted.error())));

        const std::string backend = admitted->backend;
        rec.backend = backend;
        if (!backend_reachable(d, backend)) {
            // Proxy path: connect failed, release the flow, drop the client.
            (void)d.director.release(key, client, now());
            if (opts_.passive_failure_hints)
                apply_health(*holder, service, backend, {ProbeOutcome::Refused, "connect failed"});
            return refuse(d.name, "backend_unreachable " + backend);
        }

        const auto* doc = topo_.store.get(path);
        rec.served = true;
        rec.body = doc ? *doc : std::string("404 Not Found\n");
        ++result_.metrics.per_server_served[backend];
        trace(d.name, "served", path + " " + backend);
        result_.requests.push_back(std::move(rec));

        std::int64_t hold = opts_.request_duration.count();
        if (opts_.request_jitter.count() > 0)
            hold += static_cast<std::int64_t>(rng_() % static_cast<std::uint64_t>(opts_.request_jitter.count() + 1));
        push(now_ + hold, Release{*holder, d.epoch, key, client});
    }

    std::optional<std::size_t> director_index(const std::string& name) const
    {
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (nodes_[i].name == name)
                return i;
        }
        return std::nullopt;
    }

    void crash(const std::string& name)
    {
        trace("sim", "crash", name);
        crashes_.emplace_back(now_, result_.requests.size());
        if (auto idx = director_index(name)) {
            auto& d = nodes_[*idx];
            if (d.crashed)
                return;
            d.crashed = true;
            ++d.incarnation;
            ++d.epoch;
            d.serving = false;
            d.pending_deadline.reset();
            d.director.clear();
            d.monitors.clear();
            record_state(d, std::nullopt);
            return;
        }
        backends_[name] = true;
    }

    void recover(const std::string& name)
    {
        trace("sim", "recover", name);
        if (auto idx = director_index(name)) {
            auto& d = nodes_[*idx];
            if (!d.crashed)
                return;
            d.crashed = false;
            ++d.incarnation;
            // The restarted node no longer answers for the VIP.
            std::erase(vip_claims_, *idx);
            d.role = make_role(d.priority, d.node_id, now());
            d.sequence = 0;
            record_state(d, NodeState::Init);
            push(now_, Tick{*idx, d.incarnation, true});
            return;
        }
        backends_[name] = false;
    }

    void finalize_metrics()
    {
        auto& m = result_.metrics;
        std::optional<std::int64_t> outage_start;
        for (const auto& r : result_.requests) {
            if (!r.served) {
                if (!outage_start)
                    outage_start = r.at_ms;
            } else if (outage_start) {
                m.downtime_ms += r.at_ms - *outage_start;
                outage_start.reset();
            }
        }
        if (outage_start)
            m.downtime_ms += end_ - *outage_start;

        for (auto [crash_at, first_request] : crashes_) {
            auto from = result_.requests.begin() + static_cast<std::ptrdiff_t>(first_request);
            auto it = std::find_if(from, result_.requests.end(), [](const RequestRecord& r) { return r.served; });
            std::int64_t gap = it == result_.requests.end() ? end_ - crash_at : it->at_ms - crash_at;
            m.failover_latency_ms = std::max(m.failover_latency_ms.value_or(0), gap);
        }
    }

    std::span<const ScenarioEvent> scenario_;
    const Topology& topo_;
    Options opts_;
    std::mt19937_64 rng_;

    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::uint64_t seq_ = 0;
    std::int64_t now_ = 0;
    std::int64_t end_ = 0;
    bool finished_ = false;

    std::vector<DirectorNode> nodes_;
    // Backend name -> crashed.
    std::map<std::string, bool> backends_;
    std::set<std::pair<std::string, std::string>> cut_links_;
    // Most recent claimant answers for the VIP.
    std::vector<std::size_t> vip_claims_;
    // Crash time and number of requests issued before it.
    std::vector<std::pair<std::int64_t, std::size_t>> crashes_;
    std::uint64_t client_seq_ = 0;

    SimResult result_;
};

} // namespace

Result<SimResult, SimError> run(std::span<const ScenarioEvent> scenario, const Topology& topology,
                                const Options& options)
{
    Engine engine(scenario, topology, options);
    return engine.run();
}

} // namespace havld::sim
