/*
 * Copyright 2026 The BGPSecX Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "commands.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <memory>

#include "bgpsecx/error.hpp"
#include "bgpsecx/federation.hpp"
#include "bgpsecx/federation_tcp.hpp"
#include "bgpsecx/mrt.hpp"
#include "bgpsecx/policy.hpp"
#include "bgpsecx/rpki.hpp"
#include "bgpsecx/simulator.hpp"
#include "bgpsecx/whitelist.hpp"

namespace bgpsecx::cli {

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

/// Unreadable or undecodable input data is exit 2; everything else is a
/// usage/config problem.
int exit_code_for(const Error& e)
{
    switch (e.code()) {
    case Errc::Io:
    case Errc::TruncatedRecord:
    case Errc::MissingHeader:
        return kExitInput;
    default:
        return kExitUsage;
    }
}

RoaStore load_roas(const std::string& path, std::ostream& err)
{
    RoaLoadResult loaded = load_roa_file(path);
    for (const auto& e : loaded.errors) err << "warning: " << path << ":" << e.line << ": " << e.reason << "\n";
    return std::move(loaded.store);
}

Whitelist load_whitelists(const std::vector<std::string>& paths)
{
    std::vector<Whitelist> lists;
    for (const auto& p : paths) lists.push_back(load_whitelist_file(p));
    if (lists.size() == 1) return std::move(lists.front());
    return merge_cluster(lists);
}

PolicyConfig load_policy(const std::optional<std::string>& path)
{
    return path ? load_policy_config_file(*path) : PolicyConfig{};
}

void write_verdict(std::ostream& log, const ProcessResult& r)
{
    log << format_verdict_line(r.verdict) << '\n';
    if (r.verdict.evidence) {
        for (const auto& a : r.verdict.evidence->anomalies) log << format_alarm_line(a) << '\n';
    }
}

std::string describe(const std::optional<FilterDirective>& d)
{
    if (!d) return "none";
    std::string text(to_string(d->directive));
    text += " member=" + to_string(d->member) + " prefix=" + d->prefix.str();
    text += " ttl=" + (d->ttl_seconds ? std::to_string(*d->ttl_seconds) : std::string("none"));
    return text;
}

std::string join(const std::vector<std::string>& items)
{
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += ',';
        out += s;
    }
    return out;
}

}  // namespace

int cmd_validate(const ValidateOptions& opt, std::ostream& out, std::ostream& err)
{
    const auto prefix = IpPrefix::try_parse(opt.prefix);
    if (!prefix) {
        err << "error: invalid --prefix '" << opt.prefix << "'\n";
        return kExitUsage;
    }
    const auto origin = parse_asn(opt.origin);
    if (!origin) {
        err << "error: invalid --origin '" << opt.origin << "'\n";
        return kExitUsage;
    }
    std::optional<Asn> member = origin;
    if (opt.member) {
        member = parse_asn(*opt.member);
        if (!member) {
            err << "error: invalid --member '" << *opt.member << "'\n";
            return kExitUsage;
        }
    }

    try {
        const RoaStore roas = load_roas(opt.roas, err);
        const Whitelist wl = load_whitelists(opt.whitelists);
        const PolicyConfig cfg = load_policy(opt.policy);

        RouteAnnouncement ann;
        ann.prefix = *prefix;
        ann.as_path = AsPath::sequence(std::vector<Asn>{*origin});
        ann.announcing_member = *member;
        ann.timestamp = std::chrono::duration_cast<std::chrono::seconds>(
                            std::chrono::system_clock::now().time_since_epoch())
                            .count();

        ObservationHistory history;
        Engine engine(IxpId::make("local"), &roas, &wl, history, cfg);
        const ProcessResult r = engine.process(ann);
        const DefenseEvidence& ev = *r.verdict.evidence;

        out << "prefix: " << ann.prefix.str() << "\n";
        out << "origin: AS" << to_string(*origin) << "\n";
        out << "member: AS" << to_string(*member) << "\n";
        out << "roa: " << to_string(ev.roa.state) << " (covering " << ev.roa.covering.size() << ", matching "
            << ev.roa.matched.size() << ")\n";
        out << "whitelist: " << to_string(ev.whitelist.state);
        if (ev.whitelist.matched_entry) out << " (" << ev.whitelist.matched_entry->str() << ")";
        out << "\n";
        out << "verdict: " << to_string(r.verdict.action);
        if (!r.verdict.reasons.empty()) out << " [" << join(r.verdict.reasons) << "]";
        out << "\n";
        out << "directive: " << describe(r.directive) << "\n";
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

int cmd_replay(const ReplayOptions& opt, std::ostream& out, std::ostream& err)
{
    try {
        const RoaStore roas = load_roas(opt.roas, err);
        const Whitelist wl = load_whitelists(opt.whitelists);
        const PolicyConfig cfg = load_policy(opt.policy);

        IxpId self = IxpId::make("replay");
        std::unique_ptr<ObservationHistory> client_history;
        std::unique_ptr<FederationNode> node;
        std::unique_ptr<TcpFederationClient> client;
        if (opt.peers) {
            FederationConfig fc = load_federation_config_file(*opt.peers);
            self = fc.self;
            client_history = std::make_unique<ObservationHistory>();
            node = std::make_unique<FederationNode>(fc.self, *client_history, wl);
            client = std::make_unique<TcpFederationClient>(*node, fc.peers);
        }

        std::ofstream log;
        if (opt.out) {
            log.open(*opt.out, std::ios::binary | std::ios::trunc);
            if (!log) {
                err << "error: cannot write " << *opt.out << "\n";
                return kExitUsage;
            }
        }

        auto source = mrt::open_trace(opt.mrt);
        mrt::AnnouncementStream stream(*source);
        ObservationHistory history;
        Engine engine(self, &roas, &wl, history, cfg, client.get());

        std::uint64_t accept = 0;
        std::uint64_t reject = 0;
        std::uint64_t flag = 0;
        std::vector<RouteAnnouncement> batch;
        while (stream.next(batch)) {
            for (const auto& ann : batch) {
                const ProcessResult r = engine.process(ann);
                if (log.is_open()) write_verdict(log, r);
                if (ann.kind != RouteKind::Announce) continue;
                switch (r.verdict.action) {
                case Action::Accept: ++accept; break;
                case Action::Reject: ++reject; break;
                case Action::Flag: ++flag; break;
                }
            }
        }
        const mrt::IngestCounters& c = stream.counters();
        if (stream.truncated() && c.records == 0) {
            err << "error: " << opt.mrt << " is truncated before its first record\n";
            return kExitInput;
        }

        out << "records: " << c.records << "\n";
        out << "announcements: " << c.announcements << "\n";
        out << "withdrawals: " << c.withdrawals << "\n";
        out << "skipped records: " << c.skipped_records << "\n";
        out << "malformed records: " << c.malformed_records << "\n";
        out << "skipped attributes: " << c.skipped_attributes << "\n";
        out << "truncated: " << (stream.truncated() ? "yes" : "no") << "\n";
        out << "verdicts: accept=" << accept << " reject=" << reject << " flag=" << flag << "\n";
        if (client) out << "federation queries: " << client->queries_sent() << "\n";
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

int cmd_serve(const ServeOptions& opt, std::ostream& out, std::ostream& err)
{
    try {
        const FederationConfig fc = load_federation_config_file(opt.peers);
        const std::string listen = opt.listen.value_or(fc.listen);
        if (listen.empty()) {
            err << "error: no listen address (use --listen or \"listen\" in the peer config)\n";
            return kExitUsage;
        }
        const Whitelist wl = load_whitelists(opt.whitelists);
        std::optional<RoaStore> roas;
        if (opt.roas) roas = load_roas(*opt.roas, err);

        ObservationHistory history;
        if (opt.mrt) {
            // Same engine path as replay; verdicts are not needed here.
            Engine engine(fc.self, roas ? &*roas : nullptr, &wl, history, PolicyConfig{});
            auto source = mrt::open_trace(*opt.mrt);
            mrt::AnnouncementStream stream(*source);
            std::vector<RouteAnnouncement> batch;
            while (stream.next(batch)) {
                for (const auto& ann : batch) engine.process(ann);
            }
        }

        // Sequence numbers must keep rising across restarts of this daemon.
        const auto first_sequence = static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::system_clock::now().time_since_epoch())
                .count());
        FederationNode node(fc.self, history, wl, first_sequence);
        for (const auto& p : fc.peers) node.add_peer(p.id, p.key);

        TcpFederationServer server(node, listen);
        try {
            server.bind();
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
            return kExitUsage;
        }

        struct sigaction sa {};
        sa.sa_handler = on_signal;
        sigemptyset(&sa.sa_mask);
        sigaction(SIGINT, &sa, nullptr);
        sigaction(SIGTERM, &sa, nullptr);

        out << "listening ixp=" << fc.self.str() << " port=" << server.port() << " prefixes=" << history.prefix_count()
            << std::endl;
        server.run(g_stop);
        out << "shutdown frames=" << server.frames_handled() << " auth_failures=" << node.auth_failures()
            << " replays=" << node.replays() << " dropped=" << server.connections_dropped() << std::endl;
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err)
{
    if (!std::filesystem::is_regular_file(opt.scenario)) {
        err << "error: cannot read " << opt.scenario << "\n";
        return kExitInput;
    }
    try {
        const Scenario scenario = load_scenario_file(opt.scenario);
        const RunResult result = run(scenario);

        std::filesystem::create_directories(opt.out);
        const std::filesystem::path dir(opt.out);
        std::ofstream events(dir / "events.log", std::ios::binary | std::ios::trunc);
        std::ofstream metrics(dir / "metrics.json", std::ios::binary | std::ios::trunc);
        std::ofstream table(dir / "metrics.txt", std::ios::binary | std::ios::trunc);
        if (!events || !metrics || !table) {
            err << "error: cannot write into " << opt.out << "\n";
            return kExitUsage;
        }
        const std::string rendered = report(result.metrics, ReportFormat::Table);
        events << result.event_log;
        metrics << report(result.metrics, ReportFormat::Json);
        table << rendered;
        out << rendered;
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace bgpsecx::cli
