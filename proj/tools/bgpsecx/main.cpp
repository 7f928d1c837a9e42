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

#include <iostream>

#include "CLI11.hpp"

#include "bgpsecx/logging.hpp"
#include "commands.hpp"

int main(int argc, char** argv)
{
    using namespace bgpsecx::cli;
    if (!bgpsecx::init_logging()) std::cerr << "warning: unknown BGPSECX_LOG_LEVEL, using warn\n";

    CLI::App app{"BGPSecX: IXP-side route validation, trace replay, federation and simulation"};
    app.require_subcommand(1);

    ValidateOptions v;
    auto* validate = app.add_subcommand("validate", "Validate one announcement");
    validate->add_option("--roas", v.roas, "ROA CSV export")->required();
    validate->add_option("--whitelist", v.whitelists, "Whitelist JSON (repeat to merge a cluster)");
    validate->add_option("--prefix", v.prefix, "Announced prefix")->required();
    validate->add_option("--origin", v.origin, "Origin ASN")->required();
    validate->add_option("--member", v.member, "Announcing member ASN (default: origin)");
    validate->add_option("--policy", v.policy, "Policy JSON");

    ReplayOptions r;
    auto* replay = app.add_subcommand("replay", "Replay an MRT trace through the pipeline");
    replay->add_option("--roas", r.roas, "ROA CSV export")->required();
    replay->add_option("--whitelist", r.whitelists, "Whitelist JSON (repeat to merge a cluster)");
    replay->add_option("--mrt", r.mrt, "MRT trace (.gz accepted)")->required();
    replay->add_option("--policy", r.policy, "Policy JSON");
    replay->add_option("--out", r.out, "Verdict log path");
    replay->add_option("--peers", r.peers, "Federation peer config; enables queries");

    ServeOptions s;
    auto* serve = app.add_subcommand("serve", "Run the federation daemon");
    serve->add_option("--peers", s.peers, "Federation peer config")->required();
    serve->add_option("--listen", s.listen, "host:port (overrides the peer config)");
    serve->add_option("--roas", s.roas, "ROA CSV export");
    serve->add_option("--whitelist", s.whitelists, "Local whitelist JSON (repeat to merge)");
    serve->add_option("--mrt", s.mrt, "MRT trace to seed the observation history");

    SimulateOptions m;
    auto* simulate = app.add_subcommand("simulate", "Run a simulator scenario");
    simulate->add_option("--scenario", m.scenario, "Scenario JSON")->required();
    simulate->add_option("--out", m.out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n";
        const auto parsed = app.get_subcommands();
        std::cerr << (parsed.empty() ? app.help() : parsed.front()->help());
        return kExitUsage;
    }

    if (*validate) return cmd_validate(v, std::cout, std::cerr);
    if (*replay) return cmd_replay(r, std::cout, std::cerr);
    if (*serve) return cmd_serve(s, std::cout, std::cerr);
    return cmd_simulate(m, std::cout, std::cerr);
}
