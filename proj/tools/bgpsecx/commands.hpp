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

#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace bgpsecx::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInput = 2;

struct ValidateOptions {
    std::string roas;
    std::vector<std::string> whitelists;
    std::string prefix;
    std::string origin;
    std::optional<std::string> member;
    std::optional<std::string> policy;
};

struct ReplayOptions {
    std::string roas;
    std::vector<std::string> whitelists;
    std::string mrt;
    std::optional<std::string> policy;
    std::optional<std::string> out;
    std::optional<std::string> peers;
};

struct ServeOptions {
    std::string peers;
    std::optional<std::string> listen;
    std::optional<std::string> roas;
    std::vector<std::string> whitelists;
    std::optional<std::string> mrt;
};

struct SimulateOptions {
    std::string scenario;
    std::string out;
};

int cmd_validate(const ValidateOptions& opt, std::ostream& out, std::ostream& err);
int cmd_replay(const ReplayOptions& opt, std::ostream& out, std::ostream& err);
int cmd_serve(const ServeOptions& opt, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace bgpsecx::cli
