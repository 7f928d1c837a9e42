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

#include "bgpsecx/logging.hpp"

#include <cstdlib>
#include <string_view>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace bgpsecx {

bool init_logging()
{
    auto logger = spdlog::get("bgpsecx");
    if (!logger) {
        logger = spdlog::stderr_color_mt("bgpsecx");
        logger->set_pattern("%^%l%$: %v");
    }
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);

    const char* env = std::getenv("BGPSECX_LOG_LEVEL");
    if (env == nullptr || *env == '\0') return true;
    const std::string_view level(env);
    if (level == "error") {
        spdlog::set_level(spdlog::level::err);
    } else if (level == "warn") {
        spdlog::set_level(spdlog::level::warn);
    } else if (level == "info") {
        spdlog::set_level(spdlog::level::info);
    } else if (level == "debug") {
        spdlog::set_level(spdlog::level::debug);
    } else {
        return false;
    }
    return true;
}

}  // namespace bgpsecx
