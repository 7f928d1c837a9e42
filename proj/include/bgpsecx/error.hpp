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

#include <stdexcept>
#include <string>
#include <string_view>

namespace bgpsecx {

/// Every failure the library reports carries one of these codes.
enum class Errc {
    // prefixes and addresses
    LengthOutOfRange,
    BadAddress,
    // BGP messages
    TruncatedMessage,
    BadMarker,
    NotAnUpdate,
    MalformedAttribute,
    MalformedNlri,
    // MRT
    TruncatedRecord,
    MalformedPayload,
    // configuration documents
    MissingHeader,
    SchemaError,
    DuplicateMember,
    // federation wire protocol
    PayloadTooLarge,
    InvalidIxpId,
    AuthFailure,
    BadVersion,
    Truncated,
    ReplayDetected,
    UnknownPeer,
    Transport,
    // scenarios
    UnknownIxp,
    AsymmetricLink,
    MissingFile,
    // statistics
    EmptyUniverse,
    Io,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail);

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace bgpsecx
