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

#include "bgpsecx/error.hpp"

namespace bgpsecx {

std::string_view to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::LengthOutOfRange: return "LengthOutOfRange";
    case Errc::BadAddress: return "BadAddress";
    case Errc::TruncatedMessage: return "TruncatedMessage";
    case Errc::BadMarker: return "BadMarker";
    case Errc::NotAnUpdate: return "NotAnUpdate";
    case Errc::MalformedAttribute: return "MalformedAttribute";
    case Errc::MalformedNlri: return "MalformedNlri";
    case Errc::TruncatedRecord: return "TruncatedRecord";
    case Errc::MalformedPayload: return "MalformedPayload";
    case Errc::MissingHeader: return "MissingHeader";
    case Errc::SchemaError: return "SchemaError";
    case Errc::DuplicateMember: return "DuplicateMember";
    case Errc::PayloadTooLarge: return "PayloadTooLarge";
    case Errc::InvalidIxpId: return "InvalidIxpId";
    case Errc::AuthFailure: return "AuthFailure";
    case Errc::BadVersion: return "BadVersion";
    case Errc::Truncated: return "Truncated";
    case Errc::ReplayDetected: return "ReplayDetected";
    case Errc::UnknownPeer: return "UnknownPeer";
    case Errc::Transport: return "Transport";
    case Errc::UnknownIxp: return "UnknownIxp";
    case Errc::AsymmetricLink: return "AsymmetricLink";
    case Errc::MissingFile: return "MissingFile";
    case Errc::EmptyUniverse: return "EmptyUniverse";
    case Errc::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code)
{
}

}  // namespace bgpsecx
