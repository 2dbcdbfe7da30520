// Copyright 2026 The vqpu Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vqpu {

/// Failure categories shared by every layer. The names double as the
/// "code" strings carried in error frames on the wire.
enum class ErrorCode {
    UnknownGate,
    ArityMismatch,
    QubitOutOfRange,
    ZeroNorm,
    UnsupportedInstruction,
    WidthExceeded,
    WidthMismatch,
    StraddlingGate,
    IndexOutOfRange,
    SelfLink,
    EmptyBody,
    NotSupported,
    SchemaViolation,
    UnsupportedGate,
    DanglingClbit,
    MalformedRemote,
    UnboundParameter,
    ChannelTimeout,
    EpochMismatch,
    PeerUnreachable,
    JobAborted,
    BindFailure,
    QueueFull,
    ValidationFailed,
    CommModeMismatch,
    UnknownJob,
    NoParamSlots,
    DanglingProtocol,
    MergeDeadlock,
    DuplicateId,
    CommQubitCollision,
    InvalidShots,
    PortExhausted,
    BackendFileInvalid,
    ConflictingFlags,
    DuplicateFamilyName,
    UnsupportedOption,
    InvalidArgument,
    NoQpusAvailable,
    DistributedInstructionPresent,
    NotEnoughQpus,
    UnknownPeerId,
    JobFailed,
    InvalidState,
    EmptyCounts,
    LengthMismatch,
    Expired,
    ProtocolError,
    TransportError,
    Internal,
};

std::string_view error_code_name(ErrorCode code);

/// Parses a wire code string; unknown strings map to Internal.
ErrorCode error_code_from_name(std::string_view name);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

    /// The message without the "<Code>: " prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace vqpu
