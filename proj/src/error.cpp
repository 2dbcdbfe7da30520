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

#include "vqpu/error.hpp"

#include <array>
#include <utility>

namespace vqpu {
namespace {

constexpr std::array<std::pair<ErrorCode, std::string_view>, 50> kNames{{
    {ErrorCode::UnknownGate, "UnknownGate"},
    {ErrorCode::ArityMismatch, "ArityMismatch"},
    {ErrorCode::QubitOutOfRange, "QubitOutOfRange"},
    {ErrorCode::ZeroNorm, "ZeroNorm"},
    {ErrorCode::UnsupportedInstruction, "UnsupportedInstruction"},
    {ErrorCode::WidthExceeded, "WidthExceeded"},
    {ErrorCode::WidthMismatch, "WidthMismatch"},
    {ErrorCode::StraddlingGate, "StraddlingGate"},
    {ErrorCode::IndexOutOfRange, "IndexOutOfRange"},
    {ErrorCode::SelfLink, "SelfLink"},
    {ErrorCode::EmptyBody, "EmptyBody"},
    {ErrorCode::NotSupported, "NotSupported"},
    {ErrorCode::SchemaViolation, "SchemaViolation"},
    {ErrorCode::UnsupportedGate, "UnsupportedGate"},
    {ErrorCode::DanglingClbit, "DanglingClbit"},
    {ErrorCode::MalformedRemote, "MalformedRemote"},
    {ErrorCode::UnboundParameter, "UnboundParameter"},
    {ErrorCode::ChannelTimeout, "ChannelTimeout"},
    {ErrorCode::EpochMismatch, "EpochMismatch"},
    {ErrorCode::PeerUnreachable, "PeerUnreachable"},
    {ErrorCode::JobAborted, "JobAborted"},
    {ErrorCode::BindFailure, "BindFailure"},
    {ErrorCode::QueueFull, "QueueFull"},
    {ErrorCode::ValidationFailed, "ValidationFailed"},
    {ErrorCode::CommModeMismatch, "CommModeMismatch"},
    {ErrorCode::UnknownJob, "UnknownJob"},
    {ErrorCode::NoParamSlots, "NoParamSlots"},
    {ErrorCode::DanglingProtocol, "DanglingProtocol"},
    {ErrorCode::MergeDeadlock, "MergeDeadlock"},
    {ErrorCode::DuplicateId, "DuplicateId"},
    {ErrorCode::CommQubitCollision, "CommQubitCollision"},
    {ErrorCode::InvalidShots, "InvalidShots"},
    {ErrorCode::PortExhausted, "PortExhausted"},
    {ErrorCode::BackendFileInvalid, "BackendFileInvalid"},
    {ErrorCode::ConflictingFlags, "ConflictingFlags"},
    {ErrorCode::DuplicateFamilyName, "DuplicateFamilyName"},
    {ErrorCode::UnsupportedOption, "UnsupportedOption"},
    {ErrorCode::InvalidArgument, "InvalidArgument"},
    {ErrorCode::NoQpusAvailable, "NoQpusAvailable"},
    {ErrorCode::DistributedInstructionPresent, "DistributedInstructionPresent"},
    {ErrorCode::NotEnoughQpus, "NotEnoughQpus"},
    {ErrorCode::UnknownPeerId, "UnknownPeerId"},
    {ErrorCode::JobFailed, "JobFailed"},
    {ErrorCode::InvalidState, "InvalidState"},
    {ErrorCode::EmptyCounts, "EmptyCounts"},
    {ErrorCode::LengthMismatch, "LengthMismatch"},
    {ErrorCode::Expired, "Expired"},
    {ErrorCode::ProtocolError, "ProtocolError"},
    {ErrorCode::TransportError, "TransportError"},
    {ErrorCode::Internal, "Internal"},
}};

}  // namespace

std::string_view error_code_name(ErrorCode code) {
    for (const auto& [c, name] : kNames) {
        if (c == code) return name;
    }
    return "Internal";
}

ErrorCode error_code_from_name(std::string_view name) {
    for (const auto& [c, n] : kNames) {
        if (n == name) return c;
    }
    return ErrorCode::Internal;
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code),
      detail_(message) {}

}  // namespace vqpu
