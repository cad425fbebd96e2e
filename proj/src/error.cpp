// SPDX-License-Identifier: Apache-2.0
#include <skillrt/error.hpp>

namespace skillrt
{

auto errorKindName(ErrorKind kind) -> std::string_view
{
    switch (kind)
    {
        case ErrorKind::MalformedManifest: return "MalformedManifest";
        case ErrorKind::UnresolvedBinding: return "UnresolvedBinding";
        case ErrorKind::DuplicateSkill: return "DuplicateSkill";
        case ErrorKind::NotFound: return "NotFound";
        case ErrorKind::WorkspaceEscape: return "WorkspaceEscape";
        case ErrorKind::UnknownParent: return "UnknownParent";
        case ErrorKind::SessionClosed: return "SessionClosed";
        case ErrorKind::OrphanToolResult: return "OrphanToolResult";
        case ErrorKind::CorruptStore: return "CorruptStore";
        case ErrorKind::PathEscape: return "PathEscape";
        case ErrorKind::CommandNotAllowed: return "CommandNotAllowed";
        case ErrorKind::CommandTimeout: return "CommandTimeout";
        case ErrorKind::ModelBackendError: return "ModelBackendError";
        case ErrorKind::ScriptExhausted: return "ScriptExhausted";
        case ErrorKind::ScriptToolNotVisible: return "ScriptToolNotVisible";
        case ErrorKind::LogWriteError: return "LogWriteError";
        case ErrorKind::HookFault: return "HookFault";
        case ErrorKind::HunkMismatch: return "HunkMismatch";
        case ErrorKind::TargetMissing: return "TargetMissing";
        case ErrorKind::EmptyEvidence: return "EmptyEvidence";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, std::string const& message): std::runtime_error(message), _kind(kind)
{
}

ModelBackendError::ModelBackendError(std::string const& message, int status, bool retryable, ErrorKind kind):
    Error(kind, message), _status(status), _retryable(retryable)
{
}

HookFault::HookFault(std::string skillId, std::string programId, std::string const& message):
    Error(ErrorKind::HookFault, message), _skillId(std::move(skillId)), _programId(std::move(programId))
{
}

} // namespace skillrt
