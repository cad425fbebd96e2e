// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace skillrt
{

enum class ErrorKind
{
    MalformedManifest,
    UnresolvedBinding,
    DuplicateSkill,
    NotFound,
    WorkspaceEscape,
    UnknownParent,
    SessionClosed,
    OrphanToolResult,
    CorruptStore,
    PathEscape,
    CommandNotAllowed,
    CommandTimeout,
    ModelBackendError,
    ScriptExhausted,
    ScriptToolNotVisible,
    LogWriteError,
    HookFault,
    HunkMismatch,
    TargetMissing,
    EmptyEvidence,
    InvalidArgument,
    Io,
};

[[nodiscard]] auto errorKindName(ErrorKind kind) -> std::string_view;

/// Runtime error tagged with the contract-level failure it represents.
class Error: public std::runtime_error
{
  public:
    Error(ErrorKind kind, std::string const& message);

    [[nodiscard]] auto kind() const noexcept -> ErrorKind { return _kind; }
    [[nodiscard]] auto kindName() const -> std::string_view { return errorKindName(_kind); }

  private:
    ErrorKind _kind;
};

class ModelBackendError: public Error
{
  public:
    ModelBackendError(std::string const& message, int status, bool retryable, ErrorKind kind = ErrorKind::ModelBackendError);

    [[nodiscard]] auto status() const noexcept -> int { return _status; }
    [[nodiscard]] auto retryable() const noexcept -> bool { return _retryable; }

  private:
    int _status;
    bool _retryable;
};

class HookFault: public Error
{
  public:
    HookFault(std::string skillId, std::string programId, std::string const& message);

    [[nodiscard]] auto skillId() const -> std::string const& { return _skillId; }
    [[nodiscard]] auto programId() const -> std::string const& { return _programId; }

  private:
    std::string _skillId;
    std::string _programId;
};

} // namespace skillrt
