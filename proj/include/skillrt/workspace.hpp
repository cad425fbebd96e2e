// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <skillrt/json.hpp>

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace skillrt
{

struct WorkspaceConfig
{
    /// Executable names run_command may launch. Empty by default.
    std::vector<std::string> commandAllowlist;
    int commandTimeoutS = 60;
    std::size_t outputTruncateBytes = 32 * 1024;
};

/// A model-supplied path proven to lie inside a workspace root.
struct ScopedPath
{
    std::string raw;
    std::filesystem::path resolved;
    /// Workspace-relative, '/'-separated.
    std::string relative;
};

/// Resolves `raw` against `root`. Rejects `..` components, absolute paths
/// outside the root and symlinks whose target leaves the root.
/// Throws Error(PathEscape).
[[nodiscard]] auto resolveScoped(std::filesystem::path const& root, std::string_view raw) -> ScopedPath;

[[nodiscard]] auto isWithinRoot(std::filesystem::path const& path, std::filesystem::path const& root) -> bool;

struct CommandResult
{
    int exitCode = 0;
    std::string stdoutText;
    std::string stderrText;
    bool truncated = false;
    double seconds = 0;

    [[nodiscard]] auto toJson() const -> Json;
};

[[nodiscard]] auto isCommandAllowed(std::vector<std::string> const& argv,
                                    std::vector<std::string> const& allowlist) -> bool;

/// Runs argv[0] (looked up in PATH) with cwd = `cwd`, capturing both
/// streams up to `truncateBytes` each. Throws Error(CommandNotAllowed) when
/// argv[0] is not allowlisted and Error(CommandTimeout) when the wall clock
/// limit expires (the process group is killed).
[[nodiscard]] auto runCommand(std::vector<std::string> const& argv, std::filesystem::path const& cwd,
                              std::vector<std::string> const& allowlist, int timeoutS, std::size_t truncateBytes)
    -> CommandResult;

} // namespace skillrt
