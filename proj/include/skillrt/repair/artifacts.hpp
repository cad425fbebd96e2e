// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <skillrt/repair/repair_state.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace skillrt::repair
{

/// Path-like tokens of `doneWhen` (backtick spans or whitespace-delimited
/// words containing '/' or ending in one of `extensions`) that resolve
/// inside `root`, workspace-relative, in order of appearance, deduplicated.
[[nodiscard]] auto inferRequiredArtifacts(std::string_view doneWhen, std::filesystem::path const& root,
                                          std::vector<std::string> const& extensions) -> std::vector<std::string>;

/// Normalized identifier of a failure: the first line mentioning
/// error/fail/exception/assert/traceback (else the first non-empty line),
/// with paths cut to basenames and digit runs masked as '#'.
/// nullopt when the output has no non-empty line.
[[nodiscard]] auto failureSignature(std::string_view output) -> std::optional<std::string>;

/// Open completion reasons for a repair session; empty means completion
/// is permitted.
[[nodiscard]] auto completionReasons(RepairState const& state, std::filesystem::path const& root)
    -> std::vector<std::string>;

/// The subset of `paths` that currently exist as files under `root`.
[[nodiscard]] auto existingArtifacts(std::vector<std::string> const& paths, std::filesystem::path const& root)
    -> std::vector<std::string>;

} // namespace skillrt::repair
