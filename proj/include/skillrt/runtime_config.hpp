// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <skillrt/json.hpp>
#include <skillrt/planner.hpp>
#include <skillrt/router.hpp>
#include <skillrt/workspace.hpp>

#include <filesystem>
#include <map>
#include <string>

namespace skillrt
{

/// Overrides read from a `--config` JSON file:
/// `{router: {threshold, w_type, w_keyword}, planner: {max_steps,
/// backend_retries, single_worker, workers, apply_tool_filters},
/// workspace: {command_allowlist, command_timeout_s, output_truncate_bytes},
/// skill_policy: {<skill_id>: {...policy keys}}}`.
struct RuntimeConfig
{
    RouterConfig router;
    PlannerConfig planner;
    WorkspaceConfig workspace;
    std::map<std::string, Json> skillPolicy;

    /// Throws Error(InvalidArgument) on unknown keys or wrong types.
    [[nodiscard]] static auto fromJson(Json const& doc) -> RuntimeConfig;
    [[nodiscard]] static auto load(std::filesystem::path const& path) -> RuntimeConfig;
    [[nodiscard]] auto toJson() const -> Json;
};

} // namespace skillrt
