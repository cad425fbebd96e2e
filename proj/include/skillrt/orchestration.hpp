// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <skillrt/bindings.hpp>
#include <skillrt/manifest.hpp>

#include <string_view>
#include <vector>

namespace skillrt
{

/// Built-in tools every session sees before skill filtering:
/// fs_read, fs_write, run_command, delegate_subtask and finish.
[[nodiscard]] auto orchestrationTools() -> std::vector<ActionSchema> const&;
[[nodiscard]] auto orchestrationTool(std::string_view name) -> ActionSchema const*;

/// Adds the executors behind orchestrationTools() under "orchestration.*".
void registerOrchestrationBindings(BindingTable& table);

} // namespace skillrt
