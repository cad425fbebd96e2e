// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <skillrt/bindings.hpp>
#include <skillrt/repair/repair_state.hpp>

#include <set>
#include <string>
#include <vector>

namespace skillrt::repair
{

inline constexpr auto kSkillId = std::string_view { "code_repair_ops" };

/// Registers the repair executors, hook programs and completion gate under
/// "repair.*".
void registerRepairBindings(BindingTable& table);

/// Orchestration tools a repair session never sees.
[[nodiscard]] auto hiddenOrchestrationTools() -> std::set<std::string> const&;

/// Names from `candidates` visible in `phase`.
[[nodiscard]] auto visibleToolsFor(Phase phase, std::vector<std::string> const& candidates)
    -> std::vector<std::string>;

/// The workflow guidance injected before each model call.
[[nodiscard]] auto guidanceMessage(RepairState const& state, std::vector<std::string> const& visible) -> std::string;

/// Current repair state of a hook or executor context, with required
/// artifacts inferred on first use.
[[nodiscard]] auto loadState(Json const& stored, Session const& session, PolicyConfig const& policy) -> RepairState;

/// Pure transition applied after a tool result.
[[nodiscard]] auto applyToolResult(RepairState state, ToolResultView const& result, PolicyConfig const& policy,
                                   std::uint64_t seq) -> RepairState;

/// Guard verdict for a pending call in `state`; nullopt means allowed.
[[nodiscard]] auto guardCall(RepairState const& state, PendingCall const& call, Session const& session,
                             PolicyConfig const& policy, WorkspaceConfig const& workspace) -> std::optional<Rejection>;

} // namespace skillrt::repair
