// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <skillrt/json.hpp>

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace skillrt::repair
{

enum class Phase
{
    Reproduce,
    Diagnose,
    Patch,
    Verify,
    Report,
};

[[nodiscard]] auto phaseName(Phase phase) -> std::string_view;
[[nodiscard]] auto parsePhase(std::string_view name) -> std::optional<Phase>;
[[nodiscard]] auto allPhases() -> std::vector<Phase> const&;

/// The legal phase edges. Self-loops are not edges.
[[nodiscard]] auto isAllowedTransition(Phase from, Phase to) -> bool;

inline constexpr auto kEvidenceTool = std::string_view { "repair_collect_evidence" };
inline constexpr auto kPatchTool = std::string_view { "repair_apply_unified_patch" };
inline constexpr auto kVerifyTool = std::string_view { "repair_run_verification" };
inline constexpr auto kArtifactTool = std::string_view { "repair_write_artifact" };

/// Repair tools visible in a phase (orchestration tools excluded).
[[nodiscard]] auto repairToolsFor(Phase phase) -> std::set<std::string>;
[[nodiscard]] auto allRepairTools() -> std::set<std::string>;

struct LastTool
{
    std::string name;
    bool ok = false;
    std::uint64_t seq = 0;

    auto operator==(LastTool const&) const -> bool = default;
};

struct RepairState
{
    Phase phase = Phase::Reproduce;
    bool verificationPassed = false;
    std::optional<std::string> failureSignature;
    std::vector<std::string> requiredArtifacts;
    std::vector<std::string> producedArtifacts;
    std::vector<std::string> gateFailReasons;
    std::optional<LastTool> lastTool;
    /// Every phase entered, starting with reproduce.
    std::vector<std::string> phaseHistory { "reproduce" };

    /// Moves to `next`, recording it in phaseHistory. Throws
    /// Error(InvalidArgument) for an edge outside the legal set.
    void enter(Phase next);

    [[nodiscard]] auto toJson() const -> Json;
    /// Null or an empty object yields the initial state.
    [[nodiscard]] static auto fromJson(Json const& doc) -> RepairState;

    auto operator==(RepairState const&) const -> bool = default;
};

} // namespace skillrt::repair
