// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <skillrt/bindings.hpp>
#include <skillrt/registry.hpp>
#include <skillrt/session_store.hpp>

#include <optional>
#include <string>
#include <vector>

namespace skillrt
{

struct Injection
{
    std::string skillId;
    std::string text;
};

struct BeforeLlmOutcome
{
    std::vector<std::string> visibleTools;
    std::vector<Injection> injected;
};

enum class ContinuationKind
{
    ProceedToTool,
    ForceAction,
    ScheduleFollowup,
    AllowFinish,
};

[[nodiscard]] auto continuationKindName(ContinuationKind kind) -> std::string_view;

struct ContinuationDecision
{
    ContinuationKind kind = ContinuationKind::AllowFinish;
    std::string forcedTool;
    std::string decidedBy;
    std::vector<Injection> injected;
    std::vector<std::string> gateReasons;
    /// Later hooks that asked for a different continuation.
    std::vector<std::string> conflicts;
};

struct BeforeToolOutcome
{
    bool allowed = true;
    Json args = Json::object();
    Rejection rejection;
    std::string rejectedBy;
    std::vector<std::string> gateReasons;
    std::vector<Injection> injected;
};

struct AfterToolOutcome
{
    bool followupNeeded = false;
    std::optional<std::string> forceAction;
    std::vector<std::string> gateReasons;
    std::vector<Injection> injected;
};

/// Runs the routed skills' hook programs at the four boundaries and folds
/// their decisions into one effect per boundary.
///
/// Hooks run in (skill registration order, declaration order). State
/// updates are written through SessionStore::putSkillState as each hook
/// returns. A throwing hook or a decision field that is illegal for its
/// stage surfaces as HookFault.
class HookPipeline
{
  public:
    HookPipeline(SkillRegistry const& registry, SessionStore& store, WorkspaceConfig workspace);

    auto runBeforeLlm(Session const& session, DraftRequest const& draft) -> BeforeLlmOutcome;
    auto runAfterLlm(Session const& session, ModelResponse const& response) -> ContinuationDecision;
    auto runBeforeTool(Session const& session, PendingCall const& call) -> BeforeToolOutcome;
    auto runAfterTool(Session const& session, ToolResultView const& result) -> AfterToolOutcome;

    /// Number of hooks a session would run at `stage`.
    [[nodiscard]] auto hookCount(Session const& session, HookStage stage) const -> size_t;

  private:
    struct BoundHook
    {
        ManifestPtr skill;
        HookDeclaration decl;
        HookProgram const* program;
    };

    [[nodiscard]] auto hooksFor(Session const& session, HookStage stage) const -> std::vector<BoundHook>;
    auto invoke(BoundHook const& hook, Session const& session, StagePayload payload) -> HookDecision;

    SkillRegistry const& _registry;
    SessionStore& _store;
    WorkspaceConfig _workspace;
};

} // namespace skillrt
