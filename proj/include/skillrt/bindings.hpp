// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <skillrt/json.hpp>
#include <skillrt/manifest.hpp>
#include <skillrt/model.hpp>
#include <skillrt/session_store.hpp>
#include <skillrt/workspace.hpp>

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace skillrt
{

// ---------------------------------------------------------------------------
// Hook programs

struct DraftRequest
{
    /// Orchestration tools followed by routed skill tools.
    std::vector<std::string> candidateTools;
};

struct PendingCall
{
    std::string callId;
    std::string name;
    Json args = Json::object();
};

struct ToolResultView
{
    std::string callId;
    std::string name;
    bool ok = true;
    Json args = Json::object();
    Json output = Json::object();
};

using StagePayload = std::variant<DraftRequest const*, ModelResponse const*, PendingCall const*, ToolResultView const*>;

/// Read view handed to a hook program. A hook sees only its own skill's
/// state and changes it only through HookDecision::stateUpdate.
struct HookContext
{
    Session const& session;
    SkillManifest const& manifest;
    Json const& state;
    HookStage stage;
    StagePayload payload;
    WorkspaceConfig const& workspace;

    [[nodiscard]] auto policy() const -> PolicyConfig const& { return manifest.policy; }
    [[nodiscard]] auto doneWhen() const -> std::string const& { return session.doneWhen; }

    [[nodiscard]] auto draft() const -> DraftRequest const* { return get<DraftRequest>(); }
    [[nodiscard]] auto response() const -> ModelResponse const* { return get<ModelResponse>(); }
    [[nodiscard]] auto call() const -> PendingCall const* { return get<PendingCall>(); }
    [[nodiscard]] auto result() const -> ToolResultView const* { return get<ToolResultView>(); }

  private:
    template <typename T>
    [[nodiscard]] auto get() const -> T const*
    {
        auto const* p = std::get_if<T const*>(&payload);
        return p ? *p : nullptr;
    }
};

struct Rejection
{
    std::string reason;
    std::string redirectHint;
};

/// Structured outcome of one hook program. Which fields are legal depends
/// on the stage: toolFilter at before_llm_call, reject and rewrittenArgs at
/// before_tool_call, forceAction/scheduleFollowup after the model or a tool.
struct HookDecision
{
    std::optional<std::set<std::string>> toolFilter;
    std::vector<std::string> injectedMessages;
    std::optional<Rejection> reject;
    std::optional<Json> rewrittenArgs;
    std::optional<std::string> forceAction;
    bool scheduleFollowup = false;
    std::vector<std::string> blockCompletion;
    std::optional<Json> stateUpdate;
};

using HookProgram = std::function<HookDecision(HookContext const&)>;

// ---------------------------------------------------------------------------
// Executors

struct DelegatedTask
{
    std::string taskText;
    std::string taskType;
    std::filesystem::path workspaceRoot;
    std::string doneWhen;
};

/// Services the planner exposes to executors.
class RuntimeServices
{
  public:
    virtual ~RuntimeServices() = default;

    /// Union of the routed skills' completion-gate reasons.
    virtual auto openGates(Session const& session) -> std::vector<std::string> = 0;
    /// Routes and spawns a child session; returns its id.
    virtual auto delegate(Session const& parent, DelegatedTask const& task) -> std::string = 0;
};

struct ToolInvocation
{
    std::string callId;
    std::string name;
    Json args = Json::object();
};

struct ToolOutcome
{
    bool ok = true;
    Json output = Json::object();
    bool finishRequested = false;
    std::string report;
    std::optional<std::string> childSessionId;

    [[nodiscard]] static auto success(Json output) -> ToolOutcome
    {
        auto out = ToolOutcome {};
        out.output = std::move(output);
        return out;
    }
    [[nodiscard]] static auto failure(Json output) -> ToolOutcome
    {
        auto out = success(std::move(output));
        out.ok = false;
        return out;
    }
};

struct ExecContext
{
    Session const& session;
    /// Owning skill, or null for orchestration tools.
    SkillManifest const* manifest;
    Json const& state;
    WorkspaceConfig const& workspace;
    RuntimeServices* services;
};

using Executor = std::function<ToolOutcome(ToolInvocation const&, ExecContext const&)>;
using CompletionGate =
    std::function<std::vector<std::string>(Session const&, Json const& state, SkillManifest const&)>;

/// In-process table that manifest executor_id / program_id /
/// completion_gate strings resolve against.
class BindingTable
{
  public:
    void addExecutor(std::string id, Executor fn) { _executors[std::move(id)] = std::move(fn); }
    void addHookProgram(std::string id, HookProgram fn) { _hooks[std::move(id)] = std::move(fn); }
    void addCompletionGate(std::string id, CompletionGate fn) { _gates[std::move(id)] = std::move(fn); }

    [[nodiscard]] auto executor(std::string const& id) const -> Executor const*;
    [[nodiscard]] auto hookProgram(std::string const& id) const -> HookProgram const*;
    [[nodiscard]] auto completionGate(std::string const& id) const -> CompletionGate const*;

  private:
    std::map<std::string, Executor> _executors;
    std::map<std::string, HookProgram> _hooks;
    std::map<std::string, CompletionGate> _gates;
};

/// Commands a skill may run: the run-config allowlist plus the skill's own.
[[nodiscard]] auto effectiveAllowlist(WorkspaceConfig const& workspace, PolicyConfig const* policy)
    -> std::vector<std::string>;

} // namespace skillrt
