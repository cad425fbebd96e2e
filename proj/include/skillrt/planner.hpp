// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <skillrt/bindings.hpp>
#include <skillrt/hooks.hpp>
#include <skillrt/model.hpp>
#include <skillrt/registry.hpp>
#include <skillrt/router.hpp>
#include <skillrt/session_store.hpp>
#include <skillrt/usage_log.hpp>

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace skillrt
{

enum class WakeupCause
{
    Initial,
    Followup,
    ForcedAction,
    ChildReport,
};

[[nodiscard]] auto wakeupCauseName(WakeupCause cause) -> std::string_view;

struct WakeupEvent
{
    std::string sessionId;
    WakeupCause cause = WakeupCause::Initial;
    std::uint64_t enqueueSeq = 0;
    std::optional<ChildReport> childReport;
};

struct PlannerConfig
{
    int maxSteps = 200;
    int backendRetries = 3;
    bool singleWorker = true;
    int workers = 4;
    /// Ablation switch: when false the model sees every candidate tool
    /// even if hooks narrowed the set.
    bool applyToolFilters = true;
};

struct TurnRecord
{
    std::string sessionId;
    WakeupCause cause = WakeupCause::Initial;
    /// False when the wakeup was dropped because the session had closed.
    bool ran = false;
    bool modelCalled = false;
    std::vector<std::string> visibleTools;
    std::optional<std::string> toolName;
    std::optional<bool> toolOk;
    ContinuationKind decision = ContinuationKind::AllowFinish;
    bool followupEnqueued = false;
    bool completed = false;
    std::string note;
};

struct SessionSummary
{
    std::string id;
    std::optional<std::string> parentId;
    SessionStatus status = SessionStatus::Active;
    int turns = 0;
    UsageTotals usage;
};

enum class RunOutcome
{
    Quiescent,
    StepBudgetExhausted,
};

struct RunSummary
{
    RunOutcome outcome = RunOutcome::Quiescent;
    int steps = 0;
    std::vector<SessionSummary> sessions;

    [[nodiscard]] auto session(std::string const& id) const -> SessionSummary const*;
    [[nodiscard]] auto toJson() const -> Json;
};

struct CompletionReport
{
    std::string sessionId;
    std::string report;
};

struct Blocked
{
    std::vector<std::string> reasons;
};

using CompletionResult = std::variant<CompletionReport, Blocked>;

/// Event-driven single-step loop. Each wakeup renders the session history,
/// runs the hook boundaries around exactly one model call, executes at most
/// one tool and decides whether the session needs another wakeup.
class Planner: public RuntimeServices
{
  public:
    Planner(SkillRegistry const& registry, SessionStore& store, ModelBackend& backend, UsageLog& usage,
            PlannerConfig planner = {}, WorkspaceConfig workspace = {}, RouterConfig router = {});

    /// Creates a session (routed skills taken from `spec`) and enqueues its
    /// initial wakeup.
    auto startSession(NewSession const& spec) -> Session;
    void enqueue(std::string const& sessionId, WakeupCause cause, std::optional<ChildReport> report = std::nullopt);

    auto runWakeup(WakeupEvent const& event) -> TurnRecord;
    auto runUntilQuiescent(std::optional<int> maxSteps = std::nullopt) -> RunSummary;
    auto completeSession(std::string const& sessionId, std::string const& report) -> CompletionResult;

    /// Routes `task` and creates the child session without touching the queue.
    auto spawnSubsession(Session const& parent, DelegatedTask const& task) -> Session;

    /// Orchestration tools followed by the routed skills' tools.
    [[nodiscard]] auto candidateTools(Session const& session) const -> std::vector<std::string>;
    [[nodiscard]] auto pendingWakeups() const -> std::size_t;
    [[nodiscard]] auto turnLog() const -> std::vector<TurnRecord>;
    [[nodiscard]] auto summary(RunOutcome outcome, int steps) const -> RunSummary;
    [[nodiscard]] auto router() const -> SkillRouter const& { return _router; }

    auto openGates(Session const& session) -> std::vector<std::string> override;
    auto delegate(Session const& parent, DelegatedTask const& task) -> std::string override;

  private:
    struct ToolSpec
    {
        ActionSchema const* schema = nullptr;
        ManifestPtr owner;
    };

    [[nodiscard]] auto resolveTool(Session const& session, std::string const& name) const -> ToolSpec;
    [[nodiscard]] auto buildRequest(Session const& session, std::vector<std::string> const& visible) const
        -> ModelRequest;
    void handleToolCall(Session const& session, ModelResponse const& response,
                        std::vector<std::string> const& visible, TurnRecord& turn);
    void appendInjections(std::string const& sessionId, std::vector<Injection> const& injected);
    void appendGuidance(std::string const& sessionId, std::string const& skillId, std::string const& text);
    void followup(std::string const& sessionId, WakeupCause cause, TurnRecord& turn);
    void failSession(std::string const& sessionId, std::string const& reason);
    void notifyParent(Session const& child, std::string const& status, std::string const& report);
    auto gatesBySkill(Session const& session) -> std::vector<std::pair<std::string, std::vector<std::string>>>;
    void settleStatus(std::string const& sessionId);

    auto takeNext(bool blocking) -> std::optional<WakeupEvent>;
    void release(std::string const& sessionId);

    SkillRegistry const& _registry;
    SessionStore& _store;
    ModelBackend& _backend;
    UsageLog& _usage;
    PlannerConfig _config;
    WorkspaceConfig _workspace;
    SkillRouter _router;
    HookPipeline _pipeline;

    mutable std::mutex _queueMutex;
    std::condition_variable _queueChanged;
    std::deque<WakeupEvent> _queue;
    std::set<std::string> _inFlight;
    std::map<std::string, int> _pendingPerSession;
    std::map<std::string, int> _childrenOutstanding;
    std::uint64_t _nextEnqueueSeq = 1;

    mutable std::mutex _statsMutex;
    std::map<std::string, int> _turns;
    std::map<std::string, int> _backendFailures;
    std::map<std::string, int> _hookFaults;
    std::vector<TurnRecord> _turnLog;
};

} // namespace skillrt
