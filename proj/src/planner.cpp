// SPDX-License-Identifier: Apache-2.0
#include <skillrt/error.hpp>
#include <skillrt/orchestration.hpp>
#include <skillrt/planner.hpp>

#include <algorithm>
#include <thread>

namespace skillrt
{

namespace
{

auto joinReasons(std::vector<std::string> const& reasons) -> std::string
{
    auto out = std::string {};
    for (auto const& r: reasons)
        out += (out.empty() ? "" : "; ") + r;
    return out;
}

auto skillOf(std::string const& decidedBy) -> std::string
{
    return decidedBy.substr(0, decidedBy.find('/'));
}

} // namespace

auto wakeupCauseName(WakeupCause cause) -> std::string_view
{
    switch (cause)
    {
        case WakeupCause::Initial: return "initial";
        case WakeupCause::Followup: return "followup";
        case WakeupCause::ForcedAction: return "forced_action";
        case WakeupCause::ChildReport: return "child_report";
    }
    return "initial";
}

auto RunSummary::session(std::string const& id) const -> SessionSummary const*
{
    for (auto const& s: sessions)
        if (s.id == id)
            return &s;
    return nullptr;
}

auto RunSummary::toJson() const -> Json
{
    auto doc = Json { { "outcome", outcome == RunOutcome::Quiescent ? "quiescent" : "step_budget_exhausted" },
                      { "steps", steps },
                      { "sessions", Json::array() } };
    for (auto const& s: sessions)
        doc["sessions"].push_back({ { "id", s.id },
                                    { "parent", s.parentId ? Json(*s.parentId) : Json(nullptr) },
                                    { "status", sessionStatusName(s.status) },
                                    { "turns", s.turns },
                                    { "usage", s.usage.toJson() } });
    return doc;
}

Planner::Planner(SkillRegistry const& registry, SessionStore& store, ModelBackend& backend, UsageLog& usage,
                 PlannerConfig planner, WorkspaceConfig workspace, RouterConfig router):
    _registry(registry),
    _store(store),
    _backend(backend),
    _usage(usage),
    _config(planner),
    _workspace(std::move(workspace)),
    _router(registry, router),
    _pipeline(registry, store, _workspace)
{
}

auto Planner::startSession(NewSession const& spec) -> Session
{
    auto session = _store.createSession(spec);
    enqueue(session.id, WakeupCause::Initial);
    return session;
}

void Planner::enqueue(std::string const& sessionId, WakeupCause cause, std::optional<ChildReport> report)
{
    {
        auto lock = std::lock_guard(_queueMutex);
        _queue.push_back({ sessionId, cause, _nextEnqueueSeq++, std::move(report) });
        ++_pendingPerSession[sessionId];
    }
    _queueChanged.notify_all();
}

auto Planner::pendingWakeups() const -> std::size_t
{
    auto lock = std::lock_guard(_queueMutex);
    return _queue.size();
}

auto Planner::turnLog() const -> std::vector<TurnRecord>
{
    auto lock = std::lock_guard(_statsMutex);
    return _turnLog;
}

auto Planner::candidateTools(Session const& session) const -> std::vector<std::string>
{
    auto out = std::vector<std::string> {};
    for (auto const& t: orchestrationTools())
        out.push_back(t.name);
    for (auto const& skill: _registry.skills())
    {
        if (std::find(session.routedSkills.begin(), session.routedSkills.end(), skill->skillId)
            == session.routedSkills.end())
            continue;
        for (auto const& t: skill->tools)
            out.push_back(t.name);
    }
    return out;
}

auto Planner::resolveTool(Session const& session, std::string const& name) const -> ToolSpec
{
    if (auto const* t = orchestrationTool(name))
        return { t, nullptr };
    auto owner = _registry.findToolOwner(name);
    if (!owner
        || std::find(session.routedSkills.begin(), session.routedSkills.end(), owner->skillId)
               == session.routedSkills.end())
        return {};
    return { owner->tool(name), owner };
}

auto Planner::buildRequest(Session const& session, std::vector<std::string> const& visible) const -> ModelRequest
{
    auto request = ModelRequest {};
    request.sessionId = session.id;
    auto system = "You are an agent working inside the workspace " + session.workspaceRoot.string() + ".\n";
    system += "Task type: " + session.taskType + "\n";
    if (!session.doneWhen.empty())
        system += "Done when: " + session.doneWhen + "\n";
    system += "Call at most one tool per turn. Reply without a tool call when the task is complete.";
    request.messages.push_back({ "system", system, std::nullopt, {} });

    auto const& history = session.history;
    for (std::size_t i = 0; i < history.size(); ++i)
    {
        auto const& ev = history[i];
        if (auto const* u = ev.as<UserMessage>())
            request.messages.push_back({ "user", u->text, std::nullopt, {} });
        else if (auto const* a = ev.as<AssistantMessage>())
        {
            auto msg = ChatMessage { "assistant", a->text, std::nullopt, {} };
            if (a->toolCall)
            {
                for (auto j = i + 1; j < history.size() && !history[j].as<AssistantMessage>(); ++j)
                {
                    if (auto const* call = history[j].as<ToolCallEvent>())
                    {
                        msg.toolCall = a->toolCall;
                        msg.toolCallId = call->callId;
                        break;
                    }
                }
            }
            request.messages.push_back(std::move(msg));
        }
        else if (auto const* r = ev.as<ToolResultEvent>())
            request.messages.push_back(
                { "tool", Json { { "ok", r->ok }, { "output", r->output } }.dump(), std::nullopt, r->callId });
        else if (auto const* g = ev.as<GuidanceInjection>())
            request.messages.push_back({ "user", g->text, std::nullopt, {} });
        else if (auto const* n = ev.as<SystemNote>(); n && n->childReport)
            request.messages.push_back({ "user",
                                         "Sub-task " + n->childReport->childSessionId + " " + n->childReport->status
                                             + ":\n" + n->childReport->report,
                                         std::nullopt,
                                         {} });
    }
    for (auto const& name: visible)
        if (auto spec = resolveTool(session, name); spec.schema)
            request.tools.push_back(*spec.schema);
    return request;
}

void Planner::appendInjections(std::string const& sessionId, std::vector<Injection> const& injected)
{
    for (auto const& inj: injected)
        _store.appendEvent(sessionId, GuidanceInjection { inj.skillId, inj.text });
}

void Planner::appendGuidance(std::string const& sessionId, std::string const& skillId, std::string const& text)
{
    _store.appendEvent(sessionId, GuidanceInjection { skillId, text });
}

void Planner::followup(std::string const& sessionId, WakeupCause cause, TurnRecord& turn)
{
    enqueue(sessionId, cause);
    turn.followupEnqueued = true;
}

void Planner::notifyParent(Session const& child, std::string const& status, std::string const& report)
{
    if (!child.parentId)
        return;
    {
        auto lock = std::lock_guard(_queueMutex);
        if (auto it = _childrenOutstanding.find(*child.parentId); it != _childrenOutstanding.end() && it->second > 0)
            --it->second;
    }
    enqueue(*child.parentId, WakeupCause::ChildReport, ChildReport { child.id, status, report });
}

void Planner::failSession(std::string const& sessionId, std::string const& reason)
{
    auto const session = _store.snapshot(sessionId);
    if (!session.isOpen())
        return;
    _store.appendEvent(sessionId, SystemNote { "session failed: " + reason, std::nullopt });
    _store.setStatus(sessionId, SessionStatus::Failed);
    notifyParent(session, "failed", reason);
}

auto Planner::gatesBySkill(Session const& session) -> std::vector<std::pair<std::string, std::vector<std::string>>>
{
    auto out = std::vector<std::pair<std::string, std::vector<std::string>>> {};
    for (auto const& skill: _registry.skills())
    {
        if (!skill->completionGateId
            || std::find(session.routedSkills.begin(), session.routedSkills.end(), skill->skillId)
                   == session.routedSkills.end())
            continue;
        auto const* gate = _registry.bindings().completionGate(*skill->completionGateId);
        if (!gate)
            continue;
        auto reasons = (*gate)(session, _store.getSkillState(session.id, skill->skillId), *skill);
        if (!reasons.empty())
            out.emplace_back(skill->skillId, std::move(reasons));
    }
    return out;
}

auto Planner::openGates(Session const& session) -> std::vector<std::string>
{
    auto out = std::vector<std::string> {};
    for (auto const& [skill, reasons]: gatesBySkill(session))
        for (auto const& r: reasons)
            if (std::find(out.begin(), out.end(), r) == out.end())
                out.push_back(r);
    return out;
}

auto Planner::completeSession(std::string const& sessionId, std::string const& report) -> CompletionResult
{
    auto const session = _store.snapshot(sessionId);
    if (!session.isOpen())
        return Blocked { { "session is " + std::string(sessionStatusName(session.status)) } };
    auto const gates = gatesBySkill(session);
    if (!gates.empty())
    {
        auto all = std::vector<std::string> {};
        for (auto const& [skill, reasons]: gates)
        {
            appendGuidance(sessionId, skill, "Completion blocked: " + joinReasons(reasons));
            all.insert(all.end(), reasons.begin(), reasons.end());
        }
        return Blocked { all };
    }
    _store.appendEvent(sessionId, CompletionEvent { report });
    _store.setStatus(sessionId, SessionStatus::Completed);
    notifyParent(session, "completed", report);
    return CompletionReport { sessionId, report };
}

auto Planner::spawnSubsession(Session const& parent, DelegatedTask const& task) -> Session
{
    auto const routed = _router.route(task);
    return _store.createSession(
        NewSession { task.taskText, task.taskType, task.workspaceRoot, task.doneWhen, parent.id, routed.skillIds() });
}

auto Planner::delegate(Session const& parent, DelegatedTask const& task) -> std::string
{
    auto child = spawnSubsession(parent, task);
    {
        auto lock = std::lock_guard(_queueMutex);
        ++_childrenOutstanding[parent.id];
    }
    enqueue(child.id, WakeupCause::Initial);
    return child.id;
}

void Planner::settleStatus(std::string const& sessionId)
{
    auto const session = _store.snapshot(sessionId);
    if (!session.isOpen())
        return;
    auto waiting = false;
    {
        auto lock = std::lock_guard(_queueMutex);
        auto const pending = _pendingPerSession.find(sessionId);
        auto const children = _childrenOutstanding.find(sessionId);
        waiting = (pending != _pendingPerSession.end() && pending->second > 0)
                  || (children != _childrenOutstanding.end() && children->second > 0);
    }
    _store.setStatus(sessionId, waiting ? SessionStatus::AwaitingFollowup : SessionStatus::Active);
}

void Planner::handleToolCall(Session const& session, ModelResponse const& response,
                             std::vector<std::string> const& visible, TurnRecord& turn)
{
    auto const& id = session.id;
    auto const& call = *response.toolCall;
    auto const callId = "call-" + std::to_string(session.lastSeq() + 1);
    turn.toolName = call.name;
    turn.toolOk = false;

    auto const fail = [&](Json const& args, bool validated, Json output) {
        _store.appendEvent(id, ToolCallEvent { callId, call.name, args, validated });
        _store.appendEvent(id, ToolResultEvent { callId, call.name, false, std::move(output) });
        followup(id, WakeupCause::Followup, turn);
    };

    auto const spec = resolveTool(session, call.name);
    if (!spec.schema || std::find(visible.begin(), visible.end(), call.name) == visible.end())
        return fail(call.arguments, false,
                    { { "error", "ToolNotVisible" }, { "message", "tool '" + call.name + "' is not visible this turn" } });

    auto validation = validateActionArgs(*spec.schema, call.arguments);
    if (auto const* errors = std::get_if<ValidationErrors>(&validation))
    {
        auto list = Json::array();
        for (auto const& e: *errors)
            list.push_back({ { "path", e.path }, { "reason", e.reason } });
        return fail(call.arguments, false, { { "error", "ValidationErrors" }, { "errors", list } });
    }
    auto args = std::get<ValidatedArgs>(validation).value;
    _store.appendEvent(id, ToolCallEvent { callId, call.name, args, true });

    auto const before = _pipeline.runBeforeTool(_store.snapshot(id), PendingCall { callId, call.name, args });
    appendInjections(id, before.injected);
    if (!before.allowed)
    {
        _store.appendEvent(id, ToolResultEvent { callId, call.name, false,
                                                 { { "error", "Rejected" },
                                                   { "reason", before.rejection.reason },
                                                   { "redirect_hint", before.rejection.redirectHint },
                                                   { "rejected_by", before.rejectedBy },
                                                   { "gate_reasons", before.gateReasons } } });
        followup(id, WakeupCause::Followup, turn);
        return;
    }
    args = before.args;

    auto outcome = ToolOutcome {};
    {
        auto const current = _store.snapshot(id);
        auto const state = spec.owner ? _store.getSkillState(id, spec.owner->skillId) : Json();
        auto const ctx = ExecContext { current, spec.owner.get(), state, _workspace, this };
        try
        {
            auto const* executor = _registry.bindings().executor(spec.schema->executorId);
            if (!executor)
                throw Error(ErrorKind::UnresolvedBinding, "no executor bound to '" + spec.schema->executorId + "'");
            outcome = (*executor)(ToolInvocation { callId, call.name, args }, ctx);
        }
        catch (Error const& e)
        {
            outcome = ToolOutcome::failure({ { "error", std::string(e.kindName()) }, { "message", e.what() } });
        }
        catch (std::exception const& e)
        {
            outcome = ToolOutcome::failure({ { "error", "InvalidArgument" }, { "message", e.what() } });
        }
    }
    _store.appendEvent(id, ToolResultEvent { callId, call.name, outcome.ok, outcome.output });
    turn.toolOk = outcome.ok;

    auto const after =
        _pipeline.runAfterTool(_store.snapshot(id), ToolResultView { callId, call.name, outcome.ok, args, outcome.output });
    appendInjections(id, after.injected);

    if (outcome.ok && outcome.finishRequested)
    {
        auto const result = completeSession(id, outcome.report);
        if (std::holds_alternative<CompletionReport>(result))
        {
            turn.completed = true;
            return;
        }
        followup(id, WakeupCause::Followup, turn);
        return;
    }
    if (outcome.ok && outcome.childSessionId)
        return;
    if (after.forceAction)
    {
        appendGuidance(id, "runtime", "You must now call " + *after.forceAction + ".");
        followup(id, WakeupCause::ForcedAction, turn);
        return;
    }
    followup(id, WakeupCause::Followup, turn);
}

auto Planner::runWakeup(WakeupEvent const& event) -> TurnRecord
{
    auto const& id = event.sessionId;
    auto turn = TurnRecord {};
    turn.sessionId = id;
    turn.cause = event.cause;
    if (!_store.contains(id))
    {
        turn.note = "unknown session";
        return turn;
    }
    if (!_store.snapshot(id).isOpen())
    {
        turn.note = "session closed";
        return turn;
    }
    turn.ran = true;
    {
        auto lock = std::lock_guard(_statsMutex);
        ++_turns[id];
    }
    _store.setStatus(id, SessionStatus::Active);

    try
    {
        if (event.childReport)
            _store.appendEvent(id, SystemNote { "sub-task " + event.childReport->childSessionId + " "
                                                    + event.childReport->status,
                                                event.childReport });

        auto session = _store.snapshot(id);
        auto const candidates = candidateTools(session);
        auto const draft = DraftRequest { candidates };
        auto const shaped = _pipeline.runBeforeLlm(session, draft);
        appendInjections(id, shaped.injected);
        auto const visible = _config.applyToolFilters ? shaped.visibleTools : candidates;
        turn.visibleTools = visible;

        session = _store.snapshot(id);
        auto const request = buildRequest(session, visible);
        auto response = ModelResponse {};
        try
        {
            response = _backend.complete(request);
        }
        catch (ModelBackendError const& e)
        {
            turn.note = std::string(e.kindName()) + ": " + e.what();
            auto failures = 0;
            {
                auto lock = std::lock_guard(_statsMutex);
                failures = ++_backendFailures[id];
            }
            _store.appendEvent(id, SystemNote { "model backend error (" + std::string(e.kindName()) + "): " + e.what(),
                                                std::nullopt });
            if (e.retryable() && failures < _config.backendRetries)
                followup(id, event.cause, turn);
            else
                failSession(id, turn.note);
            settleStatus(id);
            auto lock = std::lock_guard(_statsMutex);
            _turnLog.push_back(turn);
            return turn;
        }
        {
            auto lock = std::lock_guard(_statsMutex);
            _backendFailures[id] = 0;
        }
        turn.modelCalled = true;
        _usage.log(_store, id, response);
        _store.appendEvent(id, AssistantMessage { response.text, response.toolCall, response.usage });

        session = _store.snapshot(id);
        auto const decision = _pipeline.runAfterLlm(session, response);
        appendInjections(id, decision.injected);
        for (auto const& c: decision.conflicts)
            _store.appendEvent(id, SystemNote { "continuation conflict ignored: " + c, std::nullopt });
        turn.decision = decision.kind;

        switch (decision.kind)
        {
            case ContinuationKind::ForceAction:
                appendGuidance(id, skillOf(decision.decidedBy), "You must now call " + decision.forcedTool + ".");
                followup(id, WakeupCause::ForcedAction, turn);
                break;
            case ContinuationKind::ScheduleFollowup:
                if (!decision.gateReasons.empty())
                    appendGuidance(id, skillOf(decision.decidedBy),
                                   "Completion blocked: " + joinReasons(decision.gateReasons));
                followup(id, WakeupCause::Followup, turn);
                break;
            case ContinuationKind::AllowFinish:
            {
                auto const result = completeSession(id, response.text);
                if (std::holds_alternative<CompletionReport>(result))
                    turn.completed = true;
                else
                    followup(id, WakeupCause::Followup, turn);
                break;
            }
            case ContinuationKind::ProceedToTool:
                handleToolCall(_store.snapshot(id), response, visible, turn);
                break;
        }
    }
    catch (HookFault const& e)
    {
        turn.note = std::string("HookFault: ") + e.what();
        _store.appendEvent(id, SystemNote { turn.note, std::nullopt });
        auto faults = 0;
        {
            auto lock = std::lock_guard(_statsMutex);
            faults = ++_hookFaults[id];
        }
        if (faults <= _config.backendRetries)
            followup(id, WakeupCause::Followup, turn);
        else
            failSession(id, turn.note);
    }
    catch (Error const& e)
    {
        turn.note = std::string(e.kindName()) + ": " + e.what();
        failSession(id, turn.note);
    }
    settleStatus(id);
    auto lock = std::lock_guard(_statsMutex);
    _turnLog.push_back(turn);
    return turn;
}

auto Planner::takeNext(bool blocking) -> std::optional<WakeupEvent>
{
    auto lock = std::unique_lock(_queueMutex);
    while (true)
    {
        for (auto it = _queue.begin(); it != _queue.end(); ++it)
        {
            if (_inFlight.contains(it->sessionId))
                continue;
            auto event = std::move(*it);
            _queue.erase(it);
            --_pendingPerSession[event.sessionId];
            _inFlight.insert(event.sessionId);
            return event;
        }
        if (!blocking || _inFlight.empty())
            return std::nullopt;
        _queueChanged.wait(lock);
    }
}

void Planner::release(std::string const& sessionId)
{
    {
        auto lock = std::lock_guard(_queueMutex);
        _inFlight.erase(sessionId);
    }
    _queueChanged.notify_all();
}

auto Planner::runUntilQuiescent(std::optional<int> maxSteps) -> RunSummary
{
    auto const budget = maxSteps.value_or(_config.maxSteps);
    auto steps = 0;
    auto stepsMutex = std::mutex {};

    auto const claimStep = [&]() {
        auto lock = std::lock_guard(stepsMutex);
        if (steps >= budget)
            return false;
        ++steps;
        return true;
    };
    auto const unclaim = [&]() {
        auto lock = std::lock_guard(stepsMutex);
        --steps;
    };

    auto const worker = [&](bool blocking) {
        while (true)
        {
            if (!claimStep())
                return;
            auto event = takeNext(blocking);
            if (!event)
            {
                unclaim();
                return;
            }
            auto turn = TurnRecord {};
            try
            {
                turn = runWakeup(*event);
            }
            catch (...)
            {
                release(event->sessionId);
                throw;
            }
            release(event->sessionId);
            if (!turn.ran)
                unclaim();
        }
    };

    if (_config.singleWorker || _config.workers <= 1)
        worker(false);
    else
    {
        auto threads = std::vector<std::jthread> {};
        for (auto i = 0; i < _config.workers; ++i)
            threads.emplace_back([&] { worker(true); });
    }

    auto const outcome = pendingWakeups() > 0 ? RunOutcome::StepBudgetExhausted : RunOutcome::Quiescent;
    if (outcome == RunOutcome::StepBudgetExhausted)
        for (auto const& id: _store.sessionIds())
            settleStatus(id);
    return summary(outcome, steps);
}

auto Planner::summary(RunOutcome outcome, int steps) const -> RunSummary
{
    auto out = RunSummary { outcome, steps, {} };
    for (auto const& id: _store.sessionIds())
    {
        auto const s = _store.snapshot(id);
        auto turns = 0;
        {
            auto lock = std::lock_guard(_statsMutex);
            if (auto it = _turns.find(id); it != _turns.end())
                turns = it->second;
        }
        out.sessions.push_back({ s.id, s.parentId, s.status, turns, s.usage });
    }
    return out;
}

} // namespace skillrt
