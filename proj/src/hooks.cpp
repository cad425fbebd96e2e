// SPDX-License-Identifier: Apache-2.0
#include <skillrt/error.hpp>
#include <skillrt/hooks.hpp>

#include <algorithm>

namespace skillrt
{

auto continuationKindName(ContinuationKind kind) -> std::string_view
{
    switch (kind)
    {
        case ContinuationKind::ProceedToTool: return "proceed_to_tool";
        case ContinuationKind::ForceAction: return "force_action";
        case ContinuationKind::ScheduleFollowup: return "schedule_followup";
        case ContinuationKind::AllowFinish: return "allow_finish";
    }
    return "allow_finish";
}

namespace
{

void checkStageFields(HookDecision const& d, HookStage stage, std::string const& skillId, std::string const& programId)
{
    auto bad = [&](char const* field) {
        return HookFault(skillId, programId,
                         "hook " + skillId + "/" + programId + " set '" + field + "' at "
                             + std::string(hookStageName(stage)));
    };
    if (d.toolFilter && stage != HookStage::BeforeLlmCall)
        throw bad("tool_filter");
    if ((d.reject || d.rewrittenArgs) && stage != HookStage::BeforeToolCall)
        throw bad(d.reject ? "reject" : "rewritten_args");
    auto const continuationStage = stage == HookStage::AfterLlmResponse || stage == HookStage::AfterToolCall;
    if (d.forceAction && !continuationStage)
        throw bad("force_action");
    if (d.scheduleFollowup && !continuationStage)
        throw bad("schedule_followup");
}

void appendInjections(std::vector<Injection>& out, HookDecision const& d, std::string const& skillId)
{
    for (auto const& text: d.injectedMessages)
        out.push_back({ skillId, text });
}

void appendReasons(std::vector<std::string>& out, std::vector<std::string> const& reasons)
{
    for (auto const& r: reasons)
        if (std::find(out.begin(), out.end(), r) == out.end())
            out.push_back(r);
}

} // namespace

HookPipeline::HookPipeline(SkillRegistry const& registry, SessionStore& store, WorkspaceConfig workspace):
    _registry(registry), _store(store), _workspace(std::move(workspace))
{
}

auto HookPipeline::hooksFor(Session const& session, HookStage stage) const -> std::vector<BoundHook>
{
    auto out = std::vector<BoundHook> {};
    for (auto const& skill: _registry.skills())
    {
        if (std::find(session.routedSkills.begin(), session.routedSkills.end(), skill->skillId)
            == session.routedSkills.end())
            continue;
        for (auto const& decl: skill->hooksFor(stage))
            out.push_back({ skill, decl, _registry.bindings().hookProgram(decl.programId) });
    }
    return out;
}

auto HookPipeline::hookCount(Session const& session, HookStage stage) const -> size_t
{
    return hooksFor(session, stage).size();
}

auto HookPipeline::invoke(BoundHook const& hook, Session const& session, StagePayload payload) -> HookDecision
{
    auto const who = hook.skill->skillId + "/" + hook.decl.programId;
    if (!hook.program)
        throw HookFault(hook.skill->skillId, hook.decl.programId, "hook program " + who + " is not bound");
    auto const state = _store.getSkillState(session.id, hook.skill->skillId);
    auto ctx = HookContext { session, *hook.skill, state, hook.decl.stage, payload, _workspace };
    auto decision = HookDecision {};
    try
    {
        decision = (*hook.program)(ctx);
    }
    catch (HookFault const&)
    {
        throw;
    }
    catch (std::exception const& e)
    {
        throw HookFault(hook.skill->skillId, hook.decl.programId, "hook " + who + " raised: " + e.what());
    }
    checkStageFields(decision, hook.decl.stage, hook.skill->skillId, hook.decl.programId);
    if (decision.stateUpdate)
        _store.putSkillState(session.id, hook.skill->skillId, *decision.stateUpdate);
    return decision;
}

auto HookPipeline::runBeforeLlm(Session const& session, DraftRequest const& draft) -> BeforeLlmOutcome
{
    auto out = BeforeLlmOutcome { draft.candidateTools, {} };
    for (auto const& hook: hooksFor(session, HookStage::BeforeLlmCall))
    {
        auto const d = invoke(hook, session, &draft);
        if (d.toolFilter)
            std::erase_if(out.visibleTools, [&](auto const& name) { return !d.toolFilter->contains(name); });
        appendInjections(out.injected, d, hook.skill->skillId);
    }
    return out;
}

auto HookPipeline::runAfterLlm(Session const& session, ModelResponse const& response) -> ContinuationDecision
{
    auto out = ContinuationDecision {};
    out.kind = response.hasToolCall() ? ContinuationKind::ProceedToTool : ContinuationKind::AllowFinish;
    auto decided = false;
    for (auto const& hook: hooksFor(session, HookStage::AfterLlmResponse))
    {
        auto const d = invoke(hook, session, &response);
        appendInjections(out.injected, d, hook.skill->skillId);
        appendReasons(out.gateReasons, d.blockCompletion);

        auto kind = std::optional<ContinuationKind> {};
        if (d.forceAction)
            kind = ContinuationKind::ForceAction;
        else if (d.scheduleFollowup || !d.blockCompletion.empty())
            kind = ContinuationKind::ScheduleFollowup;
        if (!kind)
            continue;
        auto const who = hook.skill->skillId + "/" + hook.decl.programId;
        if (decided)
        {
            if (*kind != out.kind || (d.forceAction && *d.forceAction != out.forcedTool))
                out.conflicts.push_back(who + " wanted " + std::string(continuationKindName(*kind))
                                        + (d.forceAction ? "(" + *d.forceAction + ")" : std::string {}));
            continue;
        }
        decided = true;
        out.kind = *kind;
        out.forcedTool = d.forceAction.value_or("");
        out.decidedBy = who;
    }
    return out;
}

auto HookPipeline::runBeforeTool(Session const& session, PendingCall const& call) -> BeforeToolOutcome
{
    auto out = BeforeToolOutcome {};
    out.args = call.args;
    auto current = call;
    for (auto const& hook: hooksFor(session, HookStage::BeforeToolCall))
    {
        auto const d = invoke(hook, session, &current);
        appendInjections(out.injected, d, hook.skill->skillId);
        appendReasons(out.gateReasons, d.blockCompletion);
        if (d.reject)
        {
            out.allowed = false;
            out.rejection = *d.reject;
            out.rejectedBy = hook.skill->skillId + "/" + hook.decl.programId;
            return out;
        }
        if (d.rewrittenArgs)
        {
            current.args = *d.rewrittenArgs;
            out.args = *d.rewrittenArgs;
        }
    }
    return out;
}

auto HookPipeline::runAfterTool(Session const& session, ToolResultView const& result) -> AfterToolOutcome
{
    auto out = AfterToolOutcome {};
    for (auto const& hook: hooksFor(session, HookStage::AfterToolCall))
    {
        auto const d = invoke(hook, session, &result);
        appendInjections(out.injected, d, hook.skill->skillId);
        appendReasons(out.gateReasons, d.blockCompletion);
        if (d.scheduleFollowup || !d.blockCompletion.empty())
            out.followupNeeded = true;
        if (d.forceAction && !out.forceAction)
            out.forceAction = d.forceAction;
    }
    return out;
}

} // namespace skillrt
