// SPDX-License-Identifier: Apache-2.0
#include "fixtures.hpp"

#include <skillrt/error.hpp>
#include <skillrt/hooks.hpp>

#include <catch_amalgamated.hpp>

using namespace skillrt;
using namespace skillrt::testing;

namespace
{

auto manifestFor(std::string const& id, Json hooks) -> Json
{
    return {
        { "skill_id", id },
        { "version", "1.0.0" },
        { "description", "hook test skill" },
        { "task_types", { "demo" } },
        { "tools",
          { { { "name", id + "_tool" },
              { "description", "t" },
              { "executor_id", "test.noop" },
              { "params", { { "type", "object" } } } } } },
        { "hooks", std::move(hooks) },
    };
}

auto hook(std::string stage, std::string program, int order) -> Json
{
    return { { "stage", std::move(stage) }, { "program_id", std::move(program) }, { "order", order } };
}

/// Two skills whose hook programs are supplied per test.
struct HookBench
{
    BindingTable bindings;
    std::vector<std::string> calls;
    std::map<std::string, std::function<HookDecision(HookContext const&)>> behaviour;
    std::unique_ptr<SkillRegistry> registry;
    SessionStore store;
    TempDir ws;
    Session session;

    HookBench(Json alphaHooks, Json betaHooks)
    {
        bindings.addExecutor("test.noop", [](ToolInvocation const&, ExecContext const&) { return ToolOutcome::success({}); });
        for (auto const& id: { "a.first", "a.second", "b.first", "b.second" })
            bindings.addHookProgram(id, [this, name = std::string(id)](HookContext const& ctx) {
                calls.push_back(name);
                auto it = behaviour.find(name);
                return it == behaviour.end() ? HookDecision {} : it->second(ctx);
            });
        registry = std::make_unique<SkillRegistry>(bindings);
        registry->registerManifest(parseSkillManifest(manifestFor("alpha", std::move(alphaHooks)), Json::object()));
        registry->registerManifest(parseSkillManifest(manifestFor("beta", std::move(betaHooks)), Json::object()));
        session = store.createSession({ "t", "demo", ws.path(), "", std::nullopt, { "alpha", "beta" } });
    }

    auto pipeline() -> HookPipeline { return HookPipeline(*registry, store, WorkspaceConfig {}); }
};

auto both(std::string const& stage) -> std::pair<Json, Json>
{
    return { Json { hook(stage, "a.second", 2), hook(stage, "a.first", 1) },
             Json { hook(stage, "b.first", 0), hook(stage, "b.second", 5) } };
}

} // namespace

TEST_CASE("hooks run in skill order then declaration order")
{
    auto [a, b] = both("before_llm_call");
    HookBench bench(a, b);
    auto p = bench.pipeline();
    (void) p.runBeforeLlm(bench.session, DraftRequest { { "x" } });
    CHECK(bench.calls == std::vector<std::string> { "a.first", "a.second", "b.first", "b.second" });
    CHECK(p.hookCount(bench.session, HookStage::BeforeLlmCall) == 4);
    CHECK(p.hookCount(bench.session, HookStage::AfterToolCall) == 0);
}

TEST_CASE("only routed skills run their hooks")
{
    auto [a, b] = both("before_llm_call");
    HookBench bench(a, b);
    auto const other = bench.store.createSession({ "t", "demo", bench.ws.path(), "", std::nullopt, { "beta" } });
    auto p = bench.pipeline();
    (void) p.runBeforeLlm(other, DraftRequest { {} });
    CHECK(bench.calls == std::vector<std::string> { "b.first", "b.second" });
}

TEST_CASE("tool filters intersect and injections accumulate")
{
    auto [a, b] = both("before_llm_call");
    HookBench bench(a, b);
    bench.behaviour["a.first"] = [](HookContext const&) {
        auto d = HookDecision {};
        d.toolFilter = std::set<std::string> { "x", "y", "z" };
        d.injectedMessages = { "from alpha" };
        return d;
    };
    bench.behaviour["b.second"] = [](HookContext const&) {
        auto d = HookDecision {};
        d.toolFilter = std::set<std::string> { "y", "z", "w" };
        d.injectedMessages = { "from beta" };
        return d;
    };
    auto p = bench.pipeline();
    auto const out = p.runBeforeLlm(bench.session, DraftRequest { { "w", "x", "y", "z", "q" } });
    CHECK(out.visibleTools == std::vector<std::string> { "y", "z" });
    REQUIRE(out.injected.size() == 2);
    CHECK(out.injected[0].skillId == "alpha");
    CHECK(out.injected[1].text == "from beta");
}

TEST_CASE("a rejection stops later before-tool hooks")
{
    auto [a, b] = both("before_tool_call");
    HookBench bench(a, b);
    bench.behaviour["a.first"] = [](HookContext const& ctx) {
        auto d = HookDecision {};
        auto args = ctx.call()->args;
        args["rewritten"] = true;
        d.rewrittenArgs = args;
        return d;
    };
    bench.behaviour["a.second"] = [](HookContext const& ctx) {
        CHECK(ctx.call()->args.value("rewritten", false));
        auto d = HookDecision {};
        d.reject = Rejection { "no", "try other" };
        return d;
    };
    auto p = bench.pipeline();
    auto const out = p.runBeforeTool(bench.session, PendingCall { "call-1", "alpha_tool", { { "k", 1 } } });
    CHECK_FALSE(out.allowed);
    CHECK(out.rejectedBy == "alpha/a.second");
    CHECK(out.rejection.redirectHint == "try other");
    CHECK(bench.calls == std::vector<std::string> { "a.first", "a.second" });
}

TEST_CASE("rewritten arguments flow to the executor")
{
    auto [a, b] = both("before_tool_call");
    HookBench bench(a, b);
    bench.behaviour["b.first"] = [](HookContext const&) {
        auto d = HookDecision {};
        d.rewrittenArgs = Json { { "k", 2 } };
        return d;
    };
    auto p = bench.pipeline();
    auto const out = p.runBeforeTool(bench.session, PendingCall { "call-1", "alpha_tool", { { "k", 1 } } });
    CHECK(out.allowed);
    CHECK(out.args == Json { { "k", 2 } });
}

TEST_CASE("the first continuation wins and later disagreements are recorded")
{
    auto [a, b] = both("after_llm_response");
    HookBench bench(a, b);
    bench.behaviour["a.second"] = [](HookContext const&) {
        auto d = HookDecision {};
        d.forceAction = "alpha_tool";
        return d;
    };
    bench.behaviour["b.first"] = [](HookContext const&) {
        auto d = HookDecision {};
        d.blockCompletion = { "not yet" };
        return d;
    };
    auto p = bench.pipeline();
    auto const out = p.runAfterLlm(bench.session, ModelResponse { "hi", std::nullopt, {} });
    CHECK(out.kind == ContinuationKind::ForceAction);
    CHECK(out.forcedTool == "alpha_tool");
    CHECK(out.decidedBy == "alpha/a.second");
    CHECK(out.gateReasons == std::vector<std::string> { "not yet" });
    REQUIRE(out.conflicts.size() == 1);
    CHECK_THAT(out.conflicts[0], Catch::Matchers::ContainsSubstring("beta/b.first"));
}

TEST_CASE("without opinions the continuation follows the response")
{
    auto [a, b] = both("after_llm_response");
    HookBench bench(a, b);
    auto p = bench.pipeline();
    CHECK(p.runAfterLlm(bench.session, ModelResponse { "", ToolCallRequest { "alpha_tool", {} }, {} }).kind
          == ContinuationKind::ProceedToTool);
    CHECK(p.runAfterLlm(bench.session, ModelResponse { "done", std::nullopt, {} }).kind == ContinuationKind::AllowFinish);
}

TEST_CASE("after-tool hooks request followups and persist state")
{
    auto [a, b] = both("after_tool_call");
    HookBench bench(a, b);
    bench.behaviour["a.first"] = [](HookContext const& ctx) {
        auto d = HookDecision {};
        d.stateUpdate = Json { { "count", ctx.state.value("count", 0) + 1 } };
        return d;
    };
    bench.behaviour["b.second"] = [](HookContext const& ctx) {
        CHECK(ctx.state == Json::object());
        auto d = HookDecision {};
        d.scheduleFollowup = true;
        return d;
    };
    auto p = bench.pipeline();
    auto const view = ToolResultView { "call-1", "alpha_tool", true, {}, {} };
    CHECK(p.runAfterTool(bench.session, view).followupNeeded);
    (void) p.runAfterTool(bench.session, view);
    CHECK(bench.store.getSkillState(bench.session.id, "alpha")["count"] == 2);
    CHECK(bench.store.getSkillState(bench.session.id, "beta") == Json::object());
}

TEST_CASE("illegal fields and throwing programs are hook faults")
{
    auto const faultOf = [](std::string const& stage, std::function<HookDecision(HookContext const&)> fn) {
        HookBench bench(Json { hook(stage, "a.first", 0) }, Json::array());
        bench.behaviour["a.first"] = std::move(fn);
        auto p = bench.pipeline();
        try
        {
            if (stage == "before_llm_call")
                (void) p.runBeforeLlm(bench.session, DraftRequest {});
            else if (stage == "after_llm_response")
                (void) p.runAfterLlm(bench.session, ModelResponse {});
            else if (stage == "before_tool_call")
                (void) p.runBeforeTool(bench.session, PendingCall {});
            else
                (void) p.runAfterTool(bench.session, ToolResultView {});
        }
        catch (HookFault const& e)
        {
            CHECK(e.skillId() == "alpha");
            CHECK(e.programId() == "a.first");
            return true;
        }
        return false;
    };
    CHECK(faultOf("after_tool_call", [](HookContext const&) {
        auto d = HookDecision {};
        d.toolFilter = std::set<std::string> {};
        return d;
    }));
    CHECK(faultOf("before_llm_call", [](HookContext const&) {
        auto d = HookDecision {};
        d.reject = Rejection {};
        return d;
    }));
    CHECK(faultOf("before_tool_call", [](HookContext const&) {
        auto d = HookDecision {};
        d.forceAction = "x";
        return d;
    }));
    CHECK(faultOf("before_llm_call", [](HookContext const&) {
        auto d = HookDecision {};
        d.scheduleFollowup = true;
        return d;
    }));
    CHECK(faultOf("after_llm_response", [](HookContext const&) -> HookDecision { throw std::runtime_error("boom"); }));
    CHECK_FALSE(faultOf("after_llm_response", [](HookContext const&) { return HookDecision {}; }));
}
