// SPDX-License-Identifier: Apache-2.0
#include <skillrt/error.hpp>
#include <skillrt/glob.hpp>
#include <skillrt/repair/artifacts.hpp>
#include <skillrt/repair/repair_skill.hpp>
#include <skillrt/repair/unified_patch.hpp>
#include <skillrt/workspace.hpp>

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

namespace fs = std::filesystem;

namespace skillrt::repair
{

namespace
{

auto readFile(fs::path const& path) -> std::optional<std::string>
{
    auto in = std::ifstream(path, std::ios::binary);
    if (!in)
        return std::nullopt;
    auto buffer = std::stringstream {};
    buffer << in.rdbuf();
    return buffer.str();
}

void writeFileAtomic(fs::path const& path, std::string const& content)
{
    auto ec = std::error_code {};
    fs::create_directories(path.parent_path(), ec);
    auto tmp = path;
    tmp += ".skillrt-tmp";
    {
        auto out = std::ofstream(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.close();
        if (!out)
            throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
    }
    fs::rename(tmp, path, ec);
    if (ec)
        throw Error(ErrorKind::Io, "cannot replace '" + path.string() + "': " + ec.message());
}

auto joinNames(std::vector<std::string> const& names) -> std::string
{
    auto out = std::string {};
    for (auto const& n: names)
        out += (out.empty() ? "" : ", ") + n;
    return out;
}

auto protectedMatch(PolicyConfig const& policy, std::string const& relative) -> std::optional<std::string>
{
    for (auto const& g: policy.compiledGlobs())
        if (g.matches(relative))
            return g.pattern();
    return std::nullopt;
}

auto argvOf(Json const& value) -> std::optional<std::vector<std::string>>
{
    if (!value.is_array() || value.empty())
        return std::nullopt;
    auto out = std::vector<std::string> {};
    for (auto const& v: value)
    {
        if (!v.is_string())
            return std::nullopt;
        out.push_back(v.get<std::string>());
    }
    return out;
}

auto stringArg(Json const& args, char const* key) -> std::optional<std::string>
{
    auto it = args.find(key);
    if (it == args.end() || !it->is_string())
        return std::nullopt;
    return it->get<std::string>();
}

/// Shape, scoping and allowlist problems of one verification check.
auto checkProblem(Json const& check, fs::path const& root, std::vector<std::string> const& allowlist)
    -> std::optional<std::string>
{
    auto const name = check.value("name", std::string {});
    auto const type = check.value("type", std::string {});
    auto const& args = check.contains("args") ? check["args"] : Json::object();
    auto const label = "check '" + name + "'";
    auto const needCommand = [&]() -> std::optional<std::string> {
        auto argv = argvOf(args.value("command", Json()));
        if (!argv)
            return label + ": args.command must be a non-empty argv array";
        if (!isCommandAllowed(*argv, allowlist))
            return label + ": command '" + argv->front() + "' is not allowlisted";
        return std::nullopt;
    };
    auto const needPath = [&]() -> std::optional<std::string> {
        auto path = stringArg(args, "path");
        if (!path)
            return label + ": args.path must be a string";
        try
        {
            (void) resolveScoped(root, *path);
        }
        catch (Error const& e)
        {
            return label + ": " + e.what();
        }
        return std::nullopt;
    };
    if (type == "command_exit_zero")
        return needCommand();
    if (type == "file_exists")
        return needPath();
    if (type == "file_contains")
    {
        if (!stringArg(args, "needle"))
            return label + ": args.needle must be a string";
        return needPath();
    }
    if (type == "output_matches")
    {
        auto pattern = stringArg(args, "pattern");
        if (!pattern)
            return label + ": args.pattern must be a string";
        try
        {
            (void) std::regex(*pattern);
        }
        catch (std::regex_error const&)
        {
            return label + ": args.pattern is not a valid regular expression";
        }
        return needCommand();
    }
    return label + ": unknown type '" + type + "'";
}

auto reject(std::string reason, std::string hint = {}) -> std::optional<Rejection>
{
    return Rejection { std::move(reason), std::move(hint) };
}

auto guardPatch(PendingCall const& call, Session const& session, PolicyConfig const& policy)
    -> std::optional<Rejection>
{
    auto scoped = ScopedPath {};
    try
    {
        scoped = resolveScoped(session.workspaceRoot, call.args.value("target", std::string {}));
    }
    catch (Error const& e)
    {
        return reject(e.what());
    }
    if (auto glob = protectedMatch(policy, scoped.relative))
        return reject("target '" + scoped.relative + "' matches protected glob '" + *glob + "'",
                      "Protected files cannot be patched. Record the proposed change as a note with "
                      "repair_write_artifact (for example "
                          + policy.artifactDir + "/protected_change.md) instead.");
    auto const body = call.args.value("patch", std::string {});
    if (!hasHunkMarker(body))
        return reject("missing hunk marker '@@'", "Send a unified diff with at least one @@ hunk header.");
    auto parsed = ParsedPatch {};
    try
    {
        parsed = parseUnifiedPatch(body);
    }
    catch (Error const& e)
    {
        return reject(e.what());
    }
    auto ec = std::error_code {};
    auto const exists = fs::is_regular_file(scoped.resolved, ec);
    if (parsed.isCreation() && exists)
        return reject("patch creates '" + scoped.relative + "' but the file already exists");
    if (!parsed.isCreation() && !exists)
        return reject("target '" + scoped.relative + "' does not exist");
    if (exists && isAppendOnly(parsed, readFile(scoped.resolved).value_or("")))
        return reject("append-only edit of existing file '" + scoped.relative + "'",
                      "Change the faulty lines in place instead of appending code.");
    if (parsed.changedLines() > static_cast<std::size_t>(policy.maxPatchLines))
        return reject("patch changes " + std::to_string(parsed.changedLines()) + " lines, more than the limit of "
                      + std::to_string(policy.maxPatchLines));
    return std::nullopt;
}

auto guardEvidence(PendingCall const& call, Session const& session, std::vector<std::string> const& allowlist)
    -> std::optional<Rejection>
{
    auto const hasCommand = call.args.contains("command");
    auto const hasLog = call.args.contains("log_path");
    if (hasCommand == hasLog)
        return reject("provide exactly one of 'command' or 'log_path'");
    if (hasCommand)
    {
        auto argv = argvOf(call.args["command"]);
        if (!argv)
            return reject("'command' must be a non-empty argv array");
        if (!isCommandAllowed(*argv, allowlist))
            return reject("command '" + argv->front() + "' is not allowlisted",
                          "Allowed commands: " + joinNames(allowlist));
        return std::nullopt;
    }
    try
    {
        (void) resolveScoped(session.workspaceRoot, call.args.value("log_path", std::string {}));
    }
    catch (Error const& e)
    {
        return reject(e.what());
    }
    return std::nullopt;
}

auto stateOf(HookContext const& ctx) -> RepairState
{
    return loadState(ctx.state, ctx.session, ctx.policy());
}

auto hookBeforeLlm(HookContext const& ctx) -> HookDecision
{
    auto const state = stateOf(ctx);
    auto const candidates = ctx.draft() ? ctx.draft()->candidateTools : std::vector<std::string> {};
    auto const visible = visibleToolsFor(state.phase, candidates);
    auto d = HookDecision {};
    d.toolFilter = std::set<std::string>(visible.begin(), visible.end());
    d.injectedMessages.push_back(guidanceMessage(state, visible));
    if (state.toJson() != ctx.state)
        d.stateUpdate = state.toJson();
    return d;
}

auto hookAfterLlm(HookContext const& ctx) -> HookDecision
{
    auto d = HookDecision {};
    auto const* response = ctx.response();
    if (!response || response->hasToolCall())
        return d;
    auto const state = stateOf(ctx);
    switch (state.phase)
    {
        case Phase::Reproduce: d.forceAction = std::string(kEvidenceTool); return d;
        case Phase::Verify: d.forceAction = std::string(kVerifyTool); return d;
        case Phase::Diagnose:
        case Phase::Patch:
        case Phase::Report: break;
    }
    d.blockCompletion = completionReasons(state, ctx.session.workspaceRoot);
    d.scheduleFollowup = !d.blockCompletion.empty();
    return d;
}

auto hookBeforeTool(HookContext const& ctx) -> HookDecision
{
    auto d = HookDecision {};
    auto const* call = ctx.call();
    if (!call)
        return d;
    auto const state = stateOf(ctx);
    if (call->name == "finish")
    {
        d.blockCompletion = completionReasons(state, ctx.session.workspaceRoot);
        if (!d.blockCompletion.empty())
            d.reject = Rejection { "completion gates are open: " + joinNames(d.blockCompletion),
                                   "Reach the report phase with passing verification and write the required "
                                   "artifacts first." };
        return d;
    }
    d.reject = guardCall(state, *call, ctx.session, ctx.policy(), ctx.workspace);
    return d;
}

auto hookAfterTool(HookContext const& ctx) -> HookDecision
{
    auto d = HookDecision {};
    auto const* result = ctx.result();
    if (!result)
        return d;
    auto const before = stateOf(ctx);
    auto const after = applyToolResult(before, *result, ctx.policy(), ctx.session.lastSeq());
    if (after.toJson() != ctx.state)
        d.stateUpdate = after.toJson();
    if (result->name == "finish" && result->ok)
        return d;
    d.blockCompletion = completionReasons(after, ctx.session.workspaceRoot);
    d.scheduleFollowup = true;
    return d;
}

// ---------------------------------------------------------------------------
// Executors

auto collectEvidence(ToolInvocation const& inv, ExecContext const& ctx) -> ToolOutcome
{
    auto text = std::string {};
    auto output = Json::object();
    if (inv.args.contains("command"))
    {
        auto const argv = inv.args["command"].get<std::vector<std::string>>();
        auto const result = runCommand(argv, ctx.session.workspaceRoot,
                                       effectiveAllowlist(ctx.workspace, ctx.manifest ? &ctx.manifest->policy : nullptr),
                                       ctx.workspace.commandTimeoutS, ctx.workspace.outputTruncateBytes);
        text = result.stdoutText;
        if (!result.stderrText.empty())
            text += (text.empty() || text.ends_with('\n') ? "" : "\n") + result.stderrText;
        if (text.empty() && result.exitCode == 0)
            throw Error(ErrorKind::EmptyEvidence, "command produced no output and exited 0");
        output = { { "source", "command" }, { "exit_code", result.exitCode }, { "truncated", result.truncated } };
    }
    else
    {
        auto const path = resolveScoped(ctx.session.workspaceRoot, inv.args.at("log_path").get<std::string>());
        auto content = readFile(path.resolved);
        if (!content || content->empty())
            throw Error(ErrorKind::EmptyEvidence, "log '" + path.relative + "' is missing or empty");
        text = std::move(*content);
        output = { { "source", "log" }, { "log_path", path.relative } };
    }
    auto const signature = failureSignature(text);
    if (!signature)
        throw Error(ErrorKind::EmptyEvidence, "evidence contains no non-blank line");
    if (text.size() > ctx.workspace.outputTruncateBytes)
        text.resize(ctx.workspace.outputTruncateBytes);
    output["output"] = text;
    output["signature"] = *signature;
    return ToolOutcome::success(std::move(output));
}

auto applyUnifiedPatch(ToolInvocation const& inv, ExecContext const& ctx) -> ToolOutcome
{
    auto const target = resolveScoped(ctx.session.workspaceRoot, inv.args.at("target").get<std::string>());
    auto const patch = parseUnifiedPatch(inv.args.at("patch").get<std::string>());
    auto const current = readFile(target.resolved);
    if (!current && !patch.isCreation())
        throw Error(ErrorKind::TargetMissing, "target '" + target.relative + "' does not exist");
    auto const updated = applyPatch(current.value_or(""), patch);
    writeFileAtomic(target.resolved, updated);
    return ToolOutcome::success({ { "target", target.relative },
                                  { "hunks", patch.hunks.size() },
                                  { "added", patch.addedLines() },
                                  { "removed", patch.removedLines() },
                                  { "created", !current.has_value() } });
}

auto runCheck(Json const& check, ExecContext const& ctx, std::vector<std::string> const& allowlist) -> Json
{
    auto const name = check.value("name", std::string {});
    auto const type = check.value("type", std::string {});
    auto out = Json { { "name", name }, { "type", type }, { "passed", false } };
    if (auto problem = checkProblem(check, ctx.session.workspaceRoot, allowlist))
    {
        out["detail"] = *problem;
        return out;
    }
    auto const& args = check["args"];
    try
    {
        if (type == "command_exit_zero" || type == "output_matches")
        {
            auto const result = runCommand(args["command"].get<std::vector<std::string>>(), ctx.session.workspaceRoot,
                                           allowlist, ctx.workspace.commandTimeoutS, ctx.workspace.outputTruncateBytes);
            out["exit_code"] = result.exitCode;
            if (type == "command_exit_zero")
                out["passed"] = result.exitCode == 0;
            else
                out["passed"] = std::regex_search(result.stdoutText + result.stderrText,
                                                  std::regex(args["pattern"].get<std::string>()));
            auto tail = result.stdoutText + result.stderrText;
            if (tail.size() > 2000)
                tail = tail.substr(tail.size() - 2000);
            out["detail"] = tail;
            return out;
        }
        auto const path = resolveScoped(ctx.session.workspaceRoot, args["path"].get<std::string>());
        auto ec = std::error_code {};
        if (type == "file_exists")
        {
            out["passed"] = fs::is_regular_file(path.resolved, ec);
            return out;
        }
        auto const content = readFile(path.resolved);
        out["passed"] = content && content->find(args["needle"].get<std::string>()) != std::string::npos;
    }
    catch (Error const& e)
    {
        out["detail"] = std::string(e.kindName()) + ": " + e.what();
    }
    return out;
}

auto runVerification(ToolInvocation const& inv, ExecContext const& ctx) -> ToolOutcome
{
    auto const allowlist = effectiveAllowlist(ctx.workspace, ctx.manifest ? &ctx.manifest->policy : nullptr);
    auto results = Json::array();
    auto failed = std::vector<std::string> {};
    for (auto const& check: inv.args.at("checks"))
    {
        auto r = runCheck(check, ctx, allowlist);
        if (!r["passed"].get<bool>())
            failed.push_back(r["name"].get<std::string>());
        results.push_back(std::move(r));
    }
    auto const passed = failed.empty() && !results.empty();
    return ToolOutcome::success({ { "passed", passed }, { "checks", results }, { "failed", failed } });
}

auto writeArtifact(ToolInvocation const& inv, ExecContext const& ctx) -> ToolOutcome
{
    auto const path = resolveScoped(ctx.session.workspaceRoot, inv.args.at("path").get<std::string>());
    auto const content = inv.args.at("content").get<std::string>();
    writeFileAtomic(path.resolved, content);
    return ToolOutcome::success({ { "path", path.relative }, { "bytes", content.size() } });
}

} // namespace

auto hiddenOrchestrationTools() -> std::set<std::string> const&
{
    static auto const hidden = std::set<std::string> { "fs_write", "run_command", "delegate_subtask" };
    return hidden;
}

auto visibleToolsFor(Phase phase, std::vector<std::string> const& candidates) -> std::vector<std::string>
{
    auto const repairTools = allRepairTools();
    auto const phaseTools = repairToolsFor(phase);
    auto out = std::vector<std::string> {};
    for (auto const& name: candidates)
    {
        if (hiddenOrchestrationTools().contains(name))
            continue;
        if (name == "finish" && phase != Phase::Report)
            continue;
        if (repairTools.contains(name) && !phaseTools.contains(name))
            continue;
        out.push_back(name);
    }
    return out;
}

auto guidanceMessage(RepairState const& state, std::vector<std::string> const& visible) -> std::string
{
    auto out = std::string {};
    out += "Current phase: " + std::string(phaseName(state.phase)) + "\n";
    out += "Visible tools: " + joinNames(visible) + "\n";
    out += "Workflow: reproduce -> patch -> verify -> report\n";
    out += "Do not finish before verification has passed.\n";
    out += "Required artifacts: "
           + (state.requiredArtifacts.empty() ? std::string("(none)") : joinNames(state.requiredArtifacts)) + "\n";
    out += "Edit code only through " + std::string(kPatchTool) + ".\n";
    out += "Verification checks are shaped as {name,type,args}.";
    return out;
}

auto loadState(Json const& stored, Session const& session, PolicyConfig const& policy) -> RepairState
{
    auto const fresh = stored.is_null() || (stored.is_object() && stored.empty());
    auto state = RepairState::fromJson(stored);
    if (fresh)
        state.requiredArtifacts = inferRequiredArtifacts(session.doneWhen, session.workspaceRoot,
                                                         policy.artifactExtensions);
    state.producedArtifacts = existingArtifacts(state.producedArtifacts, session.workspaceRoot);
    return state;
}

auto applyToolResult(RepairState state, ToolResultView const& result, PolicyConfig const& policy, std::uint64_t seq)
    -> RepairState
{
    state.lastTool = LastTool { result.name, result.ok, seq };
    if (!result.ok)
        return state;
    auto const& out = result.output;
    if (result.name == kEvidenceTool)
    {
        if (out.contains("signature") && out["signature"].is_string())
            state.failureSignature = out["signature"].get<std::string>();
        if (state.phase == Phase::Reproduce)
            state.enter(policy.contextualDiagnosis ? Phase::Diagnose : Phase::Patch);
    }
    else if (result.name == kPatchTool)
    {
        if (state.phase == Phase::Diagnose)
            state.enter(Phase::Patch);
        if (state.phase == Phase::Patch)
        {
            state.verificationPassed = false;
            state.enter(Phase::Verify);
        }
    }
    else if (result.name == kVerifyTool && state.phase == Phase::Verify)
    {
        if (out.value("passed", false))
        {
            state.verificationPassed = true;
            state.enter(Phase::Report);
        }
        else
        {
            state.verificationPassed = false;
            for (auto const& name: out.value("failed", std::vector<std::string> {}))
                state.gateFailReasons.push_back("check failed: " + name);
            state.enter(Phase::Patch);
        }
    }
    else if (result.name == kArtifactTool)
    {
        auto const path = out.value("path", std::string {});
        if (!path.empty()
            && std::find(state.producedArtifacts.begin(), state.producedArtifacts.end(), path)
                   == state.producedArtifacts.end())
            state.producedArtifacts.push_back(path);
    }
    return state;
}

auto guardCall(RepairState const& state, PendingCall const& call, Session const& session, PolicyConfig const& policy,
               WorkspaceConfig const& workspace) -> std::optional<Rejection>
{
    if (hiddenOrchestrationTools().contains(call.name))
        return reject("'" + call.name + "' is disabled in repair sessions",
                      "Edit code with " + std::string(kPatchTool) + " and write notes with "
                          + std::string(kArtifactTool) + ".");
    if (!allRepairTools().contains(call.name))
        return std::nullopt;
    auto const phaseTools = repairToolsFor(state.phase);
    if (!phaseTools.contains(call.name))
        return reject("'" + call.name + "' is not available in phase " + std::string(phaseName(state.phase)),
                      "Tools for this phase: " + joinNames({ phaseTools.begin(), phaseTools.end() }));

    auto const allowlist = effectiveAllowlist(workspace, &policy);
    if (call.name == kEvidenceTool)
        return guardEvidence(call, session, allowlist);
    if (call.name == kPatchTool)
        return guardPatch(call, session, policy);
    if (call.name == kVerifyTool)
    {
        auto const& checks = call.args.contains("checks") ? call.args["checks"] : Json::array();
        if (!checks.is_array() || checks.empty())
            return reject("verification requires a non-empty check list");
        for (auto const& c: checks)
            if (auto problem = checkProblem(c, session.workspaceRoot, allowlist))
                return reject(*problem, "Checks are shaped as {name,type,args}.");
        return std::nullopt;
    }
    // artifact
    try
    {
        auto const scoped = resolveScoped(session.workspaceRoot, call.args.value("path", std::string {}));
        if (auto glob = protectedMatch(policy, scoped.relative))
            return reject("artifact path '" + scoped.relative + "' matches protected glob '" + *glob + "'",
                          "Write artifacts under " + policy.artifactDir + "/.");
    }
    catch (Error const& e)
    {
        return reject(e.what());
    }
    return std::nullopt;
}

void registerRepairBindings(BindingTable& table)
{
    table.addExecutor("repair.collect_evidence", collectEvidence);
    table.addExecutor("repair.apply_unified_patch", applyUnifiedPatch);
    table.addExecutor("repair.run_verification", runVerification);
    table.addExecutor("repair.write_artifact", writeArtifact);
    table.addHookProgram("repair.before_llm", hookBeforeLlm);
    table.addHookProgram("repair.after_llm", hookAfterLlm);
    table.addHookProgram("repair.before_tool", hookBeforeTool);
    table.addHookProgram("repair.after_tool", hookAfterTool);
    table.addCompletionGate("repair.completion_gate",
                            [](Session const& session, Json const& state, SkillManifest const& manifest) {
                                return completionReasons(loadState(state, session, manifest.policy),
                                                         session.workspaceRoot);
                            });
}

} // namespace skillrt::repair
