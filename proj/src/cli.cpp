// SPDX-License-Identifier: Apache-2.0
#include <skillrt/cli.hpp>
#include <skillrt/error.hpp>
#include <skillrt/http_backend.hpp>
#include <skillrt/orchestration.hpp>
#include <skillrt/planner.hpp>
#include <skillrt/registry.hpp>
#include <skillrt/repair/repair_skill.hpp>
#include <skillrt/runtime_config.hpp>
#include <skillrt/scripted_backend.hpp>

#include <CLI11.hpp>

#include <memory>

namespace fs = std::filesystem;

namespace skillrt
{

namespace
{

auto oneLine(std::string const& text, std::size_t limit = 100) -> std::string
{
    auto line = text.substr(0, text.find('\n'));
    if (line.size() > limit)
        line = line.substr(0, limit) + "...";
    else if (line.size() < text.size())
        line += " ...";
    return line;
}

auto usageText(UsageTotals const& u) -> std::string
{
    return "requests=" + std::to_string(u.requestCount) + " input=" + std::to_string(u.inputTokens)
           + " output=" + std::to_string(u.outputTokens) + " cache=" + std::to_string(u.cacheTokens)
           + " total=" + std::to_string(u.totalTokens);
}

auto phasePath(Json const& state) -> std::string
{
    auto out = std::string {};
    if (!state.is_object() || !state.contains("phase_history"))
        return out;
    for (auto const& p: state["phase_history"])
        out += (out.empty() ? "" : " -> ") + p.get<std::string>();
    return out;
}

struct RunOptions
{
    std::string skillsDir;
    std::string storeDir;
    std::string workspace;
    std::string task;
    std::string taskType;
    std::string doneWhen;
    std::string script;
    bool http = false;
    std::string config;
    bool routeRoot = false;
};

auto cmdRun(RunOptions const& opts, std::ostream& out) -> int
{
    auto config = opts.config.empty() ? RuntimeConfig {} : RuntimeConfig::load(opts.config);

    auto const bindings = standardBindings();
    auto registry = SkillRegistry(bindings);
    registry.loadAll(opts.skillsDir);
    for (auto const& [skill, policy]: config.skillPolicy)
        registry.overridePolicy(skill, policy);

    auto ec = std::error_code {};
    if (!fs::is_directory(opts.workspace, ec))
        throw Error(ErrorKind::NotFound, "workspace '" + opts.workspace + "' does not exist");
    auto const root = fs::canonical(opts.workspace);

    auto store = SessionStore::open(opts.storeDir);
    auto usage = UsageLog(fs::path(opts.storeDir) / "requests.jsonl");

    auto backend = std::unique_ptr<ModelBackend> {};
    if (opts.http)
    {
        auto endpoint = EndpointConfig::fromEnvironment();
        if (!endpoint)
            throw Error(ErrorKind::InvalidArgument, "--http needs MODEL_BASE_URL and MODEL_NAME in the environment");
        backend = std::make_unique<HttpBackend>(*endpoint);
    }
    else
        backend = std::make_unique<ScriptedBackend>(loadScript(opts.script));

    auto planner = Planner(registry, *store, *backend, usage, config.planner, config.workspace, config.router);
    auto routed = std::vector<std::string> {};
    if (opts.routeRoot)
        routed = planner.router().route(DelegatedTask { opts.task, opts.taskType, root, opts.doneWhen }).skillIds();
    auto const session =
        planner.startSession(NewSession { opts.task, opts.taskType, root, opts.doneWhen, std::nullopt, routed });

    auto const summary = planner.runUntilQuiescent();
    out << "run " << (summary.outcome == RunOutcome::Quiescent ? "quiescent" : "step budget exhausted") << " after "
        << summary.steps << " step(s)\n";
    for (auto const& s: summary.sessions)
    {
        auto const snap = store->snapshot(s.id);
        out << "session " << s.id << " parent=" << s.parentId.value_or("-") << " status=" << sessionStatusName(s.status)
            << " turns=" << s.turns << " " << usageText(s.usage) << "\n";
        for (auto const& [skill, state]: snap.skillState)
            if (auto path = phasePath(state); !path.empty())
                out << "  " << skill << " phases: " << path << "\n";
    }
    for (auto const& w: store->warnings())
        out << "warning: " << w << "\n";

    auto const rootStatus = store->snapshot(session.id).status;
    if (rootStatus == SessionStatus::Completed)
        return 0;
    if (summary.outcome == RunOutcome::StepBudgetExhausted)
        return 2;
    return 1;
}

auto cmdSkills(std::string const& skillsDir, std::ostream& out) -> int
{
    auto const bindings = standardBindings();
    auto registry = SkillRegistry(bindings);
    for (auto const& skill: registry.loadAll(skillsDir))
    {
        out << skill->skillId << " " << skill->version << "\n";
        auto tools = std::string {};
        for (auto const& t: skill->tools)
            tools += (tools.empty() ? "" : ", ") + t.name;
        auto triggers = std::string {};
        for (auto const& k: skill->triggerKeywords)
            triggers += (triggers.empty() ? "" : ", ") + k;
        auto types = std::string {};
        for (auto const& k: skill->taskTypes)
            types += (types.empty() ? "" : ", ") + k;
        out << "  tools: " << tools << "\n";
        out << "  triggers: " << triggers << "\n";
        out << "  task_types: " << types << "\n";
        for (auto const& d: skill->diagnostics)
            out << "  note: " << d << "\n";
    }
    return 0;
}

auto describe(HistoryEvent const& ev) -> std::string
{
    if (auto const* u = ev.as<UserMessage>())
        return oneLine(u->text);
    if (auto const* a = ev.as<AssistantMessage>())
    {
        auto text = a->text.empty() ? std::string("(no text)") : oneLine(a->text);
        if (a->toolCall)
            text += " -> " + a->toolCall->name;
        if (a->usage)
            text += " [usage input=" + std::to_string(a->usage->inputTokens) + " output="
                    + std::to_string(a->usage->outputTokens) + " total=" + std::to_string(a->usage->totalTokens) + "]";
        return text;
    }
    if (auto const* c = ev.as<ToolCallEvent>())
        return c->callId + " " + c->name + (c->validated ? " " : " (unvalidated) ") + oneLine(c->args.dump(), 120);
    if (auto const* r = ev.as<ToolResultEvent>())
        return r->callId + " " + r->name + (r->ok ? " ok " : " FAILED ") + oneLine(r->output.dump(), 120);
    if (auto const* g = ev.as<GuidanceInjection>())
        return "[" + g->skillId + "] " + oneLine(g->text);
    if (auto const* c = ev.as<CompletionEvent>())
        return oneLine(c->report);
    if (auto const* n = ev.as<SystemNote>())
        return oneLine(n->text);
    return {};
}

auto cmdTrace(std::string const& storeDir, std::string const& sessionId, std::ostream& out) -> int
{
    auto ec = std::error_code {};
    if (!fs::is_directory(storeDir, ec))
        throw Error(ErrorKind::NotFound, "store '" + storeDir + "' does not exist");
    auto store = SessionStore::open(storeDir);
    if (sessionId.empty())
    {
        for (auto const& id: store->sessionIds())
        {
            auto const s = store->snapshot(id);
            out << id << " parent=" << s.parentId.value_or("-") << " status=" << sessionStatusName(s.status) << " "
                << oneLine(s.taskText, 60) << "\n";
        }
        return 0;
    }
    if (!store->contains(sessionId))
        throw Error(ErrorKind::NotFound, "no session '" + sessionId + "' in store '" + storeDir + "'");

    auto const session = store->snapshot(sessionId);
    out << "session " << session.id << " parent=" << session.parentId.value_or("-")
        << " status=" << sessionStatusName(session.status) << "\n";
    auto phases = std::map<std::string, std::string> {};
    for (auto const& record: SessionStore::readLog(storeDir, sessionId))
    {
        if (record.event)
        {
            out << "#" << record.seq << " " << eventKindName(record.event->kind()) << " " << describe(*record.event)
                << "\n";
            continue;
        }
        if (!record.snapshotState.is_object() || !record.snapshotState.contains("phase"))
            continue;
        auto const phase = record.snapshotState["phase"].get<std::string>();
        auto& last = phases[record.snapshotSkillId];
        if (last.empty())
            out << "    " << record.snapshotSkillId << " phase " << phase << "\n";
        else if (last != phase)
            out << "    " << record.snapshotSkillId << " phase " << last << " -> " << phase << "\n";
        last = phase;
    }
    out << "usage " << usageText(session.usage) << "\n";
    return 0;
}

} // namespace

auto standardBindings() -> BindingTable
{
    auto table = BindingTable {};
    registerOrchestrationBindings(table);
    repair::registerRepairBindings(table);
    return table;
}

auto runCli(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) -> int
{
    auto app = CLI::App { "Event-driven agent runtime for formal skills", "skillrt" };
    app.require_subcommand(1);

    auto run = RunOptions {};
    auto* runCmd = app.add_subcommand("run", "Run a task to quiescence");
    runCmd->add_option("--skills", run.skillsDir, "Skill packages directory")->required();
    runCmd->add_option("--store", run.storeDir, "Session store directory")->required();
    runCmd->add_option("--workspace", run.workspace, "Workspace root")->required();
    runCmd->add_option("--task", run.task, "Task text")->required();
    runCmd->add_option("--task-type", run.taskType, "Task type tag")->required();
    runCmd->add_option("--done-when", run.doneWhen, "Completion criterion");
    auto* script = runCmd->add_option("--script", run.script, "Scripted model responses (JSON)");
    auto* http = runCmd->add_flag("--http", run.http, "Use the HTTP chat backend");
    script->excludes(http);
    runCmd->add_option("--config", run.config, "Runtime config overrides (JSON)");
    runCmd->add_flag("--route-root", run.routeRoot, "Route skills for the root session too");

    auto skillsDir = std::string {};
    auto* skillsCmd = app.add_subcommand("skills", "List skill packages");
    skillsCmd->add_option("--skills", skillsDir, "Skill packages directory")->required();

    auto storeDir = std::string {};
    auto sessionId = std::string {};
    auto* traceCmd = app.add_subcommand("trace", "Print a session history");
    traceCmd->add_option("--store", storeDir, "Session store directory")->required();
    traceCmd->add_option("--session", sessionId, "Session id (omit to list sessions)");

    auto argv = std::vector<std::string>(args.rbegin(), args.rend());
    try
    {
        app.parse(argv);
    }
    catch (CLI::CallForHelp const&)
    {
        out << app.help();
        return 0;
    }
    catch (CLI::ParseError const& e)
    {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try
    {
        if (runCmd->parsed())
        {
            if (run.script.empty() == !run.http)
            {
                err << "error: choose exactly one of --script FILE or --http\n";
                return 1;
            }
            return cmdRun(run, out);
        }
        if (skillsCmd->parsed())
            return cmdSkills(skillsDir, out);
        return cmdTrace(storeDir, sessionId, out);
    }
    catch (Error const& e)
    {
        err << "error: " << e.kindName() << ": " << e.what() << "\n";
        return 1;
    }
    catch (std::exception const& e)
    {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace skillrt
