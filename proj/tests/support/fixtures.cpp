// SPDX-License-Identifier: Apache-2.0
#include "fixtures.hpp"

#include <skillrt/error.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

#include <stdlib.h>

namespace fs = std::filesystem;

namespace skillrt::testing
{

TempDir::TempDir()
{
    auto pattern = (fs::temp_directory_path() / "skillrt-test-XXXXXX").string();
    if (!::mkdtemp(pattern.data()))
        throw std::runtime_error("mkdtemp failed");
    _path = fs::canonical(pattern);
}

TempDir::~TempDir()
{
    auto ec = std::error_code {};
    fs::remove_all(_path, ec);
}

auto skillsDir() -> fs::path
{
    return SKILLRT_SKILLS_DIR;
}

auto fixturesDir() -> fs::path
{
    return SKILLRT_FIXTURES_DIR;
}

void writeFile(fs::path const& path, std::string const& content)
{
    fs::create_directories(path.parent_path());
    auto out = std::ofstream(path, std::ios::binary | std::ios::trunc);
    out << content;
}

auto readFile(fs::path const& path) -> std::string
{
    auto in = std::ifstream(path, std::ios::binary);
    auto buffer = std::stringstream {};
    buffer << in.rdbuf();
    return buffer.str();
}

auto copyFixture(std::string const& name, fs::path const& dest) -> fs::path
{
    fs::create_directories(dest);
    fs::copy(fixturesDir() / name, dest, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
    return dest;
}

auto treeChecksum(fs::path const& root) -> std::uint64_t
{
    auto files = std::vector<fs::path> {};
    for (auto const& entry: fs::recursive_directory_iterator(root))
        if (entry.is_regular_file())
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    auto hash = std::uint64_t { 1469598103934665603ULL };
    auto const mix = [&](std::string const& bytes) {
        for (auto c: bytes)
        {
            hash ^= static_cast<unsigned char>(c);
            hash *= 1099511628211ULL;
        }
    };
    for (auto const& f: files)
    {
        mix(fs::relative(f, root).string());
        mix(readFile(f));
    }
    return hash;
}

void installSpies(BindingTable& table, std::vector<std::string> const& executorIds, std::shared_ptr<SpyCounts> spy)
{
    for (auto const& id: executorIds)
    {
        auto const* original = table.executor(id);
        if (!original)
            throw std::runtime_error("no executor " + id);
        auto inner = *original;
        table.addExecutor(id, [inner, spy, id](ToolInvocation const& inv, ExecContext const& ctx) {
            ++spy->calls[id];
            if (inv.args.contains("target"))
                spy->patchTargets.push_back(inv.args["target"]);
            return inner(inv, ctx);
        });
    }
}

Harness::Harness(std::vector<ScriptStep> script, Options options): bindings(standardBindings())
{
    installSpies(bindings, options.spyExecutors, spy);
    registry = std::make_unique<SkillRegistry>(bindings);
    registry->loadAll(skillsDir());
    if (!options.repairPolicy.empty())
        registry->overridePolicy("code_repair_ops", options.repairPolicy);
    if (options.storeDir)
        store = std::make_unique<SessionStore>(*options.storeDir, StoreOptions { false });
    else
        store = std::make_unique<SessionStore>();
    usage = options.storeDir ? std::make_unique<UsageLog>(*options.storeDir / "requests.jsonl")
                             : std::make_unique<UsageLog>();
    backend = std::make_unique<ScriptedBackend>(std::move(script));
    planner = std::make_unique<Planner>(*registry, *store, *backend, *usage, options.planner, options.workspace,
                                        options.router);
}

auto step(Json when, std::string text, std::optional<ToolCallRequest> call) -> ScriptStep
{
    auto respond = Json { { "text", std::move(text) } };
    if (call)
        respond["tool_call"] = { { "name", call->name }, { "arguments", call->arguments } };
    auto doc = Json { { "respond", respond } };
    if (!when.is_null() && !when.empty())
        doc["when"] = std::move(when);
    return parseScript(Json::array({ doc })).front();
}

auto call(std::string name, Json args) -> ToolCallRequest
{
    return ToolCallRequest { std::move(name), std::move(args) };
}

auto fixtureWorkspaceConfig() -> WorkspaceConfig
{
    auto ws = WorkspaceConfig {};
    ws.commandAllowlist = { "python3", "sh", "true", "false", "cat" };
    ws.commandTimeoutS = 20;
    return ws;
}

auto phaseHistory(SessionStore const& store, std::string const& sessionId) -> std::vector<std::string>
{
    auto const state = store.getSkillState(sessionId, "code_repair_ops");
    if (!state.is_object() || !state.contains("phase_history"))
        return { "reproduce" };
    return state["phase_history"].get<std::vector<std::string>>();
}

} // namespace skillrt::testing
