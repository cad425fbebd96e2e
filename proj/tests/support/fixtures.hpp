// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <skillrt/cli.hpp>
#include <skillrt/planner.hpp>
#include <skillrt/registry.hpp>
#include <skillrt/scripted_backend.hpp>
#include <skillrt/session_store.hpp>
#include <skillrt/usage_log.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace skillrt::testing
{

class TempDir
{
  public:
    TempDir();
    ~TempDir();
    TempDir(TempDir const&) = delete;
    auto operator=(TempDir const&) -> TempDir& = delete;

    [[nodiscard]] auto path() const -> std::filesystem::path const& { return _path; }
    [[nodiscard]] auto operator/(std::string const& rel) const -> std::filesystem::path { return _path / rel; }

  private:
    std::filesystem::path _path;
};

[[nodiscard]] auto skillsDir() -> std::filesystem::path;
[[nodiscard]] auto fixturesDir() -> std::filesystem::path;

void writeFile(std::filesystem::path const& path, std::string const& content);
[[nodiscard]] auto readFile(std::filesystem::path const& path) -> std::string;

/// Copies tests/fixtures/<name> to `dest` (created) and returns `dest`.
auto copyFixture(std::string const& name, std::filesystem::path const& dest) -> std::filesystem::path;

/// FNV-1a over every regular file's relative path and bytes, sorted by path.
[[nodiscard]] auto treeChecksum(std::filesystem::path const& root) -> std::uint64_t;

/// Counts executor invocations by executor id.
struct SpyCounts
{
    std::map<std::string, int> calls;
    std::vector<Json> patchTargets;
};

/// Replaces each listed executor with a counting wrapper around the original.
void installSpies(BindingTable& table, std::vector<std::string> const& executorIds, std::shared_ptr<SpyCounts> spy);

/// A full in-process runtime around a scripted backend.
struct Harness
{
    struct Options
    {
        std::optional<std::filesystem::path> storeDir;
        PlannerConfig planner {};
        WorkspaceConfig workspace {};
        RouterConfig router {};
        std::vector<std::string> spyExecutors;
        Json repairPolicy = Json::object();
    };

    Harness(std::vector<ScriptStep> script, Options options);

    BindingTable bindings;
    std::shared_ptr<SpyCounts> spy = std::make_shared<SpyCounts>();
    std::unique_ptr<SkillRegistry> registry;
    std::unique_ptr<SessionStore> store;
    std::unique_ptr<UsageLog> usage;
    std::unique_ptr<ScriptedBackend> backend;
    std::unique_ptr<Planner> planner;
};

[[nodiscard]] auto step(Json when, std::string text, std::optional<ToolCallRequest> call = std::nullopt) -> ScriptStep;
[[nodiscard]] auto call(std::string name, Json args) -> ToolCallRequest;

/// Workspace allowlisting python3, sh and true/false for fixture commands.
[[nodiscard]] auto fixtureWorkspaceConfig() -> WorkspaceConfig;

/// Repair phase values observed in a session's skill state history.
[[nodiscard]] auto phaseHistory(SessionStore const& store, std::string const& sessionId) -> std::vector<std::string>;

} // namespace skillrt::testing
