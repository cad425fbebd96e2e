// SPDX-License-Identifier: Apache-2.0
#include "fixtures.hpp"

#include <catch_amalgamated.hpp>

#include <sstream>

using namespace skillrt;
using namespace skillrt::testing;
namespace fs = std::filesystem;

namespace
{

struct CliResult
{
    int code;
    std::string out;
    std::string err;
};

auto cli(std::vector<std::string> args) -> CliResult
{
    auto out = std::ostringstream {};
    auto err = std::ostringstream {};
    auto const code = runCli(args, out, err);
    return { code, out.str(), err.str() };
}

auto runE2E(fs::path const& base, std::vector<std::string> extra = {}) -> CliResult
{
    copyFixture("repair_workspace", base / "ws");
    auto args = std::vector<std::string> {
        "run",
        "--skills", skillsDir().string(),
        "--store", (base / "store").string(),
        "--workspace", (base / "ws").string(),
        "--task", "Repair the project so its tests pass",
        "--task-type", "general",
        "--script", (fixturesDir() / "scripts/repair_e2e.json").string(),
        "--config", (fixturesDir() / "repair_config.json").string(),
    };
    args.insert(args.end(), extra.begin(), extra.end());
    return cli(args);
}

auto replaceAll(std::string text, std::string const& from, std::string const& to) -> std::string
{
    for (auto pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size()))
        text.replace(pos, from.size(), to);
    return text;
}

} // namespace

TEST_CASE("run drives the scripted repair to completion")
{
    TempDir base;
    auto const r = runE2E(base.path());
    INFO(r.out << r.err);
    CHECK(r.code == 0);
    CHECK_THAT(r.out, Catch::Matchers::StartsWith("run quiescent after 7 step(s)"));
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("session s0001 parent=- status=completed"));
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("session s0002 parent=s0001 status=completed"));
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("code_repair_ops phases: reproduce -> patch -> verify -> report"));
    CHECK(fs::exists(base / "ws/app/out/report.md"));
    CHECK(fs::exists(base / "store/requests.jsonl"));
}

TEST_CASE("a short step budget exits with code 2")
{
    TempDir base;
    TempDir cfg;
    writeFile(cfg / "c.json", R"({"planner": {"max_steps": 3}, "workspace": {"command_allowlist": ["python3"]}})");
    TempDir base2;
    copyFixture("repair_workspace", base2 / "ws");
    auto const limited = cli({ "run", "--skills", skillsDir().string(), "--store", (base2 / "store").string(),
                               "--workspace", (base2 / "ws").string(), "--task", "Repair", "--task-type", "general",
                               "--script", (fixturesDir() / "scripts/repair_e2e.json").string(), "--config",
                               (cfg / "c.json").string() });
    CHECK(limited.code == 2);
    CHECK_THAT(limited.out, Catch::Matchers::StartsWith("run step budget exhausted after 3 step(s)"));
}

TEST_CASE("argument and input errors exit with code 1")
{
    TempDir base;
    CHECK(cli({}).code == 1);
    CHECK(cli({ "bogus" }).code == 1);
    CHECK(cli({ "skills" }).code == 1);
    auto const missing = cli({ "skills", "--skills", (base / "none").string() });
    CHECK(missing.code == 1);
    CHECK_FALSE(missing.err.empty());
    fs::create_directories(base / "ws");
    auto const noBackend = cli({ "run", "--skills", skillsDir().string(), "--store", (base / "s").string(), "--workspace",
                                 (base / "ws").string(), "--task", "t", "--task-type", "general" });
    CHECK(noBackend.code == 1);
    writeFile(base / "bad.json", R"({"planner": {"nonsense": 1}})");
    auto const badConfig = cli({ "run", "--skills", skillsDir().string(), "--store", (base / "s").string(), "--workspace",
                                 (base / "ws").string(), "--task", "t", "--task-type", "general", "--script",
                                 (fixturesDir() / "scripts/repair_e2e.json").string(), "--config",
                                 (base / "bad.json").string() });
    CHECK(badConfig.code == 1);
}

TEST_CASE("skills lists the bundled package")
{
    auto const r = cli({ "skills", "--skills", skillsDir().string() });
    CHECK(r.code == 0);
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("code_repair_ops"));
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("repair_apply_unified_patch"));
}

TEST_CASE("trace lists sessions and prints phase changes")
{
    TempDir base;
    REQUIRE(runE2E(base.path()).code == 0);
    auto const list = cli({ "trace", "--store", (base / "store").string() });
    CHECK(list.code == 0);
    CHECK_THAT(list.out, Catch::Matchers::ContainsSubstring("s0001"));
    CHECK_THAT(list.out, Catch::Matchers::ContainsSubstring("s0002"));

    auto const child = cli({ "trace", "--store", (base / "store").string(), "--session", "s0002" });
    CHECK(child.code == 0);
    CHECK_THAT(child.out, Catch::Matchers::StartsWith("session s0002 parent=s0001 status=completed\n#1 user_message"));
    CHECK_THAT(child.out, Catch::Matchers::ContainsSubstring("code_repair_ops phase reproduce -> patch"));
    CHECK_THAT(child.out, Catch::Matchers::ContainsSubstring("code_repair_ops phase verify -> report"));
    CHECK_THAT(child.out, Catch::Matchers::ContainsSubstring("usage"));

    CHECK(cli({ "trace", "--store", (base / "store").string(), "--session", "s0404" }).code == 1);
}

TEST_CASE("replaying a script gives identical session logs")
{
    TempDir a;
    TempDir b;
    REQUIRE(runE2E(a.path()).code == 0);
    REQUIRE(runE2E(b.path()).code == 0);
    for (auto const* id: { "s0001", "s0002" })
    {
        auto const left = replaceAll(readFile(a / ("store/sessions/" + std::string(id) + ".log")), a.path().string(), "@");
        auto const right = replaceAll(readFile(b / ("store/sessions/" + std::string(id) + ".log")), b.path().string(), "@");
        CHECK(left == right);
    }
    CHECK(treeChecksum(a / "ws") == treeChecksum(b / "ws"));
}
