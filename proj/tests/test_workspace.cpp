// SPDX-License-Identifier: Apache-2.0
#include "fixtures.hpp"

#include <skillrt/error.hpp>
#include <skillrt/workspace.hpp>

#include <catch_amalgamated.hpp>

#include <chrono>
#include <random>

using namespace skillrt;
using namespace skillrt::testing;
namespace fs = std::filesystem;

namespace
{

auto kindOf(auto&& fn) -> std::optional<ErrorKind>
{
    try
    {
        fn();
    }
    catch (Error const& e)
    {
        return e.kind();
    }
    return std::nullopt;
}

} // namespace

TEST_CASE("scoped paths resolve inside the root")
{
    TempDir ws;
    fs::create_directories(ws / "src");
    auto const p = resolveScoped(ws.path(), "src/main.py");
    CHECK(p.relative == "src/main.py");
    CHECK(p.resolved == ws / "src/main.py");
    CHECK(resolveScoped(ws.path(), "./src/./x").relative == "src/x");
    CHECK(resolveScoped(ws.path(), (ws / "src/y").string()).relative == "src/y");
}

TEST_CASE("escaping paths are rejected")
{
    TempDir ws;
    TempDir outside;
    fs::create_directories(ws / "a");
    for (auto const* raw: { "../x", "a/../../x", "/etc/passwd", "a/../..", ".." })
    {
        INFO(raw);
        CHECK(kindOf([&] { (void) resolveScoped(ws.path(), raw); }) == ErrorKind::PathEscape);
    }
    fs::create_symlink(outside.path(), ws / "link");
    CHECK(kindOf([&] { (void) resolveScoped(ws.path(), "link/file"); }) == ErrorKind::PathEscape);
    fs::create_symlink(ws / "a", ws / "inner");
    CHECK(resolveScoped(ws.path(), "inner/file").relative == "a/file");
}

TEST_CASE("random dot-dot paths never resolve outside the root")
{
    TempDir ws;
    fs::create_directories(ws / "a/b");
    auto rng = std::mt19937(8);
    auto const parts = std::vector<std::string> { "a", "b", "..", ".", "c" };
    for (auto round = 0; round < 2000; ++round)
    {
        auto raw = std::string {};
        for (auto i = 1 + rng() % 6; i > 0; --i)
            raw += (raw.empty() ? "" : "/") + parts[rng() % parts.size()];
        try
        {
            auto const p = resolveScoped(ws.path(), raw);
            CHECK(isWithinRoot(p.resolved, ws.path()));
            CHECK(raw.find("..") == std::string::npos);
        }
        catch (Error const& e)
        {
            CHECK(e.kind() == ErrorKind::PathEscape);
        }
    }
}

TEST_CASE("allowlist matches the executable name")
{
    CHECK(isCommandAllowed({ "python3", "x.py" }, { "python3" }));
    CHECK_FALSE(isCommandAllowed({ "/usr/bin/python3" }, { "python3" }));
    CHECK_FALSE(isCommandAllowed({ "python3" }, {}));
    CHECK_FALSE(isCommandAllowed({}, { "python3" }));
    CHECK_FALSE(isCommandAllowed({ "rm", "-rf" }, { "python3" }));
}

TEST_CASE("commands run in the workspace and capture output")
{
    TempDir ws;
    writeFile(ws / "hello.txt", "hi\n");
    auto const r = runCommand({ "cat", "hello.txt" }, ws.path(), { "cat" }, 10, 1024);
    CHECK(r.exitCode == 0);
    CHECK(r.stdoutText == "hi\n");
    CHECK_FALSE(r.truncated);

    auto const f = runCommand({ "sh", "-c", "echo err >&2; exit 3" }, ws.path(), { "sh" }, 10, 1024);
    CHECK(f.exitCode == 3);
    CHECK(f.stderrText == "err\n");
    CHECK(kindOf([&] { (void) runCommand({ "cat" }, ws.path(), {}, 10, 1024); }) == ErrorKind::CommandNotAllowed);
}

TEST_CASE("output is truncated to the configured size")
{
    TempDir ws;
    auto const r = runCommand({ "sh", "-c", "yes | head -c 100000" }, ws.path(), { "sh" }, 10, 64);
    CHECK(r.truncated);
    CHECK(r.stdoutText.size() <= 64);
}

TEST_CASE("a slow command times out and is killed")
{
    TempDir ws;
    auto const start = std::chrono::steady_clock::now();
    CHECK(kindOf([&] { (void) runCommand({ "sh", "-c", "sleep 30" }, ws.path(), { "sh" }, 1, 1024); })
          == ErrorKind::CommandTimeout);
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(10));
}
