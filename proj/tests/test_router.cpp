// SPDX-License-Identifier: Apache-2.0
#include "fixtures.hpp"

#include <skillrt/router.hpp>

#include <catch_amalgamated.hpp>

#include <random>

using namespace skillrt;
using namespace skillrt::testing;

namespace
{

auto manifest(std::string id, std::set<std::string> types, std::set<std::string> keywords,
              std::vector<std::string> requirements = {}) -> SkillManifest
{
    auto m = SkillManifest {};
    m.skillId = std::move(id);
    m.version = "1.0.0";
    m.taskTypes = std::move(types);
    m.triggerKeywords = std::move(keywords);
    m.policy.requirements = std::move(requirements);
    return m;
}

auto task(std::string text, std::string type, std::filesystem::path root) -> DelegatedTask
{
    return DelegatedTask { std::move(text), std::move(type), std::move(root), "" };
}

struct Row
{
    char const* label;
    SkillManifest skill;
    std::string text;
    std::string type;
    bool missingRoot;
    RouterConfig config;
    double expected;
    bool included;
};

} // namespace

TEST_CASE("routing score table")
{
    TempDir ws;
    auto const kw = std::set<std::string> { "bug", "fix", "failing", "test" };
    auto const repair = std::set<std::string> { "code_repair" };
    auto const rows = std::vector<Row> {
        { "type only", manifest("a", repair, kw), "hello world", "code_repair", false, {}, 0.6, true },
        { "type and all keywords", manifest("a", repair, kw), "fix the failing bug test", "code_repair", false, {}, 1.0, true },
        { "nothing matches", manifest("a", repair, kw), "hello", "docs", false, {}, 0.0, false },
        { "keywords only", manifest("a", repair, kw), "fix the failing bug test", "docs", false, {}, 0.4, false },
        { "type and one keyword", manifest("a", repair, kw), "please fix", "code_repair", false, {}, 0.7, true },
        { "three keywords no type", manifest("a", repair, kw), "fix failing test", "docs", false, {}, 0.3, false },
        { "type and half keywords", manifest("a", repair, kw), "bug; fix!", "code_repair", false, {}, 0.8, true },
        { "policy violation", manifest("a", repair, kw, { "writable_workspace" }), "fix bug", "code_repair", true, {}, 0.0, false },
        { "no keywords declared", manifest("a", repair, {}), "fix bug", "code_repair", false, {}, 0.6, true },
        { "no keywords no type", manifest("a", repair, {}), "fix bug", "docs", false, {}, 0.0, false },
        { "case folding", manifest("a", {}, kw), "FIX the BUG", "docs", false, {}, 0.2, false },
        { "score equal to threshold", manifest("a", repair, kw), "x", "code_repair", false, { 0.5, 0.5, 0.5 }, 0.5, true },
        { "unclamped weights", manifest("a", repair, kw), "fix failing bug test", "code_repair", false, { 0.5, 1.0, 1.0 }, 2.0, true },
    };
    for (auto const& row: rows)
    {
        INFO(row.label);
        auto const root = row.missingRoot ? ws / "absent" : ws.path();
        auto const t = task(row.text, row.type, root);
        CHECK(scoreCandidate(row.skill, t, row.config) == Catch::Approx(row.expected));

        auto bindings = BindingTable {};
        auto registry = SkillRegistry(bindings);
        registry.registerManifest(row.skill);
        auto const routed = SkillRouter(registry, row.config).route(t);
        CHECK(routed.thresholdUsed == row.config.threshold);
        CHECK(routed.entries.size() == (row.included ? 1u : 0u));
    }
}

TEST_CASE("policy requirement passes on a writable workspace")
{
    TempDir ws;
    auto const m = manifest("a", { "code_repair" }, {}, { "writable_workspace" });
    CHECK_FALSE(violatesPolicy(m, task("x", "code_repair", ws.path())));
    CHECK(violatesPolicy(m, task("x", "code_repair", ws / "nope")));
}

TEST_CASE("ties are ordered by skill id")
{
    TempDir ws;
    auto bindings = BindingTable {};
    auto registry = SkillRegistry(bindings);
    for (auto id: { "zeta", "alpha", "mid" })
        registry.registerManifest(manifest(id, { "t" }, { "go" }));
    registry.registerManifest(manifest("best", { "t" }, { "go" }));
    auto const routed = SkillRouter(registry).route(task("go", "t", ws.path()));
    CHECK(routed.skillIds() == std::vector<std::string> { "alpha", "best", "mid", "zeta" });
}

TEST_CASE("tokenizer splits on punctuation and keeps underscores")
{
    CHECK(taskTokens("Fix test_calc.py, NOW") == std::set<std::string> { "fix", "test_calc", "py", "now" });
    CHECK(taskTokens("").empty());
}

namespace
{

auto randomSkill(std::mt19937& rng, int index) -> SkillManifest
{
    static auto const vocab = std::vector<std::string> { "bug", "fix", "test", "doc", "build", "lint", "perf" };
    static auto const types = std::vector<std::string> { "code_repair", "docs", "build" };
    auto kws = std::set<std::string> {};
    for (auto i = rng() % 4; i > 0; --i)
        kws.insert(vocab[rng() % vocab.size()]);
    auto ts = std::set<std::string> {};
    if (rng() % 2 == 0)
        ts.insert(types[rng() % types.size()]);
    return manifest("skill" + std::to_string(index) + "_" + std::to_string(rng() % 100), ts, kws);
}

auto randomText(std::mt19937& rng) -> std::string
{
    static auto const vocab = std::vector<std::string> { "bug", "fix", "test", "doc", "build", "lint", "perf", "the", "a" };
    auto out = std::string {};
    for (auto i = rng() % 6; i > 0; --i)
        out += vocab[rng() % vocab.size()] + " ";
    return out;
}

} // namespace

TEST_CASE("routing matches an independent filter-and-sort oracle")
{
    TempDir ws;
    auto rng = std::mt19937(17);
    auto const types = std::vector<std::string> { "code_repair", "docs", "build" };
    for (auto round = 0; round < 300; ++round)
    {
        auto skills = std::vector<SkillManifest> {};
        for (auto i = 0, n = 1 + static_cast<int>(rng() % 6); i < n; ++i)
            skills.push_back(randomSkill(rng, i));
        auto const t = task(randomText(rng), types[rng() % types.size()], ws.path());

        auto oracle = std::vector<RoutedEntry> {};
        for (auto const& s: skills)
        {
            auto const typeHit = s.taskTypes.contains(t.taskType) ? 1.0 : 0.0;
            auto hits = 0.0;
            auto const tokens = taskTokens(t.taskText);
            for (auto const& k: s.triggerKeywords)
                hits += tokens.contains(k) ? 1 : 0;
            auto const score = 0.6 * typeHit + 0.4 * (s.triggerKeywords.empty() ? 0.0 : hits / s.triggerKeywords.size());
            if (score >= 0.5)
                oracle.push_back({ s.skillId, score });
        }
        std::ranges::sort(oracle, [](auto const& a, auto const& b) {
            return a.score != b.score ? a.score > b.score : a.skillId < b.skillId;
        });

        auto bindings = BindingTable {};
        auto registry = SkillRegistry(bindings);
        for (auto const& s: skills)
            registry.registerManifest(s);
        auto const routed = SkillRouter(registry).route(t);
        REQUIRE(routed.entries.size() == oracle.size());
        for (std::size_t i = 0; i < oracle.size(); ++i)
        {
            CHECK(routed.entries[i].skillId == oracle[i].skillId);
            CHECK(routed.entries[i].score == Catch::Approx(oracle[i].score));
        }

        // Registration order never changes the result.
        auto shuffled = skills;
        std::ranges::shuffle(shuffled, rng);
        auto registry2 = SkillRegistry(bindings);
        for (auto const& s: shuffled)
            registry2.registerManifest(s);
        CHECK(SkillRouter(registry2).route(t) == routed);

        // Dropping a non-leading skill keeps the leader.
        if (routed.entries.size() >= 2)
        {
            auto registry3 = SkillRegistry(bindings);
            for (auto const& s: skills)
                if (s.skillId != routed.entries.back().skillId)
                    registry3.registerManifest(s);
            CHECK(SkillRouter(registry3).route(t).entries.front() == routed.entries.front());
        }
    }
}

TEST_CASE("adding a trigger keyword to the task never lowers a score")
{
    TempDir ws;
    auto rng = std::mt19937(23);
    for (auto round = 0; round < 500; ++round)
    {
        auto const s = randomSkill(rng, 0);
        auto const text = randomText(rng);
        auto const before = scoreCandidate(s, task(text, "code_repair", ws.path()));
        for (auto const& k: s.triggerKeywords)
            CHECK(scoreCandidate(s, task(text + " " + k, "code_repair", ws.path())) >= before);
    }
}
