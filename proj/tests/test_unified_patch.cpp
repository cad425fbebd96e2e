// SPDX-License-Identifier: Apache-2.0
#include <skillrt/error.hpp>
#include <skillrt/repair/unified_patch.hpp>

#include <catch_amalgamated.hpp>

#include <random>

using namespace skillrt;
using namespace skillrt::repair;

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

auto const calc = std::string("def add(a, b):\n    return a - b\n\n\ndef scale(x):\n    return 2 * x\n");

auto const calcFix = std::string(R"(--- a/calc.py
+++ b/calc.py
@@ -1,2 +1,2 @@
 def add(a, b):
-    return a - b
+    return a + b
)");

struct Op
{
    char kind; // ' ', '-', '+'
    std::string text;
};

/// Emits a unified diff for an edit script, grouping changes into hunks
/// with up to three lines of context.
auto renderDiff(std::vector<Op> const& ops) -> std::string
{
    auto changed = std::vector<std::size_t> {};
    for (std::size_t i = 0; i < ops.size(); ++i)
        if (ops[i].kind != ' ')
            changed.push_back(i);
    auto out = std::string("--- a/f.txt\n+++ b/f.txt\n");
    if (changed.empty())
        return out;

    auto ranges = std::vector<std::pair<std::size_t, std::size_t>> {};
    for (auto idx: changed)
    {
        auto const lo = idx >= 3 ? idx - 3 : 0;
        auto const hi = std::min(ops.size(), idx + 4);
        if (!ranges.empty() && lo <= ranges.back().second)
            ranges.back().second = std::max(ranges.back().second, hi);
        else
            ranges.push_back({ lo, hi });
    }

    auto oldLine = std::size_t { 1 };
    auto newLine = std::size_t { 1 };
    auto cursor = std::size_t { 0 };
    for (auto const& [lo, hi]: ranges)
    {
        for (; cursor < lo; ++cursor)
        {
            oldLine += ops[cursor].kind != '+';
            newLine += ops[cursor].kind != '-';
        }
        auto oldCount = std::size_t { 0 };
        auto newCount = std::size_t { 0 };
        auto body = std::string {};
        for (auto i = lo; i < hi; ++i)
        {
            oldCount += ops[i].kind != '+';
            newCount += ops[i].kind != '-';
            body += ops[i].kind + ops[i].text + "\n";
        }
        auto const oldStart = oldCount == 0 ? oldLine - 1 : oldLine;
        auto const newStart = newCount == 0 ? newLine - 1 : newLine;
        out += "@@ -" + std::to_string(oldStart) + "," + std::to_string(oldCount) + " +" + std::to_string(newStart) + ","
             + std::to_string(newCount) + " @@\n" + body;
        for (; cursor < hi; ++cursor)
        {
            oldLine += ops[cursor].kind != '+';
            newLine += ops[cursor].kind != '-';
        }
    }
    return out;
}

auto joinLines(std::vector<std::string> const& lines) -> std::string
{
    auto out = std::string {};
    for (auto const& l: lines)
        out += l + "\n";
    return out;
}

} // namespace

TEST_CASE("a simple fix parses and applies")
{
    auto const patch = parseUnifiedPatch(calcFix);
    CHECK(patch.oldPath == "calc.py");
    CHECK(patch.newPath == "calc.py");
    REQUIRE(patch.hunks.size() == 1);
    CHECK(patch.addedLines() == 1);
    CHECK(patch.removedLines() == 1);
    CHECK_FALSE(patch.isCreation());
    CHECK(applyPatch(calc, patch) == "def add(a, b):\n    return a + b\n\n\ndef scale(x):\n    return 2 * x\n");
}

TEST_CASE("parse errors")
{
    CHECK_FALSE(hasHunkMarker("--- a\n+++ b\n-x\n+y\n"));
    CHECK(hasHunkMarker("x\n@@ -1 +1 @@\n"));
    auto const message = [](std::string const& text) {
        try
        {
            (void) parseUnifiedPatch(text);
        }
        catch (Error const& e)
        {
            CHECK(e.kind() == ErrorKind::InvalidArgument);
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK_THAT(message("--- a\n+++ b\n-x\n+y\n"), Catch::Matchers::ContainsSubstring("missing hunk marker '@@'"));
    CHECK_THAT(message("@@ bogus @@\n-x\n"), Catch::Matchers::ContainsSubstring("malformed patch"));
    CHECK_THAT(message("@@ -1,2 +1,1 @@\n-x\n"), Catch::Matchers::ContainsSubstring("malformed patch"));
    CHECK_THAT(message(calcFix + "--- a/other.py\n+++ b/other.py\n@@ -1 +1 @@\n-a\n+b\n"),
               Catch::Matchers::ContainsSubstring("malformed patch"));
}

TEST_CASE("creation patches")
{
    auto const patch = parseUnifiedPatch("--- /dev/null\n+++ b/new.txt\n@@ -0,0 +1,2 @@\n+one\n+two\n");
    CHECK(patch.isCreation());
    CHECK(applyPatch("", patch) == "one\ntwo\n");
}

TEST_CASE("missing trailing newline markers")
{
    auto const patch = parseUnifiedPatch("@@ -1,2 +1,2 @@\n a\n-b\n\\ No newline at end of file\n+c\n\\ No newline at end of file\n");
    CHECK(patch.hunks[0].oldNoNewline);
    CHECK(patch.hunks[0].newNoNewline);
    CHECK(applyPatch("a\nb", patch) == "a\nc");

    auto const addNewline = parseUnifiedPatch("@@ -1 +1 @@\n-b\n\\ No newline at end of file\n+b\n");
    CHECK(applyPatch("b", addNewline) == "b\n");
}

TEST_CASE("hunks apply at an offset and the nearest match wins")
{
    auto const patch = parseUnifiedPatch("@@ -1,2 +1,2 @@\n ctx\n-old\n+new\n");
    CHECK(applyPatch("pre\npre\nctx\nold\n", patch) == "pre\npre\nctx\nnew\n");
    // Two candidates: offset +2 and +4 from the header; the nearer one is used.
    auto const at3 = parseUnifiedPatch("@@ -3,2 +3,2 @@\n ctx\n-old\n+new\n");
    CHECK(applyPatch("x\nctx\nold\ny\nz\nctx\nold\n", at3) == "x\nctx\nnew\ny\nz\nctx\nold\n");
    // Equal distance: the earlier one is used.
    auto const at4 = parseUnifiedPatch("@@ -4,2 +4,2 @@\n ctx\n-old\n+new\n");
    CHECK(applyPatch("x\nctx\nold\nm\nm\nctx\nold\n", at4) == "x\nctx\nnew\nm\nm\nctx\nold\n");
}

TEST_CASE("a failing hunk leaves nothing applied")
{
    auto const patch = parseUnifiedPatch("@@ -1 +1 @@\n-a\n+A\n@@ -3 +3 @@\n-zzz\n+Z\n");
    auto const content = std::string("a\nb\nc\n");
    auto thrown = std::string {};
    try
    {
        (void) applyPatch(content, patch);
    }
    catch (Error const& e)
    {
        CHECK(e.kind() == ErrorKind::HunkMismatch);
        thrown = e.what();
    }
    CHECK_THAT(thrown, Catch::Matchers::ContainsSubstring("2"));
    CHECK(content == "a\nb\nc\n");
}

TEST_CASE("append-only detection")
{
    auto const append = parseUnifiedPatch("@@ -2,0 +3,1 @@\n+tail\n");
    CHECK(isAppendOnly(append, "a\nb\n"));
    auto const appendWithContext = parseUnifiedPatch("@@ -2,1 +2,2 @@\n b\n+tail\n");
    CHECK(isAppendOnly(appendWithContext, "a\nb\n"));
    auto const middle = parseUnifiedPatch("@@ -1,1 +1,2 @@\n a\n+mid\n");
    CHECK_FALSE(isAppendOnly(middle, "a\nb\n"));
    CHECK_FALSE(isAppendOnly(parseUnifiedPatch(calcFix), calc));
    CHECK_FALSE(isAppendOnly(append, ""));
}

TEST_CASE("text line splitting round-trips")
{
    for (auto const* s: { "", "a", "a\n", "a\nb", "a\n\nb\n", "\n" })
        CHECK(TextLines::split(s).join() == s);
}

TEST_CASE("generated diffs apply to give the edited file")
{
    auto rng = std::mt19937(41);
    for (auto round = 0; round < 500; ++round)
    {
        auto original = std::vector<std::string> {};
        for (auto i = 0, n = 1 + static_cast<int>(rng() % 40); i < n; ++i)
            original.push_back("line" + std::to_string(i) + "_" + std::to_string(rng() % 1000));

        auto ops = std::vector<Op> {};
        auto edited = std::vector<std::string> {};
        for (auto const& line: original)
        {
            auto const r = rng() % 10;
            if (r == 0)
                ops.push_back({ '-', line });
            else if (r == 1)
            {
                ops.push_back({ '-', line });
                auto const repl = "new" + std::to_string(rng());
                ops.push_back({ '+', repl });
                edited.push_back(repl);
            }
            else if (r == 2)
            {
                auto const ins = "ins" + std::to_string(rng());
                ops.push_back({ '+', ins });
                edited.push_back(ins);
                ops.push_back({ ' ', line });
                edited.push_back(line);
            }
            else
            {
                ops.push_back({ ' ', line });
                edited.push_back(line);
            }
        }
        if (rng() % 4 == 0)
        {
            auto const tail = "tail" + std::to_string(rng());
            ops.push_back({ '+', tail });
            edited.push_back(tail);
        }
        auto const diff = renderDiff(ops);
        INFO(diff);
        if (!hasHunkMarker(diff))
            continue;
        auto const patch = parseUnifiedPatch(diff);
        REQUIRE(applyPatch(joinLines(original), patch) == joinLines(edited));

        // Shifting the whole file down keeps the result, at an offset.
        auto const shift = std::string("shift_a\nshift_b\n");
        REQUIRE(applyPatch(shift + joinLines(original), patch) == shift + joinLines(edited));

        auto added = std::size_t { 0 };
        auto removed = std::size_t { 0 };
        for (auto const& op: ops)
        {
            added += op.kind == '+';
            removed += op.kind == '-';
        }
        CHECK(patch.addedLines() == added);
        CHECK(patch.removedLines() == removed);
    }
}
