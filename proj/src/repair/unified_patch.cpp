// SPDX-License-Identifier: Apache-2.0
#include <skillrt/error.hpp>
#include <skillrt/repair/unified_patch.hpp>

#include <algorithm>
#include <cstdlib>
#include <regex>

namespace skillrt::repair
{

namespace
{

[[noreturn]] void malformed(std::string const& msg)
{
    throw Error(ErrorKind::InvalidArgument, "malformed patch: " + msg);
}

auto stripPathDecoration(std::string_view raw) -> std::string
{
    auto path = std::string(raw.substr(0, raw.find('\t')));
    while (!path.empty() && (path.back() == ' ' || path.back() == '\r'))
        path.pop_back();
    if (path.starts_with("a/") || path.starts_with("b/"))
        path = path.substr(2);
    return path;
}

auto toCount(std::ssub_match const& m, std::size_t fallback) -> std::size_t
{
    return m.matched ? std::stoul(m.str()) : fallback;
}

} // namespace

auto Hunk::oldLines() const -> std::vector<std::string>
{
    auto out = std::vector<std::string> {};
    for (auto const& l: lines)
        if (l.op != '+')
            out.push_back(l.text);
    return out;
}

auto Hunk::newLines() const -> std::vector<std::string>
{
    auto out = std::vector<std::string> {};
    for (auto const& l: lines)
        if (l.op != '-')
            out.push_back(l.text);
    return out;
}

auto Hunk::firstInsertionPoint() const -> std::size_t
{
    auto pos = oldCount == 0 ? oldStart : oldStart - 1;
    for (auto const& l: lines)
    {
        if (l.op == '+')
            return pos;
        ++pos;
    }
    return pos;
}

auto ParsedPatch::addedLines() const -> std::size_t
{
    auto n = std::size_t { 0 };
    for (auto const& h: hunks)
        for (auto const& l: h.lines)
            n += l.op == '+' ? 1 : 0;
    return n;
}

auto ParsedPatch::removedLines() const -> std::size_t
{
    auto n = std::size_t { 0 };
    for (auto const& h: hunks)
        for (auto const& l: h.lines)
            n += l.op == '-' ? 1 : 0;
    return n;
}

auto hasHunkMarker(std::string_view text) -> bool
{
    if (text.starts_with("@@"))
        return true;
    return text.find("\n@@") != std::string_view::npos;
}

auto TextLines::split(std::string_view content) -> TextLines
{
    auto out = TextLines {};
    out.trailingNewline = content.empty() || content.back() == '\n';
    auto start = std::size_t { 0 };
    while (start < content.size())
    {
        auto const nl = content.find('\n', start);
        if (nl == std::string_view::npos)
        {
            out.lines.emplace_back(content.substr(start));
            break;
        }
        out.lines.emplace_back(content.substr(start, nl - start));
        start = nl + 1;
    }
    return out;
}

auto TextLines::join() const -> std::string
{
    auto out = std::string {};
    for (std::size_t i = 0; i < lines.size(); ++i)
    {
        out += lines[i];
        if (i + 1 < lines.size() || trailingNewline)
            out += '\n';
    }
    return out;
}

auto parseUnifiedPatch(std::string_view text) -> ParsedPatch
{
    if (!hasHunkMarker(text))
        throw Error(ErrorKind::InvalidArgument, "missing hunk marker '@@'");
    static auto const header = std::regex(R"(^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@.*$)");

    auto const raw = TextLines::split(text).lines;
    auto patch = ParsedPatch {};
    auto i = std::size_t { 0 };
    auto sawFileHeader = false;
    while (i < raw.size())
    {
        auto line = raw[i];
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.starts_with("--- "))
        {
            if (sawFileHeader && !patch.hunks.empty())
                malformed("more than one file section; submit one target per call");
            patch.oldPath = stripPathDecoration(std::string_view(line).substr(4));
            ++i;
            continue;
        }
        if (line.starts_with("+++ "))
        {
            patch.newPath = stripPathDecoration(std::string_view(line).substr(4));
            sawFileHeader = true;
            ++i;
            continue;
        }
        if (!line.starts_with("@@"))
        {
            if (patch.hunks.empty() || line.empty())
            {
                ++i; // preamble ("diff --git", "index ...") or blank separator
                continue;
            }
            malformed("unexpected line " + std::to_string(i + 1) + ": '" + line + "'");
        }

        auto m = std::smatch {};
        if (!std::regex_match(line, m, header))
            malformed("bad hunk header '" + line + "'");
        auto hunk = Hunk {};
        hunk.oldStart = std::stoul(m[1].str());
        hunk.oldCount = toCount(m[2], 1);
        hunk.newStart = std::stoul(m[3].str());
        hunk.newCount = toCount(m[4], 1);
        if (hunk.oldCount > 0 && hunk.oldStart == 0)
            malformed("hunk '" + line + "' starts at line 0");
        ++i;

        auto oldSeen = std::size_t { 0 };
        auto newSeen = std::size_t { 0 };
        while (i < raw.size() && (oldSeen < hunk.oldCount || newSeen < hunk.newCount))
        {
            auto body = raw[i];
            if (!body.empty() && body.back() == '\r')
                body.pop_back();
            if (body.starts_with("\\"))
            {
                if (hunk.lines.empty())
                    malformed("no-newline marker before any hunk line");
                auto const op = hunk.lines.back().op;
                hunk.oldNoNewline |= op != '+';
                hunk.newNoNewline |= op != '-';
                ++i;
                continue;
            }
            auto const op = body.empty() ? ' ' : body.front();
            if (op != ' ' && op != '-' && op != '+')
                break;
            hunk.lines.push_back({ op, body.empty() ? std::string {} : body.substr(1) });
            oldSeen += op != '+' ? 1 : 0;
            newSeen += op != '-' ? 1 : 0;
            ++i;
        }
        if (oldSeen != hunk.oldCount || newSeen != hunk.newCount)
            malformed("hunk '" + line + "' body has " + std::to_string(oldSeen) + " old / "
                      + std::to_string(newSeen) + " new lines");
        if (i < raw.size() && raw[i].starts_with("\\"))
        {
            auto const op = hunk.lines.empty() ? ' ' : hunk.lines.back().op;
            hunk.oldNoNewline |= op != '+';
            hunk.newNoNewline |= op != '-';
            ++i;
        }
        patch.hunks.push_back(std::move(hunk));
    }
    if (patch.hunks.empty())
        throw Error(ErrorKind::InvalidArgument, "missing hunk marker '@@'");
    return patch;
}

auto applyPatch(std::string_view content, ParsedPatch const& patch) -> std::string
{
    auto text = TextLines::split(content);
    auto& lines = text.lines;
    auto delta = std::ptrdiff_t { 0 };
    auto minPos = std::size_t { 0 };

    for (std::size_t h = 0; h < patch.hunks.size(); ++h)
    {
        auto const& hunk = patch.hunks[h];
        auto const oldLines = hunk.oldLines();
        auto const newLines = hunk.newLines();
        auto const mismatch = [&](std::string const& why) {
            return Error(ErrorKind::HunkMismatch, "hunk " + std::to_string(h + 1) + " (@@ -"
                                                      + std::to_string(hunk.oldStart) + ","
                                                      + std::to_string(hunk.oldCount) + " @@) " + why);
        };

        auto const base = static_cast<std::ptrdiff_t>(hunk.oldCount == 0 ? hunk.oldStart : hunk.oldStart - 1);
        auto const expected = std::max<std::ptrdiff_t>(0, base + delta);
        auto pos = std::optional<std::size_t> {};
        if (oldLines.empty())
        {
            if (static_cast<std::size_t>(expected) > lines.size() || static_cast<std::size_t>(expected) < minPos)
                throw mismatch("inserts past the end of the file");
            pos = static_cast<std::size_t>(expected);
        }
        else
        {
            auto bestDistance = std::size_t { 0 };
            for (auto p = minPos; p + oldLines.size() <= lines.size(); ++p)
            {
                if (!std::equal(oldLines.begin(), oldLines.end(), lines.begin() + static_cast<std::ptrdiff_t>(p)))
                    continue;
                auto const distance = static_cast<std::size_t>(
                    std::abs(static_cast<std::ptrdiff_t>(p) - expected));
                if (!pos || distance < bestDistance)
                {
                    pos = p;
                    bestDistance = distance;
                }
            }
            if (!pos)
                throw mismatch("context not found");
        }

        auto const end = *pos + oldLines.size();
        auto const touchesEnd = end == lines.size();
        if (hunk.oldNoNewline && (!touchesEnd || text.trailingNewline))
            throw mismatch("expects a missing final newline");
        lines.erase(lines.begin() + static_cast<std::ptrdiff_t>(*pos), lines.begin() + static_cast<std::ptrdiff_t>(end));
        lines.insert(lines.begin() + static_cast<std::ptrdiff_t>(*pos), newLines.begin(), newLines.end());
        if (touchesEnd)
            text.trailingNewline = !hunk.newNoNewline;
        delta += static_cast<std::ptrdiff_t>(newLines.size()) - static_cast<std::ptrdiff_t>(oldLines.size());
        delta += static_cast<std::ptrdiff_t>(*pos) - expected;
        minPos = *pos + newLines.size();
    }
    if (lines.empty())
        return {};
    return text.join();
}

auto isAppendOnly(ParsedPatch const& patch, std::string_view currentContent) -> bool
{
    if (currentContent.empty() || patch.removedLines() > 0 || patch.addedLines() == 0)
        return false;
    auto const lineCount = TextLines::split(currentContent).lines.size();
    for (auto const& h: patch.hunks)
        if (h.firstInsertionPoint() < lineCount)
            return false;
    return true;
}

} // namespace skillrt::repair
