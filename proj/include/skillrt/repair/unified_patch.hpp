// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace skillrt::repair
{

struct HunkLine
{
    char op = ' '; // ' ', '-' or '+'
    std::string text;

    auto operator==(HunkLine const&) const -> bool = default;
};

struct Hunk
{
    std::size_t oldStart = 0;
    std::size_t oldCount = 0;
    std::size_t newStart = 0;
    std::size_t newCount = 0;
    std::vector<HunkLine> lines;
    /// "\ No newline at end of file" seen after the last old / new line.
    bool oldNoNewline = false;
    bool newNoNewline = false;

    [[nodiscard]] auto oldLines() const -> std::vector<std::string>;
    [[nodiscard]] auto newLines() const -> std::vector<std::string>;
    /// Old-file index before which the first added line lands.
    [[nodiscard]] auto firstInsertionPoint() const -> std::size_t;
};

struct ParsedPatch
{
    std::optional<std::string> oldPath;
    std::optional<std::string> newPath;
    std::vector<Hunk> hunks;

    [[nodiscard]] auto isCreation() const -> bool { return oldPath && *oldPath == "/dev/null"; }
    [[nodiscard]] auto addedLines() const -> std::size_t;
    [[nodiscard]] auto removedLines() const -> std::size_t;
    [[nodiscard]] auto changedLines() const -> std::size_t { return addedLines() + removedLines(); }
};

/// True when the text contains a line starting with "@@".
[[nodiscard]] auto hasHunkMarker(std::string_view text) -> bool;

/// Parses a single-target unified diff. Throws Error(InvalidArgument) on a
/// missing or malformed hunk header, body/header count mismatch, or a
/// second file section.
[[nodiscard]] auto parseUnifiedPatch(std::string_view text) -> ParsedPatch;

/// Splits content into lines without terminators.
struct TextLines
{
    std::vector<std::string> lines;
    bool trailingNewline = true;

    [[nodiscard]] static auto split(std::string_view content) -> TextLines;
    [[nodiscard]] auto join() const -> std::string;
};

/// Applies every hunk with exact context, allowing a line offset (nearest
/// match wins, earlier on a tie). Throws Error(HunkMismatch) naming the
/// first hunk that does not apply; the input is never partially modified.
[[nodiscard]] auto applyPatch(std::string_view content, ParsedPatch const& patch) -> std::string;

/// An edit that only adds lines at the end of a non-empty existing file.
[[nodiscard]] auto isAppendOnly(ParsedPatch const& patch, std::string_view currentContent) -> bool;

} // namespace skillrt::repair
