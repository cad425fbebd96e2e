// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace skillrt
{

/// Compiled path glob over '/'-separated relative paths.
///
/// `*` and `?` never cross a separator, `[...]` is a character class (`!` or `^`
/// negates), `\` escapes the next character, and a segment consisting only of
/// `**` matches zero or more whole segments.
class Glob
{
  public:
    /// Throws Error(InvalidArgument) when the pattern does not parse.
    explicit Glob(std::string_view pattern);

    [[nodiscard]] auto matches(std::string_view path) const -> bool;
    [[nodiscard]] auto pattern() const -> std::string const& { return _pattern; }

  private:
    std::string _pattern;
    std::vector<std::string> _segments;
};

[[nodiscard]] auto anyGlobMatches(std::vector<Glob> const& globs, std::string_view path) -> bool;

} // namespace skillrt
