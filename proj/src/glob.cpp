// SPDX-License-Identifier: Apache-2.0
#include <skillrt/error.hpp>
#include <skillrt/glob.hpp>

namespace skillrt
{

namespace
{

auto splitSegments(std::string_view path) -> std::vector<std::string_view>
{
    auto out = std::vector<std::string_view> {};
    size_t start = 0;
    while (start <= path.size())
    {
        auto const end = path.find('/', start);
        auto const piece = path.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        if (!piece.empty() && piece != ".")
            out.push_back(piece);
        if (end == std::string_view::npos)
            break;
        start = end + 1;
    }
    return out;
}

// Returns the index one past the closing bracket, or npos when unclosed.
auto classEnd(std::string_view pat, size_t open) -> size_t
{
    auto i = open + 1;
    if (i < pat.size() && (pat[i] == '!' || pat[i] == '^'))
        ++i;
    if (i < pat.size() && pat[i] == ']')
        ++i;
    while (i < pat.size() && pat[i] != ']')
    {
        if (pat[i] == '\\')
            ++i;
        ++i;
    }
    return i < pat.size() ? i + 1 : std::string_view::npos;
}

auto classMatches(std::string_view cls, char c) -> bool
{
    // cls excludes the surrounding brackets
    size_t i = 0;
    auto negate = false;
    if (i < cls.size() && (cls[i] == '!' || cls[i] == '^'))
    {
        negate = true;
        ++i;
    }
    auto hit = false;
    auto first = true;
    while (i < cls.size())
    {
        auto lo = cls[i];
        if (lo == '\\' && i + 1 < cls.size())
            lo = cls[++i];
        else if (lo == ']' && !first)
            break;
        first = false;
        if (i + 2 < cls.size() && cls[i + 1] == '-')
        {
            auto hi = cls[i + 2];
            if (lo <= c && c <= hi)
                hit = true;
            i += 3;
            continue;
        }
        if (lo == c)
            hit = true;
        ++i;
    }
    return hit != negate;
}

auto segmentMatches(std::string_view pat, std::string_view text) -> bool
{
    size_t p = 0;
    size_t t = 0;
    auto starP = std::string_view::npos;
    size_t starT = 0;
    while (t < text.size())
    {
        if (p < pat.size())
        {
            auto const c = pat[p];
            if (c == '*')
            {
                while (p < pat.size() && pat[p] == '*')
                    ++p;
                starP = p;
                starT = t;
                continue;
            }
            if (c == '?')
            {
                ++p;
                ++t;
                continue;
            }
            if (c == '[')
            {
                auto const end = classEnd(pat, p);
                if (classMatches(pat.substr(p + 1, end - p - 2), text[t]))
                {
                    p = end;
                    ++t;
                    continue;
                }
            }
            else
            {
                auto literal = c;
                auto step = size_t { 1 };
                if (c == '\\' && p + 1 < pat.size())
                {
                    literal = pat[p + 1];
                    step = 2;
                }
                if (literal == text[t])
                {
                    p += step;
                    ++t;
                    continue;
                }
            }
        }
        if (starP == std::string_view::npos)
            return false;
        p = starP;
        t = ++starT;
    }
    while (p < pat.size() && pat[p] == '*')
        ++p;
    return p == pat.size();
}

auto matchFrom(std::vector<std::string> const& pat, size_t pi, std::vector<std::string_view> const& segs, size_t si)
    -> bool
{
    if (pi == pat.size())
        return si == segs.size();
    if (pat[pi] == "**")
    {
        for (auto k = si; k <= segs.size(); ++k)
            if (matchFrom(pat, pi + 1, segs, k))
                return true;
        return false;
    }
    if (si == segs.size())
        return false;
    return segmentMatches(pat[pi], segs[si]) && matchFrom(pat, pi + 1, segs, si + 1);
}

} // namespace

Glob::Glob(std::string_view pattern): _pattern(pattern)
{
    if (pattern.empty())
        throw Error(ErrorKind::InvalidArgument, "empty glob pattern");
    for (size_t i = 0; i < pattern.size(); ++i)
    {
        if (pattern[i] == '\\')
        {
            if (i + 1 == pattern.size())
                throw Error(ErrorKind::InvalidArgument, "glob '" + _pattern + "' ends with a dangling escape");
            ++i;
        }
        else if (pattern[i] == '[')
        {
            auto const end = classEnd(pattern, i);
            if (end == std::string_view::npos)
                throw Error(ErrorKind::InvalidArgument, "glob '" + _pattern + "' has an unclosed '['");
            if (end - i <= 2)
                throw Error(ErrorKind::InvalidArgument, "glob '" + _pattern + "' has an empty character class");
            i = end - 1;
        }
    }
    for (auto seg: splitSegments(pattern))
        _segments.emplace_back(seg);
    if (_segments.empty())
        throw Error(ErrorKind::InvalidArgument, "glob '" + _pattern + "' has no path segments");
}

auto Glob::matches(std::string_view path) const -> bool
{
    return matchFrom(_segments, 0, splitSegments(path), 0);
}

auto anyGlobMatches(std::vector<Glob> const& globs, std::string_view path) -> bool
{
    for (auto const& g: globs)
        if (g.matches(path))
            return true;
    return false;
}

} // namespace skillrt
