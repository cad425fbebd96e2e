// SPDX-License-Identifier: Apache-2.0
#include <skillrt/error.hpp>
#include <skillrt/workspace.hpp>

namespace fs = std::filesystem;

namespace skillrt
{

auto isWithinRoot(fs::path const& path, fs::path const& root) -> bool
{
    auto const rel = path.lexically_normal().lexically_relative(root.lexically_normal());
    if (rel.empty())
        return false;
    if (rel == ".")
        return true;
    return !rel.is_absolute() && *rel.begin() != "..";
}

auto resolveScoped(fs::path const& root, std::string_view raw) -> ScopedPath
{
    if (raw.empty())
        throw Error(ErrorKind::PathEscape, "empty path");
    if (raw.find('\0') != std::string_view::npos)
        throw Error(ErrorKind::PathEscape, "path contains a NUL byte");

    auto const rawPath = fs::path(std::string(raw));
    for (auto const& part: rawPath)
        if (part == "..")
            throw Error(ErrorKind::PathEscape, "path '" + std::string(raw) + "' contains a '..' component");

    auto ec = std::error_code {};
    auto const canonicalRoot = fs::canonical(root, ec);
    if (ec)
        throw Error(ErrorKind::PathEscape, "workspace root '" + root.string() + "' does not exist");

    auto const lexical = (rawPath.is_absolute() ? rawPath : canonicalRoot / rawPath).lexically_normal();
    if (!isWithinRoot(lexical, canonicalRoot))
        throw Error(ErrorKind::PathEscape, "path '" + std::string(raw) + "' is outside the workspace");

    auto const physical = fs::weakly_canonical(lexical, ec);
    if (ec || !isWithinRoot(physical, canonicalRoot))
        throw Error(ErrorKind::PathEscape, "path '" + std::string(raw) + "' resolves outside the workspace");

    auto rel = physical.lexically_relative(canonicalRoot).generic_string();
    return ScopedPath { std::string(raw), physical, rel == "." ? std::string {} : rel };
}

auto CommandResult::toJson() const -> Json
{
    return Json {
        { "exit_code", exitCode }, { "stdout", stdoutText }, { "stderr", stderrText }, { "truncated", truncated },
    };
}

auto isCommandAllowed(std::vector<std::string> const& argv, std::vector<std::string> const& allowlist) -> bool
{
    if (argv.empty() || argv.front().empty())
        return false;
    for (auto const& allowed: allowlist)
        if (allowed == argv.front())
            return true;
    return false;
}

} // namespace skillrt
