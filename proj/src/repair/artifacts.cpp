// SPDX-License-Identifier: Apache-2.0
#include <skillrt/error.hpp>
#include <skillrt/repair/artifacts.hpp>
#include <skillrt/workspace.hpp>

#include <algorithm>
#include <cctype>
#include <regex>

namespace fs = std::filesystem;

namespace skillrt::repair
{

namespace
{

auto trimToken(std::string_view token) -> std::string_view
{
    while (!token.empty() && std::string_view("(\"'").find(token.front()) != std::string_view::npos)
        token.remove_prefix(1);
    while (!token.empty() && std::string_view(".,;:!?)\"'").find(token.back()) != std::string_view::npos)
        token.remove_suffix(1);
    return token;
}

auto looksLikeArtifact(std::string_view token, std::vector<std::string> const& extensions) -> bool
{
    if (token.empty())
        return false;
    if (token.find('/') != std::string_view::npos)
        return true;
    return std::any_of(extensions.begin(), extensions.end(), [&](auto const& ext) {
        return token.size() > ext.size() && token.ends_with(ext);
    });
}

auto tokenize(std::string_view text) -> std::vector<std::string_view>
{
    auto out = std::vector<std::string_view> {};
    auto i = std::size_t { 0 };
    while (i < text.size())
    {
        auto const c = text[i];
        if (c == '`')
        {
            auto const close = text.find('`', i + 1);
            if (close != std::string_view::npos)
            {
                out.push_back(text.substr(i + 1, close - i - 1));
                i = close + 1;
                continue;
            }
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c)))
        {
            ++i;
            continue;
        }
        auto const start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '`')
            ++i;
        out.push_back(text.substr(start, i - start));
    }
    return out;
}

} // namespace

auto inferRequiredArtifacts(std::string_view doneWhen, fs::path const& root, std::vector<std::string> const& extensions)
    -> std::vector<std::string>
{
    auto out = std::vector<std::string> {};
    for (auto raw: tokenize(doneWhen))
    {
        auto const token = trimToken(raw);
        if (!looksLikeArtifact(token, extensions) || token.find("://") != std::string_view::npos)
            continue;
        try
        {
            auto const scoped = resolveScoped(root, token);
            if (scoped.relative.empty() || scoped.relative == ".")
                continue;
            if (std::find(out.begin(), out.end(), scoped.relative) == out.end())
                out.push_back(scoped.relative);
        }
        catch (Error const&)
        {
        }
    }
    return out;
}

auto failureSignature(std::string_view output) -> std::optional<std::string>
{
    static auto const interesting = std::regex("error|fail|exception|assert|traceback", std::regex::icase);
    static auto const pathLike = std::regex(R"((?:[A-Za-z0-9_.\-~]*/)+([A-Za-z0-9_.\-]+))");
    static auto const digits = std::regex("[0-9]+");

    auto chosen = std::optional<std::string> {};
    auto firstNonEmpty = std::optional<std::string> {};
    auto start = std::size_t { 0 };
    while (start <= output.size())
    {
        auto end = output.find('\n', start);
        if (end == std::string_view::npos)
            end = output.size();
        auto line = std::string(output.substr(start, end - start));
        start = end + 1;
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
            line.pop_back();
        auto const first = line.find_first_not_of(" \t");
        if (first == std::string::npos)
            continue;
        line = line.substr(first);
        if (!firstNonEmpty)
            firstNonEmpty = line;
        if (std::regex_search(line, interesting))
        {
            chosen = line;
            break;
        }
    }
    if (!chosen)
        chosen = firstNonEmpty;
    if (!chosen)
        return std::nullopt;
    auto normalized = std::regex_replace(*chosen, pathLike, "$1");
    return std::regex_replace(normalized, digits, "#");
}

auto existingArtifacts(std::vector<std::string> const& paths, fs::path const& root) -> std::vector<std::string>
{
    auto out = std::vector<std::string> {};
    for (auto const& p: paths)
    {
        auto ec = std::error_code {};
        if (fs::is_regular_file(root / p, ec))
            out.push_back(p);
    }
    return out;
}

auto completionReasons(RepairState const& state, fs::path const& root) -> std::vector<std::string>
{
    auto out = std::vector<std::string> {};
    if (!state.verificationPassed)
        out.emplace_back("verification not passed");
    for (auto const& p: state.requiredArtifacts)
    {
        auto ec = std::error_code {};
        if (!fs::is_regular_file(root / p, ec))
            out.push_back("missing artifact " + p);
    }
    return out;
}

} // namespace skillrt::repair
