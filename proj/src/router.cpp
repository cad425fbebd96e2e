// SPDX-License-Identifier: Apache-2.0
#include <skillrt/router.hpp>

#include <algorithm>
#include <cctype>

#include <unistd.h>

namespace skillrt
{

auto RoutedSkillSet::skillIds() const -> std::vector<std::string>
{
    auto out = std::vector<std::string> {};
    for (auto const& e: entries)
        out.push_back(e.skillId);
    return out;
}

auto taskTokens(std::string_view text) -> std::set<std::string>
{
    auto out = std::set<std::string> {};
    auto current = std::string {};
    for (auto c: text)
    {
        auto const u = static_cast<unsigned char>(c);
        if (std::isalnum(u) || c == '_')
            current.push_back(static_cast<char>(std::tolower(u)));
        else if (!current.empty())
        {
            out.insert(std::move(current));
            current.clear();
        }
    }
    if (!current.empty())
        out.insert(std::move(current));
    return out;
}

auto violatesPolicy(SkillManifest const& manifest, DelegatedTask const& task) -> bool
{
    for (auto const& r: manifest.policy.requirements)
        if (r == "writable_workspace" && ::access(task.workspaceRoot.c_str(), W_OK) != 0)
            return true;
    return false;
}

auto scoreCandidate(SkillManifest const& manifest, DelegatedTask const& task, RouterConfig const& config) -> double
{
    if (violatesPolicy(manifest, task))
        return 0.0;
    auto const typeMatch = manifest.taskTypes.contains(task.taskType) ? 1.0 : 0.0;
    auto overlap = 0.0;
    if (!manifest.triggerKeywords.empty())
    {
        auto const tokens = taskTokens(task.taskText);
        auto hits = 0;
        for (auto const& k: manifest.triggerKeywords)
            hits += tokens.contains(k) ? 1 : 0;
        overlap = static_cast<double>(hits) / static_cast<double>(manifest.triggerKeywords.size());
    }
    return config.typeWeight * typeMatch + config.keywordWeight * overlap;
}

SkillRouter::SkillRouter(SkillRegistry const& registry, RouterConfig config): _registry(registry), _config(config)
{
}

auto SkillRouter::route(DelegatedTask const& task) const -> RoutedSkillSet
{
    auto out = RoutedSkillSet { {}, _config.threshold };
    for (auto const& skill: _registry.skills())
    {
        auto const score = scoreCandidate(*skill, task, _config);
        if (score >= _config.threshold && score > 0.0)
            out.entries.push_back({ skill->skillId, score });
    }
    std::sort(out.entries.begin(), out.entries.end(), [](auto const& a, auto const& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.skillId < b.skillId;
    });
    return out;
}

} // namespace skillrt
