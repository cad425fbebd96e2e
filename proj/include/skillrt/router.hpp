// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <skillrt/bindings.hpp>
#include <skillrt/registry.hpp>

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace skillrt
{

struct RouterConfig
{
    double threshold = 0.5;
    double typeWeight = 0.6;
    double keywordWeight = 0.4;
};

struct RoutedEntry
{
    std::string skillId;
    double score = 0;

    auto operator==(RoutedEntry const&) const -> bool = default;
};

struct RoutedSkillSet
{
    /// Sorted by (score desc, skill_id asc); every score >= thresholdUsed.
    std::vector<RoutedEntry> entries;
    double thresholdUsed = 0.5;

    [[nodiscard]] auto skillIds() const -> std::vector<std::string>;

    auto operator==(RoutedSkillSet const&) const -> bool = default;
};

/// Lowercased word tokens (runs of letters, digits and '_').
[[nodiscard]] auto taskTokens(std::string_view text) -> std::set<std::string>;

/// True when the task violates one of the skill's declared hard requirements.
[[nodiscard]] auto violatesPolicy(SkillManifest const& manifest, DelegatedTask const& task) -> bool;

/// typeWeight * [task_type in task_types] + keywordWeight * |keywords ∩ tokens| / |keywords|,
/// forced to zero on a policy violation.
[[nodiscard]] auto scoreCandidate(SkillManifest const& manifest, DelegatedTask const& task,
                                  RouterConfig const& config = {}) -> double;

class SkillRouter
{
  public:
    SkillRouter(SkillRegistry const& registry, RouterConfig config = {});

    /// Every registered skill scoring at least the threshold, deterministic order.
    [[nodiscard]] auto route(DelegatedTask const& task) const -> RoutedSkillSet;
    [[nodiscard]] auto config() const -> RouterConfig const& { return _config; }

  private:
    SkillRegistry const& _registry;
    RouterConfig _config;
};

} // namespace skillrt
