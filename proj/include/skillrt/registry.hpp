// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <skillrt/bindings.hpp>
#include <skillrt/manifest.hpp>
#include <skillrt/param_schema.hpp>

#include <filesystem>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

namespace skillrt
{

using ManifestPtr = std::shared_ptr<SkillManifest const>;

/// Loaded Formal Skill packages, indexed by skill id and tool name.
///
/// Built at startup and read concurrently afterwards; loads take an
/// exclusive lock and replace a prior version atomically.
class SkillRegistry
{
  public:
    explicit SkillRegistry(BindingTable const& bindings);

    /// Reads, validates and registers one package directory.
    /// Throws Error(MalformedManifest | UnresolvedBinding | DuplicateSkill).
    auto loadSkillPackage(std::filesystem::path const& dir) -> ManifestPtr;

    /// Loads every immediate subdirectory containing a manifest.json, in
    /// lexical order.
    auto loadAll(std::filesystem::path const& skillsDir) -> std::vector<ManifestPtr>;

    /// Registers an already parsed manifest (bindings are resolved here).
    auto registerManifest(SkillManifest manifest) -> ManifestPtr;

    /// Lookup by skill id or by tool name. Throws Error(NotFound).
    [[nodiscard]] auto lookup(std::string const& skillIdOrTool) const -> ManifestPtr;
    [[nodiscard]] auto findSkill(std::string const& skillId) const -> ManifestPtr;
    [[nodiscard]] auto findToolOwner(std::string const& toolName) const -> ManifestPtr;

    /// Skills in registration order (a reload keeps the original slot).
    [[nodiscard]] auto skills() const -> std::vector<ManifestPtr>;

    /// Overlays policy keys onto a loaded skill (run-config overrides).
    void overridePolicy(std::string const& skillId, Json const& overrides);

    [[nodiscard]] auto bindings() const -> BindingTable const& { return _bindings; }

  private:
    void resolveBindings(SkillManifest const& m) const;

    BindingTable const& _bindings;
    mutable std::shared_mutex _mutex;
    std::vector<ManifestPtr> _skills;
};

/// Validates model-supplied arguments against a tool's parameter tree.
[[nodiscard]] auto validateActionArgs(ActionSchema const& schema, Json const& args) -> ValidationResult;

} // namespace skillrt
