// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <skillrt/glob.hpp>
#include <skillrt/json.hpp>
#include <skillrt/param_schema.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace skillrt
{

enum class HookStage
{
    BeforeLlmCall,
    AfterLlmResponse,
    BeforeToolCall,
    AfterToolCall,
};

[[nodiscard]] auto hookStageName(HookStage stage) -> std::string_view;
[[nodiscard]] auto parseHookStage(std::string_view name) -> std::optional<HookStage>;

struct ActionSchema
{
    std::string name;
    std::string description;
    ParamSchema params;
    std::string executorId;

    /// Chat-completions style tool definition.
    [[nodiscard]] auto toToolJson() const -> Json;

    auto operator==(ActionSchema const&) const -> bool = default;
};

struct HookDeclaration
{
    HookStage stage = HookStage::BeforeLlmCall;
    std::string programId;
    int order = 0;

    auto operator==(HookDeclaration const&) const -> bool = default;
};

struct PolicyConfig
{
    std::vector<std::string> protectedPathGlobs { "tests/**" };
    std::vector<std::string> commandAllowlist;
    int maxPatchLines = 400;
    std::string artifactDir = "out";
    std::vector<std::string> artifactExtensions { ".md", ".txt", ".json", ".patch" };
    bool contextualDiagnosis = false;
    /// Hard routing exclusions; currently only "writable_workspace".
    std::vector<std::string> requirements;

    [[nodiscard]] auto compiledGlobs() const -> std::vector<Glob>;
    [[nodiscard]] auto toJson() const -> Json;

    /// Overlays recognised keys of `doc` onto this policy. Unknown keys are
    /// rejected unless `ignoreUnknown` is set.
    void apply(Json const& doc, std::string const& where, bool ignoreUnknown = false);
    void validate(std::string const& where) const;

    auto operator==(PolicyConfig const&) const -> bool = default;
};

[[nodiscard]] auto isPolicyKey(std::string_view key) -> bool;

/// A skill's machine-readable surface as loaded from its package.
struct SkillManifest
{
    std::string skillId;
    std::string version;
    std::string description;
    std::string toolNamespace; // empty -> skill_id
    std::set<std::string> taskTypes;
    std::set<std::string> triggerKeywords;
    std::vector<ActionSchema> tools;
    std::vector<HookDeclaration> hooks;
    PolicyConfig policy;
    std::map<std::string, Json> config;
    std::optional<std::string> completionGateId;

    std::filesystem::path packageDir;
    std::vector<std::string> diagnostics;
    /// Raw manifest + config documents, used for duplicate detection.
    Json source;

    [[nodiscard]] auto toolPrefix() const -> std::string;
    [[nodiscard]] auto tool(std::string_view name) const -> ActionSchema const*;
    /// Hooks for one stage, ordered by declaration order value.
    [[nodiscard]] auto hooksFor(HookStage stage) const -> std::vector<HookDeclaration>;

    /// Structural equality excluding load-time bookkeeping.
    [[nodiscard]] auto sameContent(SkillManifest const& other) const -> bool;
};

/// Parses and validates manifest + config documents (no binding
/// resolution). Throws Error(MalformedManifest).
[[nodiscard]] auto parseSkillManifest(Json const& manifest, Json const& config) -> SkillManifest;

/// Reads `<dir>/manifest.json` and `<dir>/config.json`; parse failures are
/// reported with the byte offset.
[[nodiscard]] auto readSkillPackage(std::filesystem::path const& dir) -> SkillManifest;

} // namespace skillrt
