// SPDX-License-Identifier: Apache-2.0
#include <skillrt/error.hpp>
#include <skillrt/manifest.hpp>

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

namespace skillrt
{

auto hookStageName(HookStage stage) -> std::string_view
{
    switch (stage)
    {
        case HookStage::BeforeLlmCall: return "before_llm_call";
        case HookStage::AfterLlmResponse: return "after_llm_response";
        case HookStage::BeforeToolCall: return "before_tool_call";
        case HookStage::AfterToolCall: return "after_tool_call";
    }
    return "before_llm_call";
}

auto parseHookStage(std::string_view name) -> std::optional<HookStage>
{
    for (auto stage: { HookStage::BeforeLlmCall, HookStage::AfterLlmResponse, HookStage::BeforeToolCall,
                       HookStage::AfterToolCall })
        if (hookStageName(stage) == name)
            return stage;
    return std::nullopt;
}

auto ActionSchema::toToolJson() const -> Json
{
    return Json {
        { "type", "function" },
        { "function", { { "name", name }, { "description", description }, { "parameters", params.toJson() } } },
    };
}

namespace
{

void fail(std::string const& message)
{
    throw Error(ErrorKind::MalformedManifest, message);
}

void rejectUnknownKeys(Json const& doc, std::initializer_list<std::string_view> allowed, std::string const& where)
{
    for (auto const& [key, _]: doc.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            fail(where + ": unknown field '" + key + "'");
}

auto requireString(Json const& doc, char const* key, std::string const& where) -> std::string
{
    auto it = doc.find(key);
    if (it == doc.end())
        fail(where + ": missing '" + key + "'");
    if (!it->is_string())
        fail(where + "/" + key + ": expected a string");
    return it->get<std::string>();
}

auto stringList(Json const& value, std::string const& where) -> std::vector<std::string>
{
    if (!value.is_array())
        fail(where + ": expected an array of strings");
    auto out = std::vector<std::string> {};
    for (auto const& item: value)
    {
        if (!item.is_string())
            fail(where + ": expected an array of strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

auto lowered(std::string s) -> std::string
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

auto isSemver(std::string const& v) -> bool
{
    static auto const pattern =
        std::regex(R"(^(0|[1-9]\d*)\.(0|[1-9]\d*)\.(0|[1-9]\d*)(-[0-9A-Za-z.-]+)?(\+[0-9A-Za-z.-]+)?$)");
    return std::regex_match(v, pattern);
}

auto readJsonFile(std::filesystem::path const& path) -> Json
{
    auto in = std::ifstream(path, std::ios::binary);
    if (!in)
        fail("cannot read " + path.string());
    auto buffer = std::stringstream {};
    buffer << in.rdbuf();
    auto const text = buffer.str();
    try
    {
        return Json::parse(text);
    }
    catch (Json::parse_error const& e)
    {
        auto line = 1;
        auto column = 1;
        for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
        {
            if (text[i] == '\n')
            {
                ++line;
                column = 1;
            }
            else
                ++column;
        }
        fail(path.string() + ":" + std::to_string(line) + ":" + std::to_string(column) + " (byte "
             + std::to_string(e.byte) + "): " + e.what());
    }
    return {};
}

} // namespace

auto isPolicyKey(std::string_view key) -> bool
{
    static constexpr auto keys = std::array<std::string_view, 7> {
        "protected_path_globs", "command_allowlist",    "max_patch_lines", "artifact_dir",
        "artifact_extensions",  "contextual_diagnosis", "requires",
    };
    return std::find(keys.begin(), keys.end(), key) != keys.end();
}

auto PolicyConfig::compiledGlobs() const -> std::vector<Glob>
{
    auto out = std::vector<Glob> {};
    out.reserve(protectedPathGlobs.size());
    for (auto const& g: protectedPathGlobs)
        out.emplace_back(g);
    return out;
}

auto PolicyConfig::toJson() const -> Json
{
    return Json {
        { "protected_path_globs", protectedPathGlobs },
        { "command_allowlist", commandAllowlist },
        { "max_patch_lines", maxPatchLines },
        { "artifact_dir", artifactDir },
        { "artifact_extensions", artifactExtensions },
        { "contextual_diagnosis", contextualDiagnosis },
        { "requires", requirements },
    };
}

void PolicyConfig::apply(Json const& doc, std::string const& where, bool ignoreUnknown)
{
    if (!doc.is_object())
        fail(where + ": expected an object");
    for (auto const& [key, value]: doc.items())
    {
        auto const at = where + "/" + key;
        if (key == "protected_path_globs")
            protectedPathGlobs = stringList(value, at);
        else if (key == "command_allowlist")
            commandAllowlist = stringList(value, at);
        else if (key == "artifact_extensions")
            artifactExtensions = stringList(value, at);
        else if (key == "requires")
            requirements = stringList(value, at);
        else if (key == "max_patch_lines")
        {
            if (!value.is_number_integer())
                fail(at + ": expected an integer");
            maxPatchLines = value.get<int>();
        }
        else if (key == "artifact_dir")
        {
            if (!value.is_string())
                fail(at + ": expected a string");
            artifactDir = value.get<std::string>();
        }
        else if (key == "contextual_diagnosis")
        {
            if (!value.is_boolean())
                fail(at + ": expected a boolean");
            contextualDiagnosis = value.get<bool>();
        }
        else if (!ignoreUnknown)
            fail(where + ": unknown field '" + key + "'");
    }
}

void PolicyConfig::validate(std::string const& where) const
{
    if (maxPatchLines < 1)
        fail(where + "/max_patch_lines: must be >= 1");
    for (auto const& g: protectedPathGlobs)
    {
        try
        {
            (void) Glob(g);
        }
        catch (Error const& e)
        {
            fail(where + "/protected_path_globs: " + e.what());
        }
    }
    auto const artifactRoot = std::filesystem::path(artifactDir).lexically_normal();
    if (artifactDir.empty() || artifactRoot.is_absolute() || *artifactRoot.begin() == "..")
        fail(where + "/artifact_dir: must be a workspace-relative path");
    for (auto const& ext: artifactExtensions)
        if (ext.size() < 2 || ext.front() != '.')
            fail(where + "/artifact_extensions: '" + ext + "' must look like '.ext'");
    for (auto const& r: requirements)
        if (r != "writable_workspace")
            fail(where + "/requires: unknown constraint '" + r + "'");
}

auto SkillManifest::toolPrefix() const -> std::string
{
    return (toolNamespace.empty() ? skillId : toolNamespace) + "_";
}

auto SkillManifest::tool(std::string_view name) const -> ActionSchema const*
{
    for (auto const& t: tools)
        if (t.name == name)
            return &t;
    return nullptr;
}

auto SkillManifest::hooksFor(HookStage stage) const -> std::vector<HookDeclaration>
{
    auto out = std::vector<HookDeclaration> {};
    for (auto const& h: hooks)
        if (h.stage == stage)
            out.push_back(h);
    std::stable_sort(out.begin(), out.end(), [](auto const& a, auto const& b) { return a.order < b.order; });
    return out;
}

auto SkillManifest::sameContent(SkillManifest const& other) const -> bool
{
    return source == other.source;
}

auto parseSkillManifest(Json const& doc, Json const& configDoc) -> SkillManifest
{
    if (!doc.is_object())
        fail("manifest: expected a JSON object");
    rejectUnknownKeys(doc,
                      { "skill_id", "version", "description", "namespace", "task_types", "trigger_keywords", "tools",
                        "hooks", "policy" },
                      "manifest");

    auto m = SkillManifest {};
    m.skillId = requireString(doc, "skill_id", "manifest");
    if (m.skillId.empty())
        fail("manifest/skill_id: must not be empty");
    for (auto c: m.skillId)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
            fail("manifest/skill_id: invalid character in '" + m.skillId + "'");

    m.version = requireString(doc, "version", "manifest");
    if (!isSemver(m.version))
        fail("manifest/version: '" + m.version + "' is not a semver string");

    m.description = requireString(doc, "description", "manifest");
    if (m.description.size() > 200)
        fail("manifest/description: longer than 200 characters");

    if (doc.contains("namespace"))
    {
        m.toolNamespace = requireString(doc, "namespace", "manifest");
        if (m.toolNamespace.empty())
            fail("manifest/namespace: must not be empty");
    }

    if (auto it = doc.find("task_types"); it != doc.end())
        for (auto& t: stringList(*it, "manifest/task_types"))
            m.taskTypes.insert(std::move(t));
    if (auto it = doc.find("trigger_keywords"); it != doc.end())
        for (auto const& k: stringList(*it, "manifest/trigger_keywords"))
            m.triggerKeywords.insert(lowered(k));

    if (auto it = doc.find("tools"); it != doc.end())
    {
        if (!it->is_array())
            fail("manifest/tools: expected an array");
        for (size_t i = 0; i < it->size(); ++i)
        {
            auto const& t = (*it)[i];
            auto const where = "manifest/tools/" + std::to_string(i);
            if (!t.is_object())
                fail(where + ": expected an object");
            rejectUnknownKeys(t, { "name", "description", "params", "executor_id" }, where);
            auto schema = ActionSchema {};
            schema.name = requireString(t, "name", where);
            schema.description = requireString(t, "description", where);
            schema.executorId = requireString(t, "executor_id", where);
            if (!t.contains("params"))
                fail(where + ": missing 'params'");
            schema.params = ParamSchema::parse(t.at("params"), where + "/params");
            if (schema.params.type != ParamType::Object)
                fail(where + "/params: top-level parameters must be an object");
            if (!schema.name.starts_with(m.toolPrefix()) || schema.name.size() == m.toolPrefix().size())
                fail(where + "/name: '" + schema.name + "' must be prefixed with '" + m.toolPrefix() + "'");
            if (m.tool(schema.name))
                fail(where + "/name: duplicate tool '" + schema.name + "'");
            m.tools.push_back(std::move(schema));
        }
    }
    if (m.tools.empty())
        m.diagnostics.push_back("skill '" + m.skillId + "' declares no tools (hooks only)");

    if (auto it = doc.find("hooks"); it != doc.end())
    {
        if (!it->is_array())
            fail("manifest/hooks: expected an array");
        for (size_t i = 0; i < it->size(); ++i)
        {
            auto const& h = (*it)[i];
            auto const where = "manifest/hooks/" + std::to_string(i);
            if (!h.is_object())
                fail(where + ": expected an object");
            rejectUnknownKeys(h, { "stage", "program_id", "order" }, where);
            auto decl = HookDeclaration {};
            auto const stageName = requireString(h, "stage", where);
            auto stage = parseHookStage(stageName);
            if (!stage)
                fail(where + "/stage: unknown stage '" + stageName + "'");
            decl.stage = *stage;
            decl.programId = requireString(h, "program_id", where);
            if (!h.contains("order") || !h.at("order").is_number_integer())
                fail(where + "/order: expected an integer");
            decl.order = h.at("order").get<int>();
            for (auto const& prior: m.hooks)
                if (prior.stage == decl.stage && prior.order == decl.order)
                    fail(where + ": duplicate order " + std::to_string(decl.order) + " for stage "
                         + std::string(hookStageName(decl.stage)));
            m.hooks.push_back(std::move(decl));
        }
    }

    if (auto it = doc.find("policy"); it != doc.end())
        m.policy.apply(*it, "manifest/policy");

    if (!configDoc.is_object())
        fail("config: expected a JSON object");
    for (auto const& [key, value]: configDoc.items())
    {
        if (isPolicyKey(key))
            continue;
        if (key == "completion_gate")
        {
            if (!value.is_string())
                fail("config/completion_gate: expected a binding id string");
            m.completionGateId = value.get<std::string>();
            continue;
        }
        if (value.is_structured())
            fail("config/" + key + ": config values must be scalars");
        m.config[key] = value;
    }
    m.policy.apply(configDoc, "config", true);
    m.policy.validate("policy");

    m.source = Json { { "manifest", doc }, { "config", configDoc } };
    return m;
}

auto readSkillPackage(std::filesystem::path const& dir) -> SkillManifest
{
    auto ec = std::error_code {};
    if (!std::filesystem::is_directory(dir, ec))
        fail("skill package '" + dir.string() + "' is not a directory");
    auto const manifestPath = dir / "manifest.json";
    auto const configPath = dir / "config.json";
    if (!std::filesystem::is_regular_file(manifestPath, ec))
        fail("skill package '" + dir.string() + "' has no manifest.json");
    if (!std::filesystem::is_regular_file(configPath, ec))
        fail("skill package '" + dir.string() + "' has no config.json");
    auto m = parseSkillManifest(readJsonFile(manifestPath), readJsonFile(configPath));
    m.packageDir = std::filesystem::absolute(dir).lexically_normal();
    return m;
}

} // namespace skillrt
