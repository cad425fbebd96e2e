// SPDX-License-Identifier: Apache-2.0
#include <skillrt/error.hpp>
#include <skillrt/registry.hpp>

#include <algorithm>
#include <mutex>

namespace fs = std::filesystem;

namespace skillrt
{

auto BindingTable::executor(std::string const& id) const -> Executor const*
{
    auto it = _executors.find(id);
    return it == _executors.end() ? nullptr : &it->second;
}

auto BindingTable::hookProgram(std::string const& id) const -> HookProgram const*
{
    auto it = _hooks.find(id);
    return it == _hooks.end() ? nullptr : &it->second;
}

auto BindingTable::completionGate(std::string const& id) const -> CompletionGate const*
{
    auto it = _gates.find(id);
    return it == _gates.end() ? nullptr : &it->second;
}

auto effectiveAllowlist(WorkspaceConfig const& workspace, PolicyConfig const* policy) -> std::vector<std::string>
{
    auto out = workspace.commandAllowlist;
    if (policy)
        for (auto const& c: policy->commandAllowlist)
            if (std::find(out.begin(), out.end(), c) == out.end())
                out.push_back(c);
    return out;
}

SkillRegistry::SkillRegistry(BindingTable const& bindings): _bindings(bindings)
{
}

void SkillRegistry::resolveBindings(SkillManifest const& m) const
{
    for (auto const& t: m.tools)
        if (!_bindings.executor(t.executorId))
            throw Error(ErrorKind::UnresolvedBinding,
                        "skill '" + m.skillId + "' tool '" + t.name + "': unknown executor_id '" + t.executorId + "'");
    for (auto const& h: m.hooks)
        if (!_bindings.hookProgram(h.programId))
            throw Error(ErrorKind::UnresolvedBinding,
                        "skill '" + m.skillId + "': unknown hook program_id '" + h.programId + "'");
    if (m.completionGateId && !_bindings.completionGate(*m.completionGateId))
        throw Error(ErrorKind::UnresolvedBinding,
                    "skill '" + m.skillId + "': unknown completion_gate '" + *m.completionGateId + "'");
}

auto SkillRegistry::registerManifest(SkillManifest manifest) -> ManifestPtr
{
    resolveBindings(manifest);
    auto ptr = std::make_shared<SkillManifest const>(std::move(manifest));

    auto lock = std::unique_lock(_mutex);
    auto slot = _skills.end();
    for (auto it = _skills.begin(); it != _skills.end(); ++it)
    {
        auto const& existing = **it;
        if (existing.skillId == ptr->skillId)
        {
            if (existing.version == ptr->version)
            {
                if (!existing.sameContent(*ptr))
                    throw Error(ErrorKind::DuplicateSkill,
                                "skill '" + ptr->skillId + "' version " + ptr->version
                                    + " is already loaded with different content");
                return *it;
            }
            slot = it;
            continue;
        }
        for (auto const& t: ptr->tools)
            if (existing.tool(t.name))
                throw Error(ErrorKind::MalformedManifest,
                            "tool '" + t.name + "' is already provided by skill '" + existing.skillId + "'");
    }
    if (slot != _skills.end())
        *slot = ptr;
    else
        _skills.push_back(ptr);
    return ptr;
}

auto SkillRegistry::loadSkillPackage(fs::path const& dir) -> ManifestPtr
{
    return registerManifest(readSkillPackage(dir));
}

auto SkillRegistry::loadAll(fs::path const& skillsDir) -> std::vector<ManifestPtr>
{
    auto ec = std::error_code {};
    if (!fs::is_directory(skillsDir, ec))
        throw Error(ErrorKind::NotFound, "skills directory '" + skillsDir.string() + "' does not exist");
    auto dirs = std::vector<fs::path> {};
    for (auto const& entry: fs::directory_iterator(skillsDir))
        if (entry.is_directory() && fs::exists(entry.path() / "manifest.json"))
            dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
    auto out = std::vector<ManifestPtr> {};
    for (auto const& d: dirs)
        out.push_back(loadSkillPackage(d));
    return out;
}

auto SkillRegistry::findSkill(std::string const& skillId) const -> ManifestPtr
{
    auto lock = std::shared_lock(_mutex);
    for (auto const& s: _skills)
        if (s->skillId == skillId)
            return s;
    return nullptr;
}

auto SkillRegistry::findToolOwner(std::string const& toolName) const -> ManifestPtr
{
    auto lock = std::shared_lock(_mutex);
    for (auto const& s: _skills)
        if (toolName.starts_with(s->toolPrefix()) && s->tool(toolName))
            return s;
    return nullptr;
}

auto SkillRegistry::lookup(std::string const& skillIdOrTool) const -> ManifestPtr
{
    if (auto s = findSkill(skillIdOrTool))
        return s;
    if (auto s = findToolOwner(skillIdOrTool))
        return s;
    throw Error(ErrorKind::NotFound, "no skill or tool named '" + skillIdOrTool + "'");
}

auto SkillRegistry::skills() const -> std::vector<ManifestPtr>
{
    auto lock = std::shared_lock(_mutex);
    return _skills;
}

void SkillRegistry::overridePolicy(std::string const& skillId, Json const& overrides)
{
    auto lock = std::unique_lock(_mutex);
    for (auto& s: _skills)
    {
        if (s->skillId != skillId)
            continue;
        auto copy = *s;
        copy.policy.apply(overrides, "overrides/" + skillId);
        copy.policy.validate("overrides/" + skillId);
        s = std::make_shared<SkillManifest const>(std::move(copy));
        return;
    }
    throw Error(ErrorKind::NotFound, "cannot override policy of unknown skill '" + skillId + "'");
}

auto validateActionArgs(ActionSchema const& schema, Json const& args) -> ValidationResult
{
    return validateAgainst(schema.params, args);
}

} // namespace skillrt
