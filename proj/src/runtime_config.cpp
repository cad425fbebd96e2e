// SPDX-License-Identifier: Apache-2.0
#include <skillrt/error.hpp>
#include <skillrt/runtime_config.hpp>

#include <fstream>
#include <set>

namespace skillrt
{

namespace
{

[[noreturn]] void bad(std::string const& msg)
{
    throw Error(ErrorKind::InvalidArgument, "config: " + msg);
}

void onlyKeys(Json const& doc, std::string const& where, std::set<std::string> const& allowed)
{
    if (!doc.is_object())
        bad(where + " must be an object");
    for (auto const& [key, value]: doc.items())
        if (!allowed.contains(key))
            bad("unknown key '" + where + "." + key + "'");
}

template <typename T>
void read(Json const& doc, char const* key, std::string const& where, T& out)
{
    auto it = doc.find(key);
    if (it == doc.end())
        return;
    try
    {
        out = it->get<T>();
    }
    catch (Json::exception const&)
    {
        bad(where + "." + key + " has the wrong type");
    }
}

void readNumber(Json const& doc, char const* key, std::string const& where, double& out)
{
    if (auto it = doc.find(key); it != doc.end())
    {
        if (!it->is_number())
            bad(where + "." + key + " must be a number");
        out = it->get<double>();
    }
}

} // namespace

auto RuntimeConfig::fromJson(Json const& doc) -> RuntimeConfig
{
    auto cfg = RuntimeConfig {};
    onlyKeys(doc, "config", { "router", "planner", "workspace", "skill_policy" });
    if (auto it = doc.find("router"); it != doc.end())
    {
        onlyKeys(*it, "router", { "threshold", "w_type", "w_keyword" });
        readNumber(*it, "threshold", "router", cfg.router.threshold);
        readNumber(*it, "w_type", "router", cfg.router.typeWeight);
        readNumber(*it, "w_keyword", "router", cfg.router.keywordWeight);
        if (cfg.router.typeWeight < 0 || cfg.router.keywordWeight < 0)
            bad("router weights must be non-negative");
    }
    if (auto it = doc.find("planner"); it != doc.end())
    {
        onlyKeys(*it, "planner", { "max_steps", "backend_retries", "single_worker", "workers", "apply_tool_filters" });
        read(*it, "max_steps", "planner", cfg.planner.maxSteps);
        read(*it, "backend_retries", "planner", cfg.planner.backendRetries);
        read(*it, "single_worker", "planner", cfg.planner.singleWorker);
        read(*it, "workers", "planner", cfg.planner.workers);
        read(*it, "apply_tool_filters", "planner", cfg.planner.applyToolFilters);
        if (cfg.planner.maxSteps < 0 || cfg.planner.backendRetries < 1 || cfg.planner.workers < 1)
            bad("planner values out of range");
    }
    if (auto it = doc.find("workspace"); it != doc.end())
    {
        onlyKeys(*it, "workspace", { "command_allowlist", "command_timeout_s", "output_truncate_bytes" });
        read(*it, "command_allowlist", "workspace", cfg.workspace.commandAllowlist);
        read(*it, "command_timeout_s", "workspace", cfg.workspace.commandTimeoutS);
        read(*it, "output_truncate_bytes", "workspace", cfg.workspace.outputTruncateBytes);
        if (cfg.workspace.commandTimeoutS < 1)
            bad("workspace.command_timeout_s must be positive");
    }
    if (auto it = doc.find("skill_policy"); it != doc.end())
    {
        if (!it->is_object())
            bad("skill_policy must be an object");
        for (auto const& [skill, policy]: it->items())
        {
            if (!policy.is_object())
                bad("skill_policy." + skill + " must be an object");
            cfg.skillPolicy[skill] = policy;
        }
    }
    return cfg;
}

auto RuntimeConfig::load(std::filesystem::path const& path) -> RuntimeConfig
{
    auto in = std::ifstream(path);
    if (!in)
        throw Error(ErrorKind::NotFound, "config file '" + path.string() + "' not found");
    auto doc = Json {};
    try
    {
        doc = Json::parse(in);
    }
    catch (Json::parse_error const& e)
    {
        bad(path.string() + ": " + e.what());
    }
    return fromJson(doc);
}

auto RuntimeConfig::toJson() const -> Json
{
    auto policies = Json::object();
    for (auto const& [k, v]: skillPolicy)
        policies[k] = v;
    return {
        { "router", { { "threshold", router.threshold }, { "w_type", router.typeWeight }, { "w_keyword", router.keywordWeight } } },
        { "planner",
          { { "max_steps", planner.maxSteps },
            { "backend_retries", planner.backendRetries },
            { "single_worker", planner.singleWorker },
            { "workers", planner.workers },
            { "apply_tool_filters", planner.applyToolFilters } } },
        { "workspace",
          { { "command_allowlist", workspace.commandAllowlist },
            { "command_timeout_s", workspace.commandTimeoutS },
            { "output_truncate_bytes", workspace.outputTruncateBytes } } },
        { "skill_policy", policies },
    };
}

} // namespace skillrt
