// SPDX-License-Identifier: Apache-2.0
#include <skillrt/error.hpp>
#include <skillrt/orchestration.hpp>

#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace skillrt
{

namespace
{

auto makeTool(std::string name, std::string description, Json params) -> ActionSchema
{
    auto executorId = "orchestration." + name;
    return ActionSchema { std::move(name), std::move(description), ParamSchema::parse(params),
                          std::move(executorId) };
}

auto buildTools() -> std::vector<ActionSchema>
{
    auto const str = Json { { "type", "string" } };
    auto out = std::vector<ActionSchema> {};
    out.push_back(makeTool("fs_read", "Read a file inside the workspace.",
                           { { "type", "object" },
                             { "properties", { { "path", str } } },
                             { "required", { "path" } } }));
    out.push_back(makeTool("fs_write", "Write a file inside the workspace, creating parent directories.",
                           { { "type", "object" },
                             { "properties", { { "path", str }, { "content", str } } },
                             { "required", { "path", "content" } } }));
    out.push_back(makeTool("run_command", "Run an allowlisted command in the workspace root.",
                           { { "type", "object" },
                             { "properties",
                               { { "argv", { { "type", "array" }, { "items", str }, { "minItems", 1 } } } } },
                             { "required", { "argv" } } }));
    out.push_back(makeTool(
        "delegate_subtask", "Hand a sub-task to a child session scoped to a subdirectory of this workspace.",
        { { "type", "object" },
          { "properties",
            { { "task_text", str },
              { "task_type", str },
              { "subdir", { { "type", "string" }, { "default", "." } } },
              { "done_when", { { "type", "string" }, { "default", "" } } } } },
          { "required", { "task_text", "task_type" } } }));
    out.push_back(makeTool("finish", "Declare the task complete with a final report.",
                           { { "type", "object" },
                             { "properties", { { "report_text", str } } },
                             { "required", { "report_text" } } }));
    return out;
}

auto failure(std::string kind, std::string message) -> ToolOutcome
{
    return ToolOutcome::failure({ { "error", std::move(kind) }, { "message", std::move(message) } });
}

auto fsRead(ToolInvocation const& inv, ExecContext const& ctx) -> ToolOutcome
{
    auto const path = resolveScoped(ctx.session.workspaceRoot, inv.args.at("path").get<std::string>());
    auto in = std::ifstream(path.resolved, std::ios::binary);
    if (!in || fs::is_directory(path.resolved))
        return failure("NotFound", "cannot read '" + path.relative + "'");
    auto buffer = std::stringstream {};
    buffer << in.rdbuf();
    auto content = buffer.str();
    auto const truncated = content.size() > ctx.workspace.outputTruncateBytes;
    if (truncated)
        content.resize(ctx.workspace.outputTruncateBytes);
    return ToolOutcome::success({ { "path", path.relative }, { "content", content }, { "truncated", truncated } });
}

auto fsWrite(ToolInvocation const& inv, ExecContext const& ctx) -> ToolOutcome
{
    auto const path = resolveScoped(ctx.session.workspaceRoot, inv.args.at("path").get<std::string>());
    auto const content = inv.args.at("content").get<std::string>();
    auto ec = std::error_code {};
    fs::create_directories(path.resolved.parent_path(), ec);
    auto out = std::ofstream(path.resolved, std::ios::binary | std::ios::trunc);
    if (!out)
        return failure("Io", "cannot write '" + path.relative + "'");
    out << content;
    out.close();
    if (!out)
        return failure("Io", "short write to '" + path.relative + "'");
    return ToolOutcome::success({ { "path", path.relative }, { "bytes", content.size() } });
}

auto runCommandTool(ToolInvocation const& inv, ExecContext const& ctx) -> ToolOutcome
{
    auto const argv = inv.args.at("argv").get<std::vector<std::string>>();
    auto const result = runCommand(argv, ctx.session.workspaceRoot, ctx.workspace.commandAllowlist,
                                   ctx.workspace.commandTimeoutS, ctx.workspace.outputTruncateBytes);
    return ToolOutcome::success(result.toJson());
}

auto delegateSubtask(ToolInvocation const& inv, ExecContext const& ctx) -> ToolOutcome
{
    if (!ctx.services)
        return failure("InvalidArgument", "delegation is not available here");
    auto const subdir = resolveScoped(ctx.session.workspaceRoot, inv.args.at("subdir").get<std::string>());
    auto ec = std::error_code {};
    fs::create_directories(subdir.resolved, ec);
    auto task = DelegatedTask { inv.args.at("task_text").get<std::string>(), inv.args.at("task_type").get<std::string>(),
                                subdir.resolved, inv.args.at("done_when").get<std::string>() };
    auto const child = ctx.services->delegate(ctx.session, task);
    auto out = ToolOutcome::success(
        { { "status", "pending" }, { "child_session_id", child }, { "subdir", subdir.relative } });
    out.childSessionId = child;
    return out;
}

auto finish(ToolInvocation const& inv, ExecContext const& ctx) -> ToolOutcome
{
    auto reasons = ctx.services ? ctx.services->openGates(ctx.session) : std::vector<std::string> {};
    if (!reasons.empty())
        return ToolOutcome::failure({ { "error", "Blocked" }, { "gate_reasons", reasons } });
    auto out = ToolOutcome::success({ { "status", "finished" } });
    out.finishRequested = true;
    out.report = inv.args.at("report_text").get<std::string>();
    return out;
}

} // namespace

auto orchestrationTools() -> std::vector<ActionSchema> const&
{
    static auto const tools = buildTools();
    return tools;
}

auto orchestrationTool(std::string_view name) -> ActionSchema const*
{
    for (auto const& t: orchestrationTools())
        if (t.name == name)
            return &t;
    return nullptr;
}

void registerOrchestrationBindings(BindingTable& table)
{
    table.addExecutor("orchestration.fs_read", fsRead);
    table.addExecutor("orchestration.fs_write", fsWrite);
    table.addExecutor("orchestration.run_command", runCommandTool);
    table.addExecutor("orchestration.delegate_subtask", delegateSubtask);
    table.addExecutor("orchestration.finish", finish);
}

} // namespace skillrt
