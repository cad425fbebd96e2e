// SPDX-License-Identifier: Apache-2.0
#include <skillrt/error.hpp>
#include <skillrt/scripted_backend.hpp>

#include <fstream>
#include <sstream>

namespace skillrt
{

namespace
{

constexpr auto phaseMarker = std::string_view("Current phase:");

void scriptFail(std::string const& message)
{
    throw Error(ErrorKind::InvalidArgument, "script: " + message);
}

} // namespace

auto currentPhaseLine(ModelRequest const& request) -> std::optional<std::string>
{
    for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it)
    {
        auto const& text = it->text;
        auto const at = text.rfind(phaseMarker);
        if (at == std::string::npos)
            continue;
        auto const end = text.find('\n', at);
        return text.substr(at, end == std::string::npos ? std::string::npos : end - at);
    }
    return std::nullopt;
}

auto ScriptStep::matches(ModelRequest const& request) const -> bool
{
    if (toolVisible && !request.hasTool(*toolVisible))
        return false;
    if (phaseContains)
    {
        auto line = currentPhaseLine(request);
        if (!line || line->find(*phaseContains, phaseMarker.size()) == std::string::npos)
            return false;
    }
    return true;
}

auto ScriptStep::toJson() const -> Json
{
    auto doc = Json::object();
    auto when = Json::object();
    if (phaseContains)
        when["phase_contains"] = *phaseContains;
    if (toolVisible)
        when["tool_visible"] = *toolVisible;
    if (!when.empty())
        doc["when"] = when;
    auto respond = Json::object();
    if (!text.empty())
        respond["text"] = text;
    if (toolCall)
        respond["tool_call"] = Json { { "name", toolCall->name }, { "arguments", toolCall->arguments } };
    doc["respond"] = respond;
    return doc;
}

auto parseScript(Json const& doc) -> std::vector<ScriptStep>
{
    if (!doc.is_array())
        scriptFail("expected a JSON list of steps");
    auto steps = std::vector<ScriptStep> {};
    for (size_t i = 0; i < doc.size(); ++i)
    {
        auto const at = "step " + std::to_string(i);
        auto const& s = doc[i];
        if (!s.is_object())
            scriptFail(at + ": expected an object");
        for (auto const& [key, _]: s.items())
            if (key != "when" && key != "respond")
                scriptFail(at + ": unknown key '" + key + "'");
        auto step = ScriptStep {};
        if (auto w = s.find("when"); w != s.end())
        {
            if (!w->is_object())
                scriptFail(at + "/when: expected an object");
            for (auto const& [key, value]: w->items())
            {
                if (!value.is_string())
                    scriptFail(at + "/when/" + key + ": expected a string");
                if (key == "phase_contains")
                    step.phaseContains = value.get<std::string>();
                else if (key == "tool_visible")
                    step.toolVisible = value.get<std::string>();
                else
                    scriptFail(at + "/when: unknown key '" + key + "'");
            }
        }
        if (!s.contains("respond") || !s.at("respond").is_object())
            scriptFail(at + ": missing 'respond' object");
        auto const& r = s.at("respond");
        for (auto const& [key, value]: r.items())
        {
            if (key == "text")
            {
                if (!value.is_string())
                    scriptFail(at + "/respond/text: expected a string");
                step.text = value.get<std::string>();
            }
            else if (key == "tool_call")
            {
                if (!value.is_object() || !value.contains("name") || !value.at("name").is_string())
                    scriptFail(at + "/respond/tool_call: expected {name, arguments}");
                auto call = ToolCallRequest { value.at("name").get<std::string>(),
                                              value.value("arguments", Json::object()) };
                step.toolCall = std::move(call);
            }
            else
                scriptFail(at + "/respond: unknown key '" + key + "'");
        }
        steps.push_back(std::move(step));
    }
    return steps;
}

auto loadScript(std::filesystem::path const& path) -> std::vector<ScriptStep>
{
    auto in = std::ifstream(path);
    if (!in)
        scriptFail("cannot read " + path.string());
    auto buffer = std::stringstream {};
    buffer << in.rdbuf();
    try
    {
        return parseScript(Json::parse(buffer.str()));
    }
    catch (Json::parse_error const& e)
    {
        scriptFail(path.string() + ": " + e.what());
    }
    return {};
}

ScriptedBackend::ScriptedBackend(std::vector<ScriptStep> steps, std::string model):
    _steps(std::move(steps)), _used(_steps.size(), false), _model(std::move(model))
{
}

auto ScriptedBackend::complete(ModelRequest const& request) -> ModelResponse
{
    auto lock = std::lock_guard(_mutex);
    for (size_t i = 0; i < _steps.size(); ++i)
    {
        if (_used[i] || !_steps[i].matches(request))
            continue;
        _used[i] = true;
        auto const& step = _steps[i];
        if (step.toolCall && !request.hasTool(step.toolCall->name))
            throw ModelBackendError("script step " + std::to_string(i) + " calls '" + step.toolCall->name
                                        + "' which is not visible",
                                    0, false, ErrorKind::ScriptToolNotVisible);
        auto response = ModelResponse {};
        response.text = step.text;
        response.toolCall = step.toolCall;
        response.usage.provider = "scripted";
        response.usage.responseModel = _model;
        response.usage.inputTokens = syntheticRequestUnits(request);
        response.usage.outputTokens = syntheticResponseUnits(step.text, step.toolCall);
        response.usage.totalTokens = response.usage.inputTokens + response.usage.outputTokens;
        return response;
    }
    throw ModelBackendError("script exhausted", 0, false, ErrorKind::ScriptExhausted);
}

auto ScriptedBackend::remaining() const -> size_t
{
    auto lock = std::lock_guard(_mutex);
    auto n = size_t { 0 };
    for (auto u: _used)
        n += u ? 0 : 1;
    return n;
}

} // namespace skillrt
