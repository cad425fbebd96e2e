// SPDX-License-Identifier: Apache-2.0
#include <skillrt/error.hpp>
#include <skillrt/http_backend.hpp>

#include <httplib.h>

#include <cstdlib>

namespace skillrt
{

auto EndpointConfig::fromEnvironment() -> std::optional<EndpointConfig>
{
    auto const* base = std::getenv("MODEL_BASE_URL");
    if (!base || !*base)
        return std::nullopt;
    auto config = EndpointConfig {};
    config.baseUrl = base;
    if (auto const* key = std::getenv("MODEL_API_KEY"))
        config.apiKey = key;
    if (auto const* name = std::getenv("MODEL_NAME"))
        config.model = name;
    return config;
}

auto chatCompletionsBody(ModelRequest const& request, std::string const& model) -> Json
{
    auto messages = Json::array();
    for (auto const& m: request.messages)
    {
        auto msg = Json { { "role", m.role } };
        if (m.role == "assistant" && m.toolCall)
        {
            msg["content"] = m.text.empty() ? Json(nullptr) : Json(m.text);
            msg["tool_calls"] = Json::array({ Json {
                { "id", m.toolCallId },
                { "type", "function" },
                { "function", { { "name", m.toolCall->name }, { "arguments", m.toolCall->arguments.dump() } } },
            } });
        }
        else if (m.role == "tool")
        {
            msg["tool_call_id"] = m.toolCallId;
            msg["content"] = m.text;
        }
        else
            msg["content"] = m.text;
        messages.push_back(std::move(msg));
    }
    auto body = Json { { "model", model }, { "messages", std::move(messages) } };
    if (!request.tools.empty())
    {
        auto tools = Json::array();
        for (auto const& t: request.tools)
            tools.push_back(t.toToolJson());
        body["tools"] = std::move(tools);
    }
    return body;
}

auto parseChatCompletion(std::string const& body) -> ModelResponse
{
    auto doc = Json {};
    try
    {
        doc = Json::parse(body);
    }
    catch (Json::parse_error const& e)
    {
        throw ModelBackendError(std::string("unparseable response body: ") + e.what(), 200, false);
    }

    try
    {
        auto const& choices = doc.at("choices");
        if (!choices.is_array() || choices.empty())
            throw ModelBackendError("response has no choices", 200, false);
        auto const& message = choices.at(0).at("message");

        auto response = ModelResponse {};
        if (auto it = message.find("content"); it != message.end() && it->is_string())
            response.text = it->get<std::string>();

        if (auto it = message.find("tool_calls"); it != message.end() && it->is_array() && !it->empty())
        {
            if (it->size() > 1)
                throw ModelBackendError("response carries " + std::to_string(it->size())
                                            + " tool calls; one call per turn is required",
                                        200, false);
            auto const& fn = it->at(0).at("function");
            auto call = ToolCallRequest { fn.at("name").get<std::string>(), Json::object() };
            auto const& rawArgs = fn.at("arguments");
            if (rawArgs.is_string())
            {
                auto parsed = Json::parse(rawArgs.get<std::string>(), nullptr, false);
                call.arguments = parsed.is_discarded() ? rawArgs : parsed;
            }
            else
                call.arguments = rawArgs;
            response.toolCall = std::move(call);
        }

        response.usage.provider = "http";
        response.usage.responseModel = doc.value("model", "");
        if (auto u = doc.find("usage"); u != doc.end() && u->is_object())
        {
            response.usage.inputTokens = u->value("prompt_tokens", std::uint64_t { 0 });
            response.usage.outputTokens = u->value("completion_tokens", std::uint64_t { 0 });
            if (auto d = u->find("prompt_tokens_details"); d != u->end() && d->is_object())
                response.usage.cacheTokens = d->value("cached_tokens", std::uint64_t { 0 });
            response.usage.totalTokens = u->value(
                "total_tokens", response.usage.inputTokens + response.usage.outputTokens);
        }
        return response;
    }
    catch (Json::exception const& e)
    {
        throw ModelBackendError(std::string("malformed response: ") + e.what(), 200, false);
    }
}

HttpBackend::HttpBackend(EndpointConfig config): _config(std::move(config))
{
    auto const& url = _config.baseUrl;
    auto const schemeEnd = url.find("://");
    if (schemeEnd == std::string::npos)
        throw Error(ErrorKind::InvalidArgument, "MODEL_BASE_URL '" + url + "' lacks a scheme");
    auto const pathStart = url.find('/', schemeEnd + 3);
    _schemeHostPort = url.substr(0, pathStart);
    _pathPrefix = pathStart == std::string::npos ? std::string {} : url.substr(pathStart);
    while (!_pathPrefix.empty() && _pathPrefix.back() == '/')
        _pathPrefix.pop_back();
}

auto HttpBackend::complete(ModelRequest const& request) -> ModelResponse
{
    auto client = httplib::Client(_schemeHostPort);
    client.set_connection_timeout(_config.timeoutS, 0);
    client.set_read_timeout(_config.timeoutS, 0);
    auto headers = httplib::Headers {};
    if (!_config.apiKey.empty())
        headers.emplace("Authorization", "Bearer " + _config.apiKey);

    auto const body = chatCompletionsBody(request, _config.model).dump();
    auto result = client.Post(_pathPrefix + "/chat/completions", headers, body, "application/json");
    if (!result)
        throw ModelBackendError("request failed: " + httplib::to_string(result.error()), 0, true);
    auto const status = result->status;
    if (status != 200)
    {
        auto const retryable = status == 429 || status >= 500;
        throw ModelBackendError("endpoint returned HTTP " + std::to_string(status), status, retryable);
    }
    auto response = parseChatCompletion(result->body);
    if (response.usage.responseModel.empty())
        response.usage.responseModel = _config.model;
    return response;
}

} // namespace skillrt
