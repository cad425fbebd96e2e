// SPDX-License-Identifier: Apache-2.0
#include <skillrt/error.hpp>
#include <skillrt/history.hpp>

namespace skillrt
{

auto UsageRecord::toJson() const -> Json
{
    return Json {
        { "provider", provider },         { "response_model", responseModel }, { "input_tokens", inputTokens },
        { "output_tokens", outputTokens }, { "cache_tokens", cacheTokens },     { "total_tokens", totalTokens },
    };
}

auto UsageRecord::fromJson(Json const& doc) -> UsageRecord
{
    auto r = UsageRecord {};
    r.provider = doc.at("provider").get<std::string>();
    r.responseModel = doc.at("response_model").get<std::string>();
    r.inputTokens = doc.at("input_tokens").get<std::uint64_t>();
    r.outputTokens = doc.at("output_tokens").get<std::uint64_t>();
    r.cacheTokens = doc.at("cache_tokens").get<std::uint64_t>();
    r.totalTokens = doc.at("total_tokens").get<std::uint64_t>();
    return r;
}

auto UsageTotals::toJson() const -> Json
{
    return Json {
        { "input_tokens", inputTokens }, { "output_tokens", outputTokens },  { "cache_tokens", cacheTokens },
        { "total_tokens", totalTokens }, { "request_count", requestCount },
    };
}

auto eventKindName(EventKind kind) -> std::string_view
{
    switch (kind)
    {
        case EventKind::UserMessage: return "user_message";
        case EventKind::AssistantMessage: return "assistant_message";
        case EventKind::ToolCall: return "tool_call";
        case EventKind::ToolResult: return "tool_result";
        case EventKind::GuidanceInjection: return "guidance_injection";
        case EventKind::Completion: return "completion";
        case EventKind::SystemNote: return "system_note";
    }
    return "system_note";
}

auto parseEventKind(std::string_view name) -> std::optional<EventKind>
{
    for (auto k: { EventKind::UserMessage, EventKind::AssistantMessage, EventKind::ToolCall, EventKind::ToolResult,
                   EventKind::GuidanceInjection, EventKind::Completion, EventKind::SystemNote })
        if (eventKindName(k) == name)
            return k;
    return std::nullopt;
}

auto payloadKind(EventPayload const& payload) -> EventKind
{
    return static_cast<EventKind>(payload.index());
}

namespace
{

template <typename... Ts>
struct Overloaded: Ts...
{
    using Ts::operator()...;
};

auto toolCallToJson(ToolCallRequest const& call) -> Json
{
    return Json { { "name", call.name }, { "arguments", call.arguments } };
}

} // namespace

auto payloadToJson(EventPayload const& payload) -> Json
{
    return std::visit(
        Overloaded {
            [](UserMessage const& m) { return Json { { "text", m.text } }; },
            [](AssistantMessage const& m) {
                auto doc = Json { { "text", m.text } };
                doc["tool_call"] = m.toolCall ? toolCallToJson(*m.toolCall) : Json(nullptr);
                doc["usage"] = m.usage ? m.usage->toJson() : Json(nullptr);
                return doc;
            },
            [](ToolCallEvent const& c) {
                return Json {
                    { "call_id", c.callId }, { "name", c.name }, { "args", c.args }, { "validated", c.validated }
                };
            },
            [](ToolResultEvent const& r) {
                return Json { { "call_id", r.callId }, { "name", r.name }, { "ok", r.ok }, { "output", r.output } };
            },
            [](GuidanceInjection const& g) { return Json { { "skill_id", g.skillId }, { "text", g.text } }; },
            [](CompletionEvent const& c) { return Json { { "report", c.report } }; },
            [](SystemNote const& n) {
                auto doc = Json { { "text", n.text } };
                if (n.childReport)
                    doc["child_report"] = Json {
                        { "child_session_id", n.childReport->childSessionId },
                        { "status", n.childReport->status },
                        { "report", n.childReport->report },
                    };
                return doc;
            },
        },
        payload);
}

auto payloadFromJson(EventKind kind, Json const& doc) -> EventPayload
{
    try
    {
        switch (kind)
        {
            case EventKind::UserMessage: return UserMessage { doc.at("text").get<std::string>() };
            case EventKind::AssistantMessage: {
                auto m = AssistantMessage { doc.at("text").get<std::string>(), std::nullopt, std::nullopt };
                if (auto it = doc.find("tool_call"); it != doc.end() && !it->is_null())
                    m.toolCall = ToolCallRequest { it->at("name").get<std::string>(), it->at("arguments") };
                if (auto it = doc.find("usage"); it != doc.end() && !it->is_null())
                    m.usage = UsageRecord::fromJson(*it);
                return m;
            }
            case EventKind::ToolCall:
                return ToolCallEvent {
                    doc.at("call_id").get<std::string>(),
                    doc.at("name").get<std::string>(),
                    doc.at("args"),
                    doc.value("validated", true),
                };
            case EventKind::ToolResult:
                return ToolResultEvent {
                    doc.at("call_id").get<std::string>(),
                    doc.at("name").get<std::string>(),
                    doc.at("ok").get<bool>(),
                    doc.at("output"),
                };
            case EventKind::GuidanceInjection:
                return GuidanceInjection { doc.at("skill_id").get<std::string>(), doc.at("text").get<std::string>() };
            case EventKind::Completion: return CompletionEvent { doc.at("report").get<std::string>() };
            case EventKind::SystemNote: {
                auto n = SystemNote { doc.at("text").get<std::string>(), std::nullopt };
                if (auto it = doc.find("child_report"); it != doc.end())
                    n.childReport = ChildReport {
                        it->at("child_session_id").get<std::string>(),
                        it->at("status").get<std::string>(),
                        it->at("report").get<std::string>(),
                    };
                return n;
            }
        }
    }
    catch (Json::exception const& e)
    {
        throw Error(ErrorKind::CorruptStore,
                    "malformed " + std::string(eventKindName(kind)) + " payload: " + e.what());
    }
    throw Error(ErrorKind::CorruptStore, "unknown event kind");
}

auto HistoryEvent::toJson() const -> Json
{
    return Json { { "seq", seq }, { "kind", eventKindName(kind()) }, { "payload", payloadToJson(payload) } };
}

auto HistoryEvent::fromJson(Json const& doc) -> HistoryEvent
{
    if (!doc.is_object() || !doc.contains("seq") || !doc.contains("kind") || !doc.contains("payload"))
        throw Error(ErrorKind::CorruptStore, "event record missing seq/kind/payload");
    if (!doc.at("seq").is_number_unsigned() || !doc.at("kind").is_string())
        throw Error(ErrorKind::CorruptStore, "event record has malformed seq/kind");
    auto kind = parseEventKind(doc.at("kind").get<std::string>());
    if (!kind)
        throw Error(ErrorKind::CorruptStore, "unknown event kind '" + doc.at("kind").get<std::string>() + "'");
    return HistoryEvent { doc.at("seq").get<std::uint64_t>(), payloadFromJson(*kind, doc.at("payload")) };
}

} // namespace skillrt
