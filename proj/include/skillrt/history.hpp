// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <skillrt/json.hpp>
#include <skillrt/usage.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace skillrt
{

enum class EventKind
{
    UserMessage,
    AssistantMessage,
    ToolCall,
    ToolResult,
    GuidanceInjection,
    Completion,
    SystemNote,
};

[[nodiscard]] auto eventKindName(EventKind kind) -> std::string_view;
[[nodiscard]] auto parseEventKind(std::string_view name) -> std::optional<EventKind>;

/// A tool call as the model emitted it, before validation.
struct ToolCallRequest
{
    std::string name;
    Json arguments = Json::object();

    auto operator==(ToolCallRequest const&) const -> bool = default;
};

struct UserMessage
{
    std::string text;
    auto operator==(UserMessage const&) const -> bool = default;
};

struct AssistantMessage
{
    std::string text;
    std::optional<ToolCallRequest> toolCall;
    std::optional<UsageRecord> usage;
    auto operator==(AssistantMessage const&) const -> bool = default;
};

/// The runtime's accepted action. `args` are the validated arguments unless
/// `validated` is false, in which case they are the raw model arguments and
/// the matching result carries the validation errors.
struct ToolCallEvent
{
    std::string callId;
    std::string name;
    Json args = Json::object();
    bool validated = true;
    auto operator==(ToolCallEvent const&) const -> bool = default;
};

struct ToolResultEvent
{
    std::string callId;
    std::string name;
    bool ok = true;
    Json output = Json::object();
    auto operator==(ToolResultEvent const&) const -> bool = default;
};

struct GuidanceInjection
{
    std::string skillId;
    std::string text;
    auto operator==(GuidanceInjection const&) const -> bool = default;
};

struct CompletionEvent
{
    std::string report;
    auto operator==(CompletionEvent const&) const -> bool = default;
};

struct ChildReport
{
    std::string childSessionId;
    std::string status;
    std::string report;
    auto operator==(ChildReport const&) const -> bool = default;
};

struct SystemNote
{
    std::string text;
    std::optional<ChildReport> childReport;
    auto operator==(SystemNote const&) const -> bool = default;
};

using EventPayload = std::variant<UserMessage, AssistantMessage, ToolCallEvent, ToolResultEvent, GuidanceInjection,
                                  CompletionEvent, SystemNote>;

[[nodiscard]] auto payloadKind(EventPayload const& payload) -> EventKind;

struct HistoryEvent
{
    std::uint64_t seq = 0;
    EventPayload payload;

    [[nodiscard]] auto kind() const -> EventKind { return payloadKind(payload); }

    template <typename T>
    [[nodiscard]] auto as() const -> T const*
    {
        return std::get_if<T>(&payload);
    }

    /// Log-line form: `{"seq":n,"kind":...,"payload":...}`.
    [[nodiscard]] auto toJson() const -> Json;
    /// Throws Error(CorruptStore) on shape errors.
    [[nodiscard]] static auto fromJson(Json const& doc) -> HistoryEvent;

    auto operator==(HistoryEvent const&) const -> bool = default;
};

[[nodiscard]] auto payloadToJson(EventPayload const& payload) -> Json;
[[nodiscard]] auto payloadFromJson(EventKind kind, Json const& doc) -> EventPayload;

} // namespace skillrt
