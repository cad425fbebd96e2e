// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <skillrt/history.hpp>
#include <skillrt/json.hpp>
#include <skillrt/manifest.hpp>
#include <skillrt/usage.hpp>

#include <optional>
#include <string>
#include <vector>

namespace skillrt
{

struct ChatMessage
{
    std::string role; // system | user | assistant | tool
    std::string text;
    /// assistant messages that called a tool
    std::optional<ToolCallRequest> toolCall;
    /// assistant tool call id, or the call answered by a role=tool message
    std::string toolCallId;
};

struct ModelRequest
{
    std::string sessionId;
    std::vector<ChatMessage> messages;
    std::vector<ActionSchema> tools;

    [[nodiscard]] auto hasTool(std::string_view name) const -> bool;
    [[nodiscard]] auto toolNames() const -> std::vector<std::string>;
};

struct ModelResponse
{
    std::string text;
    std::optional<ToolCallRequest> toolCall;
    UsageRecord usage;

    [[nodiscard]] auto hasToolCall() const -> bool { return toolCall.has_value(); }
};

class ModelBackend
{
  public:
    virtual ~ModelBackend() = default;

    /// Throws ModelBackendError.
    virtual auto complete(ModelRequest const& request) -> ModelResponse = 0;
};

/// Size of the request in synthetic units (4 bytes each, rounded up) over
/// message texts, tool calls and serialized tool definitions.
[[nodiscard]] auto syntheticRequestUnits(ModelRequest const& request) -> std::uint64_t;
[[nodiscard]] auto syntheticResponseUnits(std::string const& text, std::optional<ToolCallRequest> const& call)
    -> std::uint64_t;

} // namespace skillrt
