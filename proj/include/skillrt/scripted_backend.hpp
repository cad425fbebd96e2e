// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <skillrt/model.hpp>

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace skillrt
{

struct ScriptStep
{
    /// Matches when the most recent "Current phase:" line contains this text.
    std::optional<std::string> phaseContains;
    /// Matches when the request exposes a tool with this name.
    std::optional<std::string> toolVisible;
    std::string text;
    std::optional<ToolCallRequest> toolCall;

    [[nodiscard]] auto matches(ModelRequest const& request) const -> bool;
    [[nodiscard]] auto toJson() const -> Json;
};

/// Parses the script file format:
/// `[{"when": {"phase_contains": ..., "tool_visible": ...}, "respond": {"text": ..., "tool_call": {"name": ..., "arguments": {...}}}}]`
[[nodiscard]] auto parseScript(Json const& doc) -> std::vector<ScriptStep>;
[[nodiscard]] auto loadScript(std::filesystem::path const& path) -> std::vector<ScriptStep>;

/// Text of the latest "Current phase:" line in the request, if any.
[[nodiscard]] auto currentPhaseLine(ModelRequest const& request) -> std::optional<std::string>;

/// Deterministic model stand-in: each request consumes the first matching
/// step. Usage is synthetic (see syntheticRequestUnits).
class ScriptedBackend: public ModelBackend
{
  public:
    explicit ScriptedBackend(std::vector<ScriptStep> steps, std::string model = "scripted-v1");

    /// Throws ModelBackendError with kind ScriptExhausted or
    /// ScriptToolNotVisible (both non-retryable).
    auto complete(ModelRequest const& request) -> ModelResponse override;

    [[nodiscard]] auto remaining() const -> size_t;

  private:
    mutable std::mutex _mutex;
    std::vector<ScriptStep> _steps;
    std::vector<bool> _used;
    std::string _model;
};

} // namespace skillrt
