// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <skillrt/model.hpp>

#include <optional>
#include <string>

namespace skillrt
{

struct EndpointConfig
{
    /// e.g. "https://api.example.com/v1"; requests go to `<base>/chat/completions`.
    std::string baseUrl;
    std::string apiKey;
    std::string model;
    int timeoutS = 120;

    /// Reads MODEL_BASE_URL, MODEL_API_KEY and MODEL_NAME. Returns nullopt if
    /// MODEL_BASE_URL is unset.
    [[nodiscard]] static auto fromEnvironment() -> std::optional<EndpointConfig>;
};

/// Serializes a request as a chat-completions JSON body with function tools.
[[nodiscard]] auto chatCompletionsBody(ModelRequest const& request, std::string const& model) -> Json;

/// Normalises a chat-completions response body. Throws ModelBackendError
/// (non-retryable) on shape errors or more than one tool call.
[[nodiscard]] auto parseChatCompletion(std::string const& body) -> ModelResponse;

/// Generic HTTP chat backend for live runs.
class HttpBackend: public ModelBackend
{
  public:
    explicit HttpBackend(EndpointConfig config);

    auto complete(ModelRequest const& request) -> ModelResponse override;

  private:
    EndpointConfig _config;
    std::string _schemeHostPort;
    std::string _pathPrefix;
};

} // namespace skillrt
