// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <skillrt/model.hpp>
#include <skillrt/session_store.hpp>

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <vector>

namespace skillrt
{

/// `requests.jsonl` writer. Every model request produces one line with
/// `{ts, session_id, provider, response_model, input_tokens, output_tokens,
/// cache_tokens, total_tokens, assistant_text, tool_call}`; the owning
/// session's usage totals are updated under the same lock as the append.
class UsageLog
{
  public:
    /// In-memory only.
    UsageLog() = default;
    explicit UsageLog(std::filesystem::path path);

    /// Throws Error(LogWriteError) if the line cannot be written.
    auto log(SessionStore& store, std::string const& sessionId, ModelResponse const& response) -> Json;

    [[nodiscard]] auto lines() const -> std::vector<Json>;
    [[nodiscard]] auto path() const -> std::optional<std::filesystem::path> const& { return _path; }

    [[nodiscard]] static auto read(std::filesystem::path const& path) -> std::vector<Json>;
    [[nodiscard]] static auto totalsFor(std::vector<Json> const& lines, std::string const& sessionId) -> UsageTotals;

  private:
    mutable std::mutex _mutex;
    std::optional<std::filesystem::path> _path;
    std::ofstream _out;
    std::vector<Json> _lines;
};

} // namespace skillrt
