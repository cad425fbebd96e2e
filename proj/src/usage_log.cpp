// SPDX-License-Identifier: Apache-2.0
#include <skillrt/error.hpp>
#include <skillrt/usage_log.hpp>

#include <chrono>
#include <ctime>

namespace skillrt
{

namespace
{

auto utcTimestamp() -> std::string
{
    auto const now = std::chrono::system_clock::now();
    auto const secs = std::chrono::system_clock::to_time_t(now);
    auto const millis =
        std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm {};
    ::gmtime_r(&secs, &tm);
    char buf[40];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[48];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(millis));
    return out;
}

} // namespace

UsageLog::UsageLog(std::filesystem::path path): _path(std::move(path))
{
    if (_path->has_parent_path())
        std::filesystem::create_directories(_path->parent_path());
    _out.open(*_path, std::ios::binary | std::ios::app);
    if (!_out)
        throw Error(ErrorKind::LogWriteError, "cannot open usage log " + _path->string());
}

auto UsageLog::log(SessionStore& store, std::string const& sessionId, ModelResponse const& response) -> Json
{
    auto const& u = response.usage;
    auto line = Json {
        { "ts", utcTimestamp() },
        { "session_id", sessionId },
        { "provider", u.provider },
        { "response_model", u.responseModel },
        { "input_tokens", u.inputTokens },
        { "output_tokens", u.outputTokens },
        { "cache_tokens", u.cacheTokens },
        { "total_tokens", u.totalTokens },
        { "assistant_text", response.text },
        { "tool_call", response.toolCall
                           ? Json { { "name", response.toolCall->name }, { "arguments", response.toolCall->arguments } }
                           : Json(nullptr) },
    };

    auto lock = std::lock_guard(_mutex);
    if (_path)
    {
        _out << line.dump() << '\n';
        _out.flush();
        if (!_out)
            throw Error(ErrorKind::LogWriteError, "write to usage log " + _path->string() + " failed");
    }
    _lines.push_back(line);
    store.addUsage(sessionId, u);
    return line;
}

auto UsageLog::lines() const -> std::vector<Json>
{
    auto lock = std::lock_guard(_mutex);
    return _lines;
}

auto UsageLog::read(std::filesystem::path const& path) -> std::vector<Json>
{
    auto in = std::ifstream(path);
    auto out = std::vector<Json> {};
    auto line = std::string {};
    while (std::getline(in, line))
        if (!line.empty())
            out.push_back(Json::parse(line));
    return out;
}

auto UsageLog::totalsFor(std::vector<Json> const& lines, std::string const& sessionId) -> UsageTotals
{
    auto totals = UsageTotals {};
    for (auto const& l: lines)
    {
        if (l.value("session_id", "") != sessionId)
            continue;
        totals.add(UsageRecord {
            l.at("provider").get<std::string>(),
            l.at("response_model").get<std::string>(),
            l.at("input_tokens").get<std::uint64_t>(),
            l.at("output_tokens").get<std::uint64_t>(),
            l.at("cache_tokens").get<std::uint64_t>(),
            l.at("total_tokens").get<std::uint64_t>(),
        });
    }
    return totals;
}

} // namespace skillrt
