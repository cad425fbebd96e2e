// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <skillrt/json.hpp>

#include <cstdint>
#include <string>

namespace skillrt
{

/// Normalised per-request token accounting.
struct UsageRecord
{
    std::string provider;
    std::string responseModel;
    std::uint64_t inputTokens = 0;
    std::uint64_t outputTokens = 0;
    std::uint64_t cacheTokens = 0;
    std::uint64_t totalTokens = 0;

    [[nodiscard]] auto toJson() const -> Json;
    [[nodiscard]] static auto fromJson(Json const& doc) -> UsageRecord;

    auto operator==(UsageRecord const&) const -> bool = default;
};

struct UsageTotals
{
    std::uint64_t inputTokens = 0;
    std::uint64_t outputTokens = 0;
    std::uint64_t cacheTokens = 0;
    std::uint64_t totalTokens = 0;
    std::uint64_t requestCount = 0;

    void add(UsageRecord const& record)
    {
        inputTokens += record.inputTokens;
        outputTokens += record.outputTokens;
        cacheTokens += record.cacheTokens;
        totalTokens += record.totalTokens;
        ++requestCount;
    }

    [[nodiscard]] auto toJson() const -> Json;

    auto operator==(UsageTotals const&) const -> bool = default;
};

} // namespace skillrt
