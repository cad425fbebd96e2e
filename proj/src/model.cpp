// SPDX-License-Identifier: Apache-2.0
#include <skillrt/model.hpp>

namespace skillrt
{

namespace
{

constexpr std::uint64_t bytesPerUnit = 4;

auto units(std::uint64_t bytes) -> std::uint64_t
{
    return (bytes + bytesPerUnit - 1) / bytesPerUnit;
}

auto callBytes(std::optional<ToolCallRequest> const& call) -> std::uint64_t
{
    if (!call)
        return 0;
    return call->name.size() + call->arguments.dump().size();
}

} // namespace

auto ModelRequest::hasTool(std::string_view name) const -> bool
{
    for (auto const& t: tools)
        if (t.name == name)
            return true;
    return false;
}

auto ModelRequest::toolNames() const -> std::vector<std::string>
{
    auto out = std::vector<std::string> {};
    for (auto const& t: tools)
        out.push_back(t.name);
    return out;
}

auto syntheticRequestUnits(ModelRequest const& request) -> std::uint64_t
{
    auto bytes = std::uint64_t { 0 };
    for (auto const& m: request.messages)
        bytes += m.role.size() + m.text.size() + callBytes(m.toolCall);
    for (auto const& t: request.tools)
        bytes += t.toToolJson().dump().size();
    return units(bytes);
}

auto syntheticResponseUnits(std::string const& text, std::optional<ToolCallRequest> const& call) -> std::uint64_t
{
    return units(text.size() + callBytes(call));
}

} // namespace skillrt
