// SPDX-License-Identifier: Apache-2.0
#include <skillrt/error.hpp>
#include <skillrt/repair/repair_state.hpp>

#include <array>
#include <utility>

namespace skillrt::repair
{

namespace
{

constexpr auto kEdges = std::array {
    std::pair { Phase::Reproduce, Phase::Patch },  std::pair { Phase::Reproduce, Phase::Diagnose },
    std::pair { Phase::Diagnose, Phase::Patch },   std::pair { Phase::Patch, Phase::Verify },
    std::pair { Phase::Verify, Phase::Report },    std::pair { Phase::Verify, Phase::Patch },
};

} // namespace

auto phaseName(Phase phase) -> std::string_view
{
    switch (phase)
    {
        case Phase::Reproduce: return "reproduce";
        case Phase::Diagnose: return "diagnose";
        case Phase::Patch: return "patch";
        case Phase::Verify: return "verify";
        case Phase::Report: return "report";
    }
    return "reproduce";
}

auto parsePhase(std::string_view name) -> std::optional<Phase>
{
    for (auto p: allPhases())
        if (phaseName(p) == name)
            return p;
    return std::nullopt;
}

auto allPhases() -> std::vector<Phase> const&
{
    static auto const phases =
        std::vector { Phase::Reproduce, Phase::Diagnose, Phase::Patch, Phase::Verify, Phase::Report };
    return phases;
}

auto isAllowedTransition(Phase from, Phase to) -> bool
{
    for (auto const& [a, b]: kEdges)
        if (a == from && b == to)
            return true;
    return false;
}

auto repairToolsFor(Phase phase) -> std::set<std::string>
{
    auto const s = [](std::string_view v) { return std::string(v); };
    switch (phase)
    {
        case Phase::Reproduce: return { s(kEvidenceTool) };
        case Phase::Diagnose: return { s(kEvidenceTool), s(kPatchTool) };
        case Phase::Patch: return { s(kEvidenceTool), s(kPatchTool) };
        case Phase::Verify: return { s(kVerifyTool) };
        case Phase::Report: return { s(kArtifactTool) };
    }
    return {};
}

auto allRepairTools() -> std::set<std::string>
{
    return { std::string(kEvidenceTool), std::string(kPatchTool), std::string(kVerifyTool),
             std::string(kArtifactTool) };
}

void RepairState::enter(Phase next)
{
    if (next == phase)
        return;
    if (!isAllowedTransition(phase, next))
        throw Error(ErrorKind::InvalidArgument, "illegal repair transition " + std::string(phaseName(phase)) + " -> "
                                                    + std::string(phaseName(next)));
    phase = next;
    phaseHistory.emplace_back(phaseName(next));
}

auto RepairState::toJson() const -> Json
{
    auto doc = Json {
        { "phase", phaseName(phase) },
        { "verification_passed", verificationPassed },
        { "failure_signature", failureSignature ? Json(*failureSignature) : Json(nullptr) },
        { "required_artifacts", requiredArtifacts },
        { "produced_artifacts", producedArtifacts },
        { "gate_fail_reasons", gateFailReasons },
        { "phase_history", phaseHistory },
        { "last_tool", nullptr },
    };
    if (lastTool)
        doc["last_tool"] = { { "name", lastTool->name }, { "ok", lastTool->ok }, { "seq", lastTool->seq } };
    return doc;
}

auto RepairState::fromJson(Json const& doc) -> RepairState
{
    auto s = RepairState {};
    if (doc.is_null() || (doc.is_object() && doc.empty()))
        return s;
    try
    {
        auto const phase = parsePhase(doc.at("phase").get<std::string>());
        if (!phase)
            throw Error(ErrorKind::InvalidArgument, "unknown repair phase " + doc.at("phase").dump());
        s.phase = *phase;
        s.verificationPassed = doc.value("verification_passed", false);
        if (doc.contains("failure_signature") && doc["failure_signature"].is_string())
            s.failureSignature = doc["failure_signature"].get<std::string>();
        s.requiredArtifacts = doc.value("required_artifacts", std::vector<std::string> {});
        s.producedArtifacts = doc.value("produced_artifacts", std::vector<std::string> {});
        s.gateFailReasons = doc.value("gate_fail_reasons", std::vector<std::string> {});
        s.phaseHistory = doc.value("phase_history", std::vector<std::string> { "reproduce" });
        if (doc.contains("last_tool") && doc["last_tool"].is_object())
        {
            auto const& lt = doc["last_tool"];
            s.lastTool = LastTool { lt.at("name").get<std::string>(), lt.at("ok").get<bool>(),
                                    lt.at("seq").get<std::uint64_t>() };
        }
    }
    catch (Json::exception const& e)
    {
        throw Error(ErrorKind::InvalidArgument, std::string("malformed repair state: ") + e.what());
    }
    return s;
}

} // namespace skillrt::repair
