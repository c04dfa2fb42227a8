#include "hep/hierarchy_guard.hpp"

#include <algorithm>

#include "hep/error.hpp"

namespace hep {

EnforceMode parse_enforce_mode(std::string_view text) {
    if (text == "on") return EnforceMode::On;
    if (text == "off") return EnforceMode::Off;
    if (text == "report-only") return EnforceMode::ReportOnly;
    throw ConfigError("enforce_hierarchy must be on|off|report-only, got '" + std::string(text) + "'");
}

std::string_view to_string(EnforceMode mode) {
    switch (mode) {
        case EnforceMode::On: return "on";
        case EnforceMode::Off: return "off";
        case EnforceMode::ReportOnly: return "report-only";
    }
    return "on";
}

ActionGroup classify(const ActionToken& token) {
    return (token.id == ActionId::BuildNexus || token.id == ActionId::BuildAssimilator) ? ActionGroup::Priority
                                                                                        : ActionGroup::Routine;
}

std::pair<std::vector<ActionToken>, HierarchyReport> enforce(const DecisionOutput& decision) {
    HierarchyReport report;
    if (!decision.priority) {
        report.kept = decision.raw_actions;
        return {decision.raw_actions, std::move(report)};
    }

    report.priority_active = true;
    const ActionId priority = *decision.priority;
    for (const auto& t : decision.raw_actions) {
        const bool exempt = t.id == ActionId::TrainProbe || t.id == ActionId::BuildPylon;
        if (classify(t) == ActionGroup::Priority || exempt) {
            report.kept.push_back(t);
        } else {
            report.suppressed.push_back({t, std::string("routine action while priority ") +
                                                std::string(surface(priority)) + " is pending"});
        }
    }

    std::vector<ActionToken> validated;
    const bool present = std::any_of(report.kept.begin(), report.kept.end(),
                                     [&](const ActionToken& t) { return t.id == priority; });
    if (!present) {
        validated.push_back(token(priority));
        report.inserted_priority = true;
    }
    validated.insert(validated.end(), report.kept.begin(), report.kept.end());
    report.compliant = report.suppressed.empty() && !report.inserted_priority;
    return {std::move(validated), std::move(report)};
}

ComplianceSummary audit_trace(std::span<const HierarchyReport> reports) {
    ComplianceSummary s;
    for (const auto& r : reports) {
        ++s.steps;
        if (r.priority_active) ++s.priority_active_steps;
        if (r.compliant) ++s.compliant_steps;
        s.suppressed_total += static_cast<int>(r.suppressed.size());
        if (r.inserted_priority) ++s.inserted_total;
    }
    if (s.steps > 0) {
        s.priority_active_fraction = static_cast<double>(s.priority_active_steps) / s.steps;
        s.compliance_fraction = static_cast<double>(s.compliant_steps) / s.steps;
    }
    return s;
}

}  // namespace hep
