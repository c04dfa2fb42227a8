#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hep/action_grammar.hpp"

namespace hep {

// How the framework applies the priority/routine rule.
//   On         - act on the filtered list.
//   Off        - act on the raw list, no report bookkeeping beyond the defaults.
//   ReportOnly - act on the raw list but still record what would be suppressed;
//                this is the prompt-guidance-only setup.
enum class EnforceMode { On, Off, ReportOnly };

EnforceMode parse_enforce_mode(std::string_view text);  // "on" | "off" | "report-only"
std::string_view to_string(EnforceMode mode);

struct Suppression {
    ActionToken token;
    std::string reason;

    friend bool operator==(const Suppression&, const Suppression&) = default;
};

struct HierarchyReport {
    bool priority_active = false;
    std::vector<ActionToken> kept;
    std::vector<Suppression> suppressed;
    // Set when the declared priority action was missing from the raw list and
    // had to be put in front of the validated list.
    bool inserted_priority = false;
    bool compliant = true;
};

ActionGroup classify(const ActionToken& token);

// With no priority declared the raw list passes through. With a priority, only
// priority-group tokens plus TRAIN PROBE and BUILD PYLON survive, in order, and
// the declared priority action is prepended when the raw list omitted it.
std::pair<std::vector<ActionToken>, HierarchyReport> enforce(const DecisionOutput& decision);

struct ComplianceSummary {
    int steps = 0;
    int priority_active_steps = 0;
    int compliant_steps = 0;
    int suppressed_total = 0;
    int inserted_total = 0;
    double priority_active_fraction = 0.0;
    double compliance_fraction = 0.0;
};

ComplianceSummary audit_trace(std::span<const HierarchyReport> reports);

}  // namespace hep
