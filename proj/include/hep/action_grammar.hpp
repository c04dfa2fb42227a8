#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hep {

enum class ActionId {
    TrainProbe,
    BuildPylon,
    BuildNexus,
    BuildAssimilator,
    BuildGateway,
    BuildCyberneticsCore,
    BuildForge,
    BuildStargate,
    BuildFleetBeacon,
    TrainZealot,
    TrainStalker,
    TrainCarrier,
    ResearchWarpgate,
    ResearchGroundWeaponLevel1,
    ResearchGroundArmorLevel1,
    ResearchAirWeaponLevel1,
    ResearchAirWeaponLevel2,
    ResearchAirArmorLevel1,
    ResearchAirArmorLevel2,
    ChronoboostNexus,
    ScoutWithProbe,
    Attack,
    EmptyAction,
};

enum class ActionGroup { Priority, Routine };

enum class ActionCategory { Economy, Supply, Military, Technology, Building, Scouting, Attack, None };

struct ActionToken {
    ActionId id;
    std::string_view surface;  // canonical form, e.g. "<TRAIN PROBE>"
    ActionGroup group;
    ActionCategory category;

    friend bool operator==(const ActionToken& a, const ActionToken& b) { return a.id == b.id; }
    friend auto operator<=>(const ActionToken& a, const ActionToken& b) { return a.id <=> b.id; }
};

// A `<...>` segment that did not name a library action, or a field value that
// was rejected.
struct Violation {
    std::string text;
    std::string reason;

    friend bool operator==(const Violation&, const Violation&) = default;
};

struct DecisionOutput {
    std::optional<std::string> current_tactic;
    std::optional<ActionId> priority;
    std::vector<ActionToken> raw_actions;
    std::vector<ActionToken> validated_actions;
    std::string raw_text;
    std::vector<Violation> violations;
};

// The whole Legal Action Library, in declaration order.
std::span<const ActionToken> action_library();

// Same content as a set; stable across calls.
std::set<ActionToken> legal_actions();

const ActionToken& token(ActionId id);
std::string_view surface(ActionId id);
std::string_view to_string(ActionGroup group);
std::string_view to_string(ActionCategory category);

// One surface per line, each line terminated by '\n'. This is the exact
// content of the bundled action_library.txt asset.
std::string render_action_library();

// Trim, collapse internal whitespace runs to one space, ASCII-uppercase.
std::string canonicalize(std::string_view text);

// Looks up a segment body (without brackets) after canonicalization.
std::optional<ActionToken> match_action(std::string_view segment_body);

struct ExtractResult {
    std::vector<ActionToken> tokens;
    std::vector<Violation> rejected;
};

// Left-to-right scan for `<...>` segments. A '<' opens a segment that ends at
// the next '>'; another '<' before that '>' restarts it. Total on any input.
ExtractResult scan_actions(std::string_view text);
std::vector<ActionToken> extract_actions(std::string_view text);

// First line of the form `Name: value` (case-insensitive, name optionally in
// angle brackets). For "Priority", a value of NONE is reported as absent.
std::optional<std::string> extract_field(std::string_view text, std::string_view field_name);

// Matches a free-form tactic value against the known names. The word
// "tactic"/"tactics" at the end of either side is optional; the known name
// must occur inside the value. Longest known name wins.
std::optional<std::string> match_tactic(std::string_view value, std::span<const std::string> known_tactics);

DecisionOutput parse_decision(std::string_view text, std::span<const std::string> known_tactics);

}  // namespace hep
