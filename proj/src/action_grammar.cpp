#include "hep/action_grammar.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace hep {

namespace {

using enum ActionId;
using G = ActionGroup;
using C = ActionCategory;

constexpr std::array<ActionToken, 23> kLibrary{{
    {TrainProbe, "<TRAIN PROBE>", G::Routine, C::Economy},
    {BuildPylon, "<BUILD PYLON>", G::Routine, C::Supply},
    {BuildNexus, "<BUILD NEXUS>", G::Priority, C::Economy},
    {BuildAssimilator, "<BUILD ASSIMILATOR>", G::Priority, C::Economy},
    {BuildGateway, "<BUILD GATEWAY>", G::Routine, C::Building},
    {BuildCyberneticsCore, "<BUILD CYBERNETICSCORE>", G::Routine, C::Building},
    {BuildForge, "<BUILD FORGE>", G::Routine, C::Building},
    {BuildStargate, "<BUILD STARGATE>", G::Routine, C::Building},
    {BuildFleetBeacon, "<BUILD FLEETBEACON>", G::Routine, C::Building},
    {TrainZealot, "<TRAIN ZEALOT>", G::Routine, C::Military},
    {TrainStalker, "<TRAIN STALKER>", G::Routine, C::Military},
    {TrainCarrier, "<TRAIN CARRIER>", G::Routine, C::Military},
    {ResearchWarpgate, "<RESEARCH WARPGATE>", G::Routine, C::Technology},
    {ResearchGroundWeaponLevel1, "<RESEARCH GROUND WEAPON LEVEL 1>", G::Routine, C::Technology},
    {ResearchGroundArmorLevel1, "<RESEARCH GROUND ARMOR LEVEL 1>", G::Routine, C::Technology},
    {ResearchAirWeaponLevel1, "<RESEARCH AIR WEAPON LEVEL 1>", G::Routine, C::Technology},
    {ResearchAirWeaponLevel2, "<RESEARCH AIR WEAPON LEVEL 2>", G::Routine, C::Technology},
    {ResearchAirArmorLevel1, "<RESEARCH AIR ARMOR LEVEL 1>", G::Routine, C::Technology},
    {ResearchAirArmorLevel2, "<RESEARCH AIR ARMOR LEVEL 2>", G::Routine, C::Technology},
    {ChronoboostNexus, "<CHRONOBOOST NEXUS>", G::Routine, C::Economy},
    {ScoutWithProbe, "<SCOUT WITH PROBE>", G::Routine, C::Scouting},
    {Attack, "<ATTACK>", G::Routine, C::Attack},
    {EmptyAction, "<EMPTY ACTION>", G::Routine, C::None},
}};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

char to_upper(char c) { return static_cast<char>(std::toupper(static_cast<unsigned char>(c))); }

char to_lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::string_view body_of(std::string_view surface) { return surface.substr(1, surface.size() - 2); }

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) { return to_lower(x) == to_lower(y); });
}

// Lowercased, whitespace-collapsed, with a trailing "tactic"/"tactics" word
// removed.
std::string tactic_key(std::string_view text) {
    std::string key = canonicalize(text);
    std::transform(key.begin(), key.end(), key.begin(), to_lower);
    for (std::string_view suffix : {" tactics", " tactic"}) {
        if (key.size() > suffix.size() && key.ends_with(suffix)) {
            key.resize(key.size() - suffix.size());
            break;
        }
    }
    return key;
}

}  // namespace

std::span<const ActionToken> action_library() { return kLibrary; }

std::set<ActionToken> legal_actions() { return {kLibrary.begin(), kLibrary.end()}; }

const ActionToken& token(ActionId id) { return kLibrary[static_cast<std::size_t>(id)]; }

std::string_view surface(ActionId id) { return token(id).surface; }

std::string_view to_string(ActionGroup group) { return group == G::Priority ? "priority" : "routine"; }

std::string_view to_string(ActionCategory category) {
    switch (category) {
        case C::Economy: return "economy";
        case C::Supply: return "supply";
        case C::Military: return "military";
        case C::Technology: return "technology";
        case C::Building: return "building";
        case C::Scouting: return "scouting";
        case C::Attack: return "attack";
        case C::None: return "none";
    }
    return "none";
}

std::string render_action_library() {
    std::string out;
    for (const auto& t : kLibrary) {
        out += t.surface;
        out += '\n';
    }
    return out;
}

std::string canonicalize(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : trim(text)) {
        if (is_space(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space) out += ' ';
        pending_space = false;
        out += to_upper(c);
    }
    return out;
}

std::optional<ActionToken> match_action(std::string_view segment_body) {
    const std::string key = canonicalize(segment_body);
    for (const auto& t : kLibrary) {
        if (body_of(t.surface) == key) return t;
    }
    return std::nullopt;
}

ExtractResult scan_actions(std::string_view text) {
    ExtractResult result;
    std::size_t open = std::string_view::npos;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '<') {
            open = i;
        } else if (text[i] == '>' && open != std::string_view::npos) {
            const std::string_view body = text.substr(open + 1, i - open - 1);
            if (auto t = match_action(body)) {
                result.tokens.push_back(*t);
            } else {
                result.rejected.push_back({std::string(text.substr(open, i - open + 1)), "not in legal action library"});
            }
            open = std::string_view::npos;
        }
    }
    return result;
}

std::vector<ActionToken> extract_actions(std::string_view text) { return scan_actions(text).tokens; }

std::optional<std::string> extract_field(std::string_view text, std::string_view field_name) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;

        // Tolerate markdown bullets/emphasis in front of the name.
        while (!line.empty() && (is_space(line.front()) || line.front() == '*' || line.front() == '#' ||
                                 line.front() == '-')) {
            line.remove_prefix(1);
        }
        bool bracketed = false;
        if (!line.empty() && line.front() == '<') {
            bracketed = true;
            line.remove_prefix(1);
        }
        if (line.size() < field_name.size() || !iequals(line.substr(0, field_name.size()), field_name)) continue;
        line.remove_prefix(field_name.size());
        if (bracketed) {
            if (line.empty() || line.front() != '>') continue;
            line.remove_prefix(1);
        }
        while (!line.empty() && (line.front() == '*' || line.front() == ' ' || line.front() == '\t')) {
            line.remove_prefix(1);
        }
        if (line.empty() || line.front() != ':') continue;
        line.remove_prefix(1);

        std::string_view value = trim(line);
        while (!value.empty() && value.back() == '*') value.remove_suffix(1);
        value = trim(value);
        if (value.empty()) return std::nullopt;
        if (iequals(field_name, "Priority") && iequals(value, "NONE")) return std::nullopt;
        return std::string(value);
    }
    return std::nullopt;
}

std::optional<std::string> match_tactic(std::string_view value, std::span<const std::string> known_tactics) {
    const std::string v = tactic_key(value);
    const std::string* best = nullptr;
    std::size_t best_len = 0;
    for (const auto& name : known_tactics) {
        const std::string k = tactic_key(name);
        if (k.empty()) continue;
        if (v.find(k) != std::string::npos && k.size() > best_len) {
            best = &name;
            best_len = k.size();
        }
    }
    if (!best) return std::nullopt;
    return *best;
}

DecisionOutput parse_decision(std::string_view text, std::span<const std::string> known_tactics) {
    DecisionOutput out;
    out.raw_text = std::string(text);

    if (auto value = extract_field(text, "Current Tactic")) {
        out.current_tactic = match_tactic(*value, known_tactics);
        if (!out.current_tactic) out.violations.push_back({*value, "unknown tactic"});
    }

    if (auto value = extract_field(text, "Priority")) {
        std::optional<ActionToken> named;
        auto scanned = scan_actions(*value);
        if (!scanned.tokens.empty()) {
            named = scanned.tokens.front();
        } else {
            named = match_action(*value);
        }
        if (named && named->group == ActionGroup::Priority) {
            out.priority = named->id;
        } else {
            out.violations.push_back({*value, "priority is not a priority-group action"});
        }
    }

    auto scanned = scan_actions(text);
    out.raw_actions = std::move(scanned.tokens);
    for (auto& v : scanned.rejected) {
        // "<Current Tactic>" / "<Priority>" are field names, not action attempts.
        const std::string body = canonicalize(std::string_view(v.text).substr(1, v.text.size() - 2));
        if (body == "CURRENT TACTIC" || body == "PRIORITY") continue;
        out.violations.push_back(std::move(v));
    }
    return out;
}

}  // namespace hep
