#include "hep/game_data.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "hep/error.hpp"

namespace hep {

namespace {

constexpr std::array<std::string_view, kUnitKinds> kUnitNames{"Probe",    "Zealot", "Stalker",  "Carrier",
                                                              "Zergling", "Roach",  "Hydralisk"};
constexpr std::array<std::string_view, kBuildingKinds> kBuildingNames{
    "Nexus", "Pylon", "Assimilator", "Gateway", "Cybernetics Core", "Forge", "Stargate", "Fleet Beacon"};
constexpr std::array<std::string_view, kTechKinds> kTechNames{
    "Warpgate",           "Ground Weapons Level 1", "Ground Armor Level 1", "Air Weapons Level 1",
    "Air Weapons Level 2", "Air Armor Level 1",     "Air Armor Level 2"};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view name) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == name) return static_cast<Enum>(i);
    }
    return std::nullopt;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

YAML::Node parse_yaml(std::string_view text) {
    try {
        return YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("malformed YAML: ") + e.what());
    }
}

YAML::Node require(const YAML::Node& node, const std::string& key, const std::string& where) {
    YAML::Node child = node[key];
    if (!child) throw ConfigError("missing '" + key + "' in " + where);
    return child;
}

template <typename T>
T get(const YAML::Node& node, const std::string& key, const std::string& where) {
    try {
        return require(node, key, where).as<T>();
    } catch (const YAML::Exception& e) {
        throw ConfigError("bad value for '" + key + "' in " + where + ": " + e.what());
    }
}

template <typename T>
T get_or(const YAML::Node& node, const std::string& key, T fallback, const std::string& where) {
    if (!node[key]) return fallback;
    return get<T>(node, key, where);
}

BuildingKind building_or_throw(const std::string& name, const std::string& where) {
    auto b = building_from_name(name);
    if (!b) throw ConfigError("unknown building '" + name + "' in " + where);
    return *b;
}

std::vector<BuildingKind> building_list(const YAML::Node& node, const std::string& key, const std::string& where) {
    std::vector<BuildingKind> out;
    if (!node[key]) return out;
    for (const auto& item : node[key]) out.push_back(building_or_throw(item.as<std::string>(), where));
    return out;
}

UnitCounts unit_counts(const YAML::Node& node, const std::string& where) {
    UnitCounts counts{};
    if (!node.IsMap()) throw ConfigError("expected a unit map in " + where);
    for (const auto& kv : node) {
        const auto name = kv.first.as<std::string>();
        auto u = unit_from_name(name);
        if (!u || is_player_unit(*u)) throw ConfigError("unknown enemy unit '" + name + "' in " + where);
        counts[idx(*u)] = kv.second.as<int>();
        if (counts[idx(*u)] < 0) throw ConfigError("negative count in " + where);
    }
    return counts;
}

int total(const UnitCounts& c) {
    int n = 0;
    for (int v : c) n += v;
    return n;
}

}  // namespace

std::string_view name_of(UnitKind k) { return kUnitNames[idx(k)]; }
std::string_view name_of(BuildingKind k) { return kBuildingNames[idx(k)]; }
std::string_view name_of(TechKind k) { return kTechNames[idx(k)]; }
std::optional<UnitKind> unit_from_name(std::string_view name) { return lookup<UnitKind>(kUnitNames, name); }
std::optional<BuildingKind> building_from_name(std::string_view name) {
    return lookup<BuildingKind>(kBuildingNames, name);
}
std::optional<TechKind> tech_from_name(std::string_view name) { return lookup<TechKind>(kTechNames, name); }

bool is_player_unit(UnitKind k) {
    return k == UnitKind::Probe || k == UnitKind::Zealot || k == UnitKind::Stalker || k == UnitKind::Carrier;
}

GameDataConfig parse_game_data(std::string_view yaml_text) {
    const YAML::Node root = parse_yaml(yaml_text);
    if (!root.IsMap()) throw ConfigError("game data must be a mapping");
    GameDataConfig c;
    c.tick_seconds = get<int>(root, "tick_seconds", "game data");
    c.time_cap_seconds = get<int>(root, "time_cap_seconds", "game data");
    c.max_supply = get<int>(root, "max_supply", "game data");
    c.max_queue = get_or<int>(root, "max_queue", 5, "game data");

    const auto opening = require(root, "opening", "game data");
    c.opening_minerals = get<int>(opening, "minerals", "opening");
    c.opening_gas = get<int>(opening, "gas", "opening");
    c.opening_probes = get<int>(opening, "probes", "opening");

    const auto income = require(root, "income", "game data");
    c.minerals_per_worker_milli = get<int>(income, "minerals_per_worker_milli", "income");
    c.gas_per_worker_milli = get<int>(income, "gas_per_worker_milli", "income");
    c.mineral_workers_per_nexus = get<int>(income, "mineral_workers_per_nexus", "income");
    c.workers_per_assimilator = get<int>(income, "workers_per_assimilator", "income");
    c.assimilators_per_nexus = get<int>(income, "assimilators_per_nexus", "income");

    const auto supply = require(root, "supply", "game data");
    c.supply_per_nexus = get<int>(supply, "nexus", "supply");
    c.supply_per_pylon = get<int>(supply, "pylon", "supply");

    const auto chrono = require(root, "chronoboost", "game data");
    c.chrono_energy_cost = get<int>(chrono, "energy_cost", "chronoboost");
    c.chrono_energy_regen_milli = get<int>(chrono, "energy_regen_milli", "chronoboost");
    c.chrono_energy_max = get<int>(chrono, "energy_max", "chronoboost");
    c.chrono_start_energy = get<int>(chrono, "start_energy", "chronoboost");
    c.chrono_speed_pct = get<int>(chrono, "speed_pct", "chronoboost");
    c.chrono_duration_seconds = get<int>(chrono, "duration_seconds", "chronoboost");

    const auto scouting = require(root, "scouting", "game data");
    c.scout_travel_seconds = get<int>(scouting, "travel_seconds", "scouting");
    c.scout_visible_seconds = get<int>(scouting, "visible_seconds", "scouting");

    const auto combat = require(root, "combat", "game data");
    c.combat_round_cap = get<int>(combat, "round_cap", "combat");
    c.siege_seconds = get<int>(combat, "siege_seconds", "combat");
    c.hatchery_hp = get<int>(combat, "hatchery_hp", "combat");

    std::array<bool, kUnitKinds> seen_units{};
    for (const auto& node : require(root, "units", "game data")) {
        const auto name = get<std::string>(node, "name", "units");
        auto kind = unit_from_name(name);
        if (!kind) throw ConfigError("unknown unit '" + name + "'");
        const std::string where = "unit " + name;
        UnitSpec& u = c.units[idx(*kind)];
        u.hp = get<int>(node, "hp", where);
        u.power = get<int>(node, "power", where);
        u.air = get<bool>(node, "air", where);
        u.hits_ground = get<bool>(node, "hits_ground", where);
        u.hits_air = get<bool>(node, "hits_air", where);
        if (is_player_unit(*kind)) {
            u.minerals = get<int>(node, "minerals", where);
            u.gas = get<int>(node, "gas", where);
            u.supply = get<int>(node, "supply", where);
            u.build_seconds = get<int>(node, "build_seconds", where);
            u.producer = building_or_throw(get<std::string>(node, "producer", where), where);
            u.requires_buildings = building_list(node, "requires", where);
        }
        seen_units[idx(*kind)] = true;
    }
    for (auto k : kAllUnits) {
        if (!seen_units[idx(k)]) throw ConfigError("game data lacks unit " + std::string(name_of(k)));
    }

    std::array<bool, kBuildingKinds> seen_buildings{};
    for (const auto& node : require(root, "buildings", "game data")) {
        const auto name = get<std::string>(node, "name", "buildings");
        const auto kind = building_or_throw(name, "buildings");
        const std::string where = "building " + name;
        BuildingSpec& b = c.buildings[idx(kind)];
        b.minerals = get<int>(node, "minerals", where);
        b.gas = get<int>(node, "gas", where);
        b.build_seconds = get<int>(node, "build_seconds", where);
        b.hp = get<int>(node, "hp", where);
        b.requires_buildings = building_list(node, "requires", where);
        b.max_count = get_or<int>(node, "max_count", 0, where);
        seen_buildings[idx(kind)] = true;
    }
    for (auto k : kAllBuildings) {
        if (!seen_buildings[idx(k)]) throw ConfigError("game data lacks building " + std::string(name_of(k)));
    }

    std::array<bool, kTechKinds> seen_techs{};
    for (const auto& node : require(root, "research", "game data")) {
        const auto name = get<std::string>(node, "name", "research");
        auto kind = tech_from_name(name);
        if (!kind) throw ConfigError("unknown research '" + name + "'");
        const std::string where = "research " + name;
        TechSpec& t = c.techs[idx(*kind)];
        t.minerals = get<int>(node, "minerals", where);
        t.gas = get<int>(node, "gas", where);
        t.build_seconds = get<int>(node, "build_seconds", where);
        t.producer = building_or_throw(get<std::string>(node, "producer", where), where);
        t.requires_buildings = building_list(node, "requires", where);
        if (node["requires_research"]) {
            for (const auto& r : node["requires_research"]) {
                auto tk = tech_from_name(r.as<std::string>());
                if (!tk) throw ConfigError("unknown research prerequisite in " + where);
                t.requires_techs.push_back(*tk);
            }
        }
        const auto target = get<std::string>(node, "target", where);
        if (target == "ground") {
            t.target = TechTarget::Ground;
        } else if (target == "air") {
            t.target = TechTarget::Air;
        } else if (target == "gateway") {
            t.target = TechTarget::Gateway;
        } else {
            throw ConfigError("target must be ground|air|gateway in " + where);
        }
        t.attack_bonus_pct = get_or<int>(node, "attack_bonus_pct", 0, where);
        t.armor_bonus_pct = get_or<int>(node, "armor_bonus_pct", 0, where);
        t.production_speedup_pct = get_or<int>(node, "production_speedup_pct", 0, where);
        seen_techs[idx(*kind)] = true;
    }
    for (auto k : kAllTechs) {
        if (!seen_techs[idx(k)]) throw ConfigError("game data lacks research " + std::string(name_of(k)));
    }

    validate(c);
    return c;
}

GameDataConfig load_game_data(const std::filesystem::path& path) { return parse_game_data(read_file(path)); }

void validate(const GameDataConfig& c) {
    auto positive = [](int v, const std::string& what) {
        if (v <= 0) throw ConfigError(what + " must be positive");
    };
    positive(c.tick_seconds, "tick_seconds");
    positive(c.time_cap_seconds, "time_cap_seconds");
    positive(c.max_supply, "max_supply");
    positive(c.opening_probes, "opening.probes");
    positive(c.minerals_per_worker_milli, "income.minerals_per_worker_milli");
    positive(c.gas_per_worker_milli, "income.gas_per_worker_milli");
    positive(c.mineral_workers_per_nexus, "income.mineral_workers_per_nexus");
    positive(c.workers_per_assimilator, "income.workers_per_assimilator");
    positive(c.assimilators_per_nexus, "income.assimilators_per_nexus");
    positive(c.supply_per_nexus, "supply.nexus");
    positive(c.supply_per_pylon, "supply.pylon");
    positive(c.chrono_energy_cost, "chronoboost.energy_cost");
    positive(c.chrono_speed_pct, "chronoboost.speed_pct");
    positive(c.chrono_duration_seconds, "chronoboost.duration_seconds");
    positive(c.scout_travel_seconds, "scouting.travel_seconds");
    positive(c.scout_visible_seconds, "scouting.visible_seconds");
    positive(c.combat_round_cap, "combat.round_cap");
    positive(c.siege_seconds, "combat.siege_seconds");
    positive(c.hatchery_hp, "combat.hatchery_hp");
    positive(c.max_queue, "max_queue");
    if (c.opening_minerals < 0 || c.opening_gas < 0) throw ConfigError("opening resources must be >= 0");
    if (c.opening_probes > c.supply_per_nexus) throw ConfigError("opening probes exceed opening supply cap");

    for (auto k : kAllUnits) {
        const auto& u = c.unit(k);
        const std::string n(name_of(k));
        positive(u.hp, n + ".hp");
        if (u.power < 0) throw ConfigError(n + ".power must be >= 0");
        if (!is_player_unit(k)) continue;
        positive(u.minerals, n + ".minerals");
        positive(u.supply, n + ".supply");
        positive(u.build_seconds, n + ".build_seconds");
        if (u.gas < 0) throw ConfigError(n + ".gas must be >= 0");
    }
    for (auto k : kAllBuildings) {
        const auto& b = c.building(k);
        const std::string n(name_of(k));
        positive(b.minerals, n + ".minerals");
        positive(b.build_seconds, n + ".build_seconds");
        positive(b.hp, n + ".hp");
        if (b.gas < 0) throw ConfigError(n + ".gas must be >= 0");
    }
    for (auto k : kAllTechs) {
        const auto& t = c.tech(k);
        const std::string n(name_of(k));
        positive(t.minerals, n + ".minerals");
        positive(t.gas, n + ".gas");
        positive(t.build_seconds, n + ".build_seconds");
    }
}

const Difficulty& DifficultySchedules::at(int level) const {
    for (const auto& d : levels) {
        if (d.level == level) return d;
    }
    throw ConfigError("no difficulty schedule for level " + std::to_string(level));
}

DifficultySchedules parse_difficulty_schedules(std::string_view yaml_text) {
    const YAML::Node root = parse_yaml(yaml_text);
    DifficultySchedules out;
    for (const auto& node : require(root, "levels", "difficulty schedules")) {
        Difficulty d;
        d.level = get<int>(node, "level", "levels");
        const std::string where = "level " + std::to_string(d.level);
        d.name = get<std::string>(node, "name", where);
        d.income_pct = get<int>(node, "income_pct", where);
        d.time_jitter_seconds = get_or<int>(node, "time_jitter_seconds", 0, where);
        d.size_jitter_pct = get_or<int>(node, "size_jitter_pct", 0, where);
        for (const auto& cmd : require(node, "commands", where)) {
            EnemyCommand c;
            c.time_s = get<int>(cmd, "time", where);
            if (cmd["expand"]) {
                c.kind = EnemyCommandKind::Expand;
                c.amount = cmd["expand"].as<int>();
            } else if (cmd["drones"]) {
                c.kind = EnemyCommandKind::Drones;
                c.amount = cmd["drones"].as<int>();
            } else if (cmd["train"]) {
                c.kind = EnemyCommandKind::Train;
                c.units = unit_counts(cmd["train"], where);
            } else if (cmd["attack"]) {
                c.kind = EnemyCommandKind::Attack;
                c.units = unit_counts(cmd["attack"], where);
                c.with_home_army = get_or<bool>(cmd, "with_home_army", false, where);
            } else {
                throw ConfigError("command needs one of expand|drones|train|attack in " + where);
            }
            if (c.time_s < 0) throw ConfigError("negative command time in " + where);
            d.commands.push_back(c);
        }
        std::stable_sort(d.commands.begin(), d.commands.end(),
                         [](const EnemyCommand& a, const EnemyCommand& b) { return a.time_s < b.time_s; });
        if (d.income_pct <= 0) throw ConfigError("income_pct must be positive in " + where);
        out.levels.push_back(std::move(d));
    }
    if (out.levels.empty()) throw ConfigError("no difficulty levels defined");
    std::sort(out.levels.begin(), out.levels.end(),
              [](const Difficulty& a, const Difficulty& b) { return a.level < b.level; });

    // Stronger levels may never be weaker on income or on any wave.
    for (std::size_t i = 1; i < out.levels.size(); ++i) {
        const auto& lo = out.levels[i - 1];
        const auto& hi = out.levels[i];
        if (hi.income_pct < lo.income_pct) {
            throw ConfigError("income_pct decreases from level " + std::to_string(lo.level) + " to " +
                              std::to_string(hi.level));
        }
        std::vector<int> lo_waves, hi_waves;
        for (const auto& c : lo.commands) {
            if (c.kind == EnemyCommandKind::Attack) lo_waves.push_back(total(c.units));
        }
        for (const auto& c : hi.commands) {
            if (c.kind == EnemyCommandKind::Attack) hi_waves.push_back(total(c.units));
        }
        if (hi_waves.size() < lo_waves.size()) {
            throw ConfigError("level " + std::to_string(hi.level) + " has fewer attack waves than level " +
                              std::to_string(lo.level));
        }
        for (std::size_t w = 0; w < lo_waves.size(); ++w) {
            if (hi_waves[w] < lo_waves[w]) {
                throw ConfigError("wave " + std::to_string(w + 1) + " shrinks from level " +
                                  std::to_string(lo.level) + " to " + std::to_string(hi.level));
            }
        }
    }
    return out;
}

DifficultySchedules load_difficulty_schedules(const std::filesystem::path& path) {
    return parse_difficulty_schedules(read_file(path));
}

std::optional<int> parse_difficulty_level(std::string_view text) {
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (s == "4" || s == "hard") return 4;
    if (s == "5" || s == "harder") return 5;
    if (s == "6" || s == "veryhard") return 6;
    if (s == "7" || s == "elite") return 7;
    return std::nullopt;
}

}  // namespace hep
