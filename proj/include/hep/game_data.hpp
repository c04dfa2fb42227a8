#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hep {

enum class UnitKind { Probe, Zealot, Stalker, Carrier, Zergling, Roach, Hydralisk };
enum class BuildingKind { Nexus, Pylon, Assimilator, Gateway, CyberneticsCore, Forge, Stargate, FleetBeacon };
enum class TechKind { Warpgate, GroundWeapons1, GroundArmor1, AirWeapons1, AirWeapons2, AirArmor1, AirArmor2 };

inline constexpr std::size_t kUnitKinds = 7;
inline constexpr std::size_t kBuildingKinds = 8;
inline constexpr std::size_t kTechKinds = 7;

inline constexpr std::array<UnitKind, kUnitKinds> kAllUnits{UnitKind::Probe,    UnitKind::Zealot, UnitKind::Stalker,
                                                            UnitKind::Carrier,  UnitKind::Zergling,
                                                            UnitKind::Roach,    UnitKind::Hydralisk};
inline constexpr std::array<BuildingKind, kBuildingKinds> kAllBuildings{
    BuildingKind::Nexus,           BuildingKind::Pylon, BuildingKind::Assimilator, BuildingKind::Gateway,
    BuildingKind::CyberneticsCore, BuildingKind::Forge, BuildingKind::Stargate,    BuildingKind::FleetBeacon};
inline constexpr std::array<TechKind, kTechKinds> kAllTechs{TechKind::Warpgate,    TechKind::GroundWeapons1,
                                                            TechKind::GroundArmor1, TechKind::AirWeapons1,
                                                            TechKind::AirWeapons2,  TechKind::AirArmor1,
                                                            TechKind::AirArmor2};

constexpr std::size_t idx(UnitKind k) { return static_cast<std::size_t>(k); }
constexpr std::size_t idx(BuildingKind k) { return static_cast<std::size_t>(k); }
constexpr std::size_t idx(TechKind k) { return static_cast<std::size_t>(k); }

// Display names; these are the names the data files, tactic cards and
// observations use.
std::string_view name_of(UnitKind k);
std::string_view name_of(BuildingKind k);
std::string_view name_of(TechKind k);
std::optional<UnitKind> unit_from_name(std::string_view name);
std::optional<BuildingKind> building_from_name(std::string_view name);
std::optional<TechKind> tech_from_name(std::string_view name);

bool is_player_unit(UnitKind k);

struct UnitSpec {
    int minerals = 0;
    int gas = 0;
    int supply = 0;
    int build_seconds = 1;
    BuildingKind producer = BuildingKind::Nexus;
    std::vector<BuildingKind> requires_buildings;
    int hp = 1;
    int power = 0;  // damage per combat round
    bool air = false;
    bool hits_ground = false;
    bool hits_air = false;
};

struct BuildingSpec {
    int minerals = 0;
    int gas = 0;
    int build_seconds = 1;
    int hp = 1;
    std::vector<BuildingKind> requires_buildings;
    int max_count = 0;  // 0 = unlimited
};

enum class TechTarget { Ground, Air, Gateway };

struct TechSpec {
    int minerals = 0;
    int gas = 0;
    int build_seconds = 1;
    BuildingKind producer = BuildingKind::CyberneticsCore;
    std::vector<BuildingKind> requires_buildings;
    std::vector<TechKind> requires_techs;
    TechTarget target = TechTarget::Ground;
    int attack_bonus_pct = 0;
    int armor_bonus_pct = 0;
    int production_speedup_pct = 0;
};

struct GameDataConfig {
    int tick_seconds = 1;
    int time_cap_seconds = 1500;
    int max_supply = 200;

    int opening_minerals = 50;
    int opening_gas = 0;
    int opening_probes = 12;

    // Income in thousandths of a resource unit per worker per game second.
    int minerals_per_worker_milli = 940;
    int gas_per_worker_milli = 940;
    int mineral_workers_per_nexus = 16;
    int workers_per_assimilator = 3;
    int assimilators_per_nexus = 2;

    int supply_per_nexus = 15;
    int supply_per_pylon = 8;

    int chrono_energy_cost = 50;
    int chrono_energy_regen_milli = 788;
    int chrono_energy_max = 200;
    int chrono_start_energy = 50;
    int chrono_speed_pct = 150;
    int chrono_duration_seconds = 20;

    int scout_travel_seconds = 30;
    int scout_visible_seconds = 60;

    int combat_round_cap = 50;
    int siege_seconds = 20;
    int hatchery_hp = 1500;
    int max_queue = 5;

    std::array<UnitSpec, kUnitKinds> units{};
    std::array<BuildingSpec, kBuildingKinds> buildings{};
    std::array<TechSpec, kTechKinds> techs{};

    const UnitSpec& unit(UnitKind k) const { return units[idx(k)]; }
    const BuildingSpec& building(BuildingKind k) const { return buildings[idx(k)]; }
    const TechSpec& tech(TechKind k) const { return techs[idx(k)]; }
};

// Throws ConfigError on any missing field or non-positive cost/duration.
GameDataConfig load_game_data(const std::filesystem::path& path);
GameDataConfig parse_game_data(std::string_view yaml_text);
void validate(const GameDataConfig& config);

using UnitCounts = std::array<int, kUnitKinds>;

enum class EnemyCommandKind { Expand, Drones, Train, Attack };

struct EnemyCommand {
    int time_s = 0;
    EnemyCommandKind kind = EnemyCommandKind::Drones;
    int amount = 0;          // hatcheries for Expand, drones for Drones
    UnitCounts units{};      // Train / Attack composition
    bool with_home_army = false;  // Attack also sends everything at home
};

struct Difficulty {
    int level = 4;
    std::string name = "Hard";
    int income_pct = 100;          // scales Train counts
    int time_jitter_seconds = 0;   // seed-driven shift of every command, +/-
    int size_jitter_pct = 0;       // seed-driven growth of Attack sizes, 0..pct
    std::vector<EnemyCommand> commands;  // sorted by time
};

struct DifficultySchedules {
    std::vector<Difficulty> levels;  // ascending level

    const Difficulty& at(int level) const;  // throws ConfigError
};

DifficultySchedules load_difficulty_schedules(const std::filesystem::path& path);
DifficultySchedules parse_difficulty_schedules(std::string_view yaml_text);

// Accepts 4..7 or hard|harder|veryhard|elite (case-insensitive).
std::optional<int> parse_difficulty_level(std::string_view text);

}  // namespace hep
