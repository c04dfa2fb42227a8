#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hep/action_grammar.hpp"
#include "hep/game_data.hpp"

namespace hep {

enum class Outcome { Win, Loss, Draw };
std::string_view to_string(Outcome outcome);

struct Job {
    enum class Kind { Unit, Research };
    Kind kind = Kind::Unit;
    UnitKind unit = UnitKind::Probe;
    TechKind tech = TechKind::Warpgate;
    std::int64_t progress_milli = 0;
    std::int64_t total_milli = 1;

    friend bool operator==(const Job&, const Job&) = default;
};

struct Building {
    int id = 0;
    BuildingKind kind = BuildingKind::Nexus;
    std::int64_t progress_milli = 0;
    std::int64_t total_milli = 1;
    int hp = 1;
    std::vector<Job> queue;  // only the front job progresses
    int energy_milli = 0;    // Nexus only
    int chrono_seconds_left = 0;

    bool complete() const { return progress_milli >= total_milli; }
    friend bool operator==(const Building&, const Building&) = default;
};

struct EnemyState {
    int level = 4;
    std::size_t next_command = 0;
    std::vector<int> hatchery_hp;  // one entry per standing base
    int drones = 0;
    UnitCounts home_army{};
    int waves_sent = 0;

    friend bool operator==(const EnemyState&, const EnemyState&) = default;
};

struct GameEvent {
    int time_s = 0;
    std::string text;

    friend bool operator==(const GameEvent&, const GameEvent&) = default;
};

// Resources are held in thousandths so income accrues exactly in integers.
struct GameState {
    int tick = 0;
    int time_s = 0;
    std::int64_t minerals_milli = 0;
    std::int64_t gas_milli = 0;
    std::int64_t minerals_collected_milli = 0;
    std::int64_t gas_collected_milli = 0;
    std::int64_t minerals_spent_milli = 0;
    std::int64_t gas_spent_milli = 0;
    int supply_used = 0;  // includes units waiting in production queues
    int supply_cap = 0;
    std::vector<Building> buildings;
    UnitCounts units{};
    std::array<bool, kTechKinds> research_done{};
    EnemyState enemy;
    int scout_arrival_s = -1;
    int intel_until_s = -1;
    std::vector<GameEvent> events;  // most recent last, bounded
    std::uint64_t rng_seed = 0;
    std::optional<Outcome> outcome;
    int next_building_id = 1;

    UnitCounts units_trained{};
    UnitCounts units_lost{};
    int research_completed = 0;
    int attacks_launched = 0;
    int actions_skipped = 0;

    std::int64_t minerals() const { return minerals_milli / 1000; }
    std::int64_t gas() const { return gas_milli / 1000; }
    std::int64_t minerals_collected() const { return minerals_collected_milli / 1000; }
    std::int64_t gas_collected() const { return gas_collected_milli / 1000; }

    int count(BuildingKind kind, bool complete_only) const;
    // 1.0 when done, the front-job fraction when in progress, 0 otherwise.
    double research_fraction(TechKind tech) const;
    int research_percent(TechKind tech) const;  // floor, -1 when not started
    bool research_queued(TechKind tech) const;
    int queued(UnitKind unit) const;
    int worker_supply(const GameDataConfig& config) const;
    int army_supply(const GameDataConfig& config) const;

    friend bool operator==(const GameState&, const GameState&) = default;
};

// Canonical byte serialization and its SHA-256, used for determinism checks.
std::string serialize(const GameState& state);
std::string state_digest(const GameState& state);

struct BuildingLine {
    int complete = 0;
    int in_progress = 0;
    friend bool operator==(const BuildingLine&, const BuildingLine&) = default;
};

struct EnemyIntel {
    int bases = 0;
    int drones = 0;
    UnitCounts army{};
    friend bool operator==(const EnemyIntel&, const EnemyIntel&) = default;
};

// Everything the agent is allowed to see; the text rendering is a pure
// function of this.
struct ObservationSnapshot {
    int time_s = 0;
    int minerals = 0;
    int gas = 0;
    int minerals_collected = 0;
    int gas_collected = 0;
    int supply_used = 0;
    int supply_cap = 0;
    int worker_supply = 0;
    int army_supply = 0;
    int mineral_workers = 0;
    int gas_workers = 0;
    std::array<BuildingLine, kBuildingKinds> buildings{};
    int chrono_ready = 0;
    UnitCounts units{};
    UnitCounts in_production{};
    std::array<int, kTechKinds> research_percent = {-1, -1, -1, -1, -1, -1, -1};  // -1: not started
    bool scout_en_route = false;
    std::optional<EnemyIntel> enemy;
    std::vector<std::string> events;  // "mm:ss text"

    friend bool operator==(const ObservationSnapshot&, const ObservationSnapshot&) = default;
};

struct Observation {
    std::string text;
    ObservationSnapshot snapshot;
};

std::string format_clock(int seconds);  // "mm:ss"

std::string render_snapshot(const ObservationSnapshot& snapshot);
// Inverse of render_snapshot; absent when the text is not an observation.
std::optional<ObservationSnapshot> parse_observation(std::string_view text);

struct Army {
    UnitCounts counts{};
    int ground_attack_pct = 0;
    int ground_armor_pct = 0;
    int air_attack_pct = 0;
    int air_armor_pct = 0;
};

struct CombatResult {
    UnitCounts attacker_losses{};
    UnitCounts defender_losses{};
    int rounds = 0;
};

// Aggregate power-exchange rounds. Each round both sides deal their summed
// power, split over the targets they can hit in proportion to remaining hit
// points; air units only take damage from units that hit air.
CombatResult resolve_combat(const Army& attacker, const Army& defender, const GameDataConfig& config);

struct OpponentCommand {
    std::size_t index = 0;  // position in the difficulty schedule
    EnemyCommand command;   // with the seed's jitter applied
};

// Seed-dependent jitter for schedule entry `index`.
EnemyCommand jittered_command(const Difficulty& difficulty, std::size_t index, std::uint64_t seed);

// Commands due at state.time_s, starting from the script position.
std::vector<OpponentCommand> opponent_actions(const GameState& state, const Difficulty& difficulty);

std::optional<Outcome> is_terminated(const GameState& state, const GameDataConfig& config);

class Simulator {
public:
    Simulator(GameDataConfig config, Difficulty difficulty);

    std::pair<GameState, Observation> reset(std::uint64_t seed) const;
    // Throws GameOver if the state already has an outcome.
    GameState step(GameState state, std::span<const ActionToken> actions, int n_ticks = 1) const;
    Observation render_observation(const GameState& state) const;
    std::optional<Outcome> is_terminated(const GameState& state) const;
    Army player_army(const GameState& state) const;

    const GameDataConfig& config() const { return config_; }
    const Difficulty& difficulty() const { return difficulty_; }

private:
    void apply_action(GameState& s, const ActionToken& action) const;
    void advance_tick(GameState& s) const;
    void apply_opponent(GameState& s, const EnemyCommand& command) const;
    void defend(GameState& s, const UnitCounts& wave) const;
    void attack(GameState& s) const;
    void refresh_supply(GameState& s) const;

    GameDataConfig config_;
    Difficulty difficulty_;
};

ObservationSnapshot snapshot_of(const GameState& state, const GameDataConfig& config);

}  // namespace hep
