#include "hep/macro_sim.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>

#include "hep/digest.hpp"
#include "hep/error.hpp"

namespace hep {

namespace {

constexpr std::size_t kMaxEvents = 32;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void log_event(GameState& s, std::string text) {
    s.events.push_back({s.time_s, std::move(text)});
    if (s.events.size() > kMaxEvents) s.events.erase(s.events.begin());
}

bool affordable(const GameState& s, int minerals, int gas) {
    return s.minerals_milli >= std::int64_t{minerals} * 1000 && s.gas_milli >= std::int64_t{gas} * 1000;
}

void spend(GameState& s, int minerals, int gas) {
    s.minerals_milli -= std::int64_t{minerals} * 1000;
    s.gas_milli -= std::int64_t{gas} * 1000;
    s.minerals_spent_milli += std::int64_t{minerals} * 1000;
    s.gas_spent_milli += std::int64_t{gas} * 1000;
}

std::optional<BuildingKind> missing_building(const GameState& s, const std::vector<BuildingKind>& required) {
    for (auto b : required) {
        if (s.count(b, true) == 0) return b;
    }
    return std::nullopt;
}

std::optional<UnitKind> unit_for(ActionId id) {
    switch (id) {
        case ActionId::TrainProbe: return UnitKind::Probe;
        case ActionId::TrainZealot: return UnitKind::Zealot;
        case ActionId::TrainStalker: return UnitKind::Stalker;
        case ActionId::TrainCarrier: return UnitKind::Carrier;
        default: return std::nullopt;
    }
}

std::optional<BuildingKind> building_for(ActionId id) {
    switch (id) {
        case ActionId::BuildPylon: return BuildingKind::Pylon;
        case ActionId::BuildNexus: return BuildingKind::Nexus;
        case ActionId::BuildAssimilator: return BuildingKind::Assimilator;
        case ActionId::BuildGateway: return BuildingKind::Gateway;
        case ActionId::BuildCyberneticsCore: return BuildingKind::CyberneticsCore;
        case ActionId::BuildForge: return BuildingKind::Forge;
        case ActionId::BuildStargate: return BuildingKind::Stargate;
        case ActionId::BuildFleetBeacon: return BuildingKind::FleetBeacon;
        default: return std::nullopt;
    }
}

std::optional<TechKind> tech_for(ActionId id) {
    switch (id) {
        case ActionId::ResearchWarpgate: return TechKind::Warpgate;
        case ActionId::ResearchGroundWeaponLevel1: return TechKind::GroundWeapons1;
        case ActionId::ResearchGroundArmorLevel1: return TechKind::GroundArmor1;
        case ActionId::ResearchAirWeaponLevel1: return TechKind::AirWeapons1;
        case ActionId::ResearchAirWeaponLevel2: return TechKind::AirWeapons2;
        case ActionId::ResearchAirArmorLevel1: return TechKind::AirArmor1;
        case ActionId::ResearchAirArmorLevel2: return TechKind::AirArmor2;
        default: return std::nullopt;
    }
}

int total_units(const UnitCounts& c) {
    int n = 0;
    for (int v : c) n += v;
    return n;
}

std::string describe(const UnitCounts& c) {
    std::string out;
    for (auto k : kAllUnits) {
        if (c[idx(k)] == 0) continue;
        if (!out.empty()) out += ", ";
        out += std::to_string(c[idx(k)]) + " " + std::string(name_of(k));
    }
    return out.empty() ? "nothing" : out;
}

}  // namespace

std::string_view to_string(Outcome outcome) {
    switch (outcome) {
        case Outcome::Win: return "win";
        case Outcome::Loss: return "loss";
        case Outcome::Draw: return "draw";
    }
    return "draw";
}

int GameState::count(BuildingKind kind, bool complete_only) const {
    int n = 0;
    for (const auto& b : buildings) {
        if (b.kind == kind && (!complete_only || b.complete())) ++n;
    }
    return n;
}

double GameState::research_fraction(TechKind tech) const {
    if (research_done[idx(tech)]) return 1.0;
    for (const auto& b : buildings) {
        if (!b.queue.empty() && b.queue.front().kind == Job::Kind::Research && b.queue.front().tech == tech) {
            return static_cast<double>(b.queue.front().progress_milli) / static_cast<double>(b.queue.front().total_milli);
        }
    }
    return 0.0;
}

int GameState::research_percent(TechKind tech) const {
    if (research_done[idx(tech)]) return 100;
    for (const auto& b : buildings) {
        for (const auto& j : b.queue) {
            if (j.kind == Job::Kind::Research && j.tech == tech) {
                return static_cast<int>(j.progress_milli * 100 / j.total_milli);
            }
        }
    }
    return -1;
}

bool GameState::research_queued(TechKind tech) const {
    for (const auto& b : buildings) {
        for (const auto& j : b.queue) {
            if (j.kind == Job::Kind::Research && j.tech == tech) return true;
        }
    }
    return false;
}

int GameState::queued(UnitKind unit) const {
    int n = 0;
    for (const auto& b : buildings) {
        for (const auto& j : b.queue) {
            if (j.kind == Job::Kind::Unit && j.unit == unit) ++n;
        }
    }
    return n;
}

int GameState::worker_supply(const GameDataConfig& config) const {
    return units[idx(UnitKind::Probe)] * config.unit(UnitKind::Probe).supply;
}

int GameState::army_supply(const GameDataConfig& config) const {
    int n = 0;
    for (auto k : {UnitKind::Zealot, UnitKind::Stalker, UnitKind::Carrier}) n += units[idx(k)] * config.unit(k).supply;
    return n;
}

std::string serialize(const GameState& s) {
    using nlohmann::json;
    json j;
    j["tick"] = s.tick;
    j["time_s"] = s.time_s;
    j["minerals_milli"] = s.minerals_milli;
    j["gas_milli"] = s.gas_milli;
    j["minerals_collected_milli"] = s.minerals_collected_milli;
    j["gas_collected_milli"] = s.gas_collected_milli;
    j["minerals_spent_milli"] = s.minerals_spent_milli;
    j["gas_spent_milli"] = s.gas_spent_milli;
    j["supply_used"] = s.supply_used;
    j["supply_cap"] = s.supply_cap;
    json buildings = json::array();
    for (const auto& b : s.buildings) {
        json queue = json::array();
        for (const auto& q : b.queue) {
            queue.push_back({q.kind == Job::Kind::Unit ? name_of(q.unit) : name_of(q.tech), q.progress_milli,
                             q.total_milli});
        }
        buildings.push_back({b.id, name_of(b.kind), b.progress_milli, b.total_milli, b.hp, queue, b.energy_milli,
                             b.chrono_seconds_left});
    }
    j["buildings"] = buildings;
    j["units"] = s.units;
    j["research_done"] = s.research_done;
    j["enemy"] = {s.enemy.level,       s.enemy.next_command, s.enemy.hatchery_hp,
                  s.enemy.drones,      s.enemy.home_army,    s.enemy.waves_sent};
    j["scout"] = {s.scout_arrival_s, s.intel_until_s};
    json events = json::array();
    for (const auto& e : s.events) events.push_back({e.time_s, e.text});
    j["events"] = events;
    j["rng_seed"] = s.rng_seed;
    j["outcome"] = s.outcome ? std::string(to_string(*s.outcome)) : std::string();
    j["next_building_id"] = s.next_building_id;
    j["units_trained"] = s.units_trained;
    j["units_lost"] = s.units_lost;
    j["research_completed"] = s.research_completed;
    j["attacks_launched"] = s.attacks_launched;
    j["actions_skipped"] = s.actions_skipped;
    return j.dump();
}

std::string state_digest(const GameState& state) { return sha256_hex(serialize(state)); }

// ---------------------------------------------------------------------------
// Combat

CombatResult resolve_combat(const Army& attacker, const Army& defender, const GameDataConfig& config) {
    struct Side {
        const Army* army;
        std::array<std::int64_t, kUnitKinds> hp_left{};
        UnitCounts alive{};
    };
    std::array<Side, 2> sides{Side{&attacker, {}, {}}, Side{&defender, {}, {}}};
    for (auto& side : sides) {
        for (auto k : kAllUnits) {
            const int n = std::max(0, side.army->counts[idx(k)]);
            side.alive[idx(k)] = n;
            side.hp_left[idx(k)] = std::int64_t{n} * config.unit(k).hp;
        }
    }

    auto attack_pct = [&](const Army& a, UnitKind k) {
        return config.unit(k).air ? a.air_attack_pct : a.ground_attack_pct;
    };
    auto armor_pct = [&](const Army& a, UnitKind k) {
        return std::min(90, config.unit(k).air ? a.air_armor_pct : a.ground_armor_pct);
    };
    auto can_hit = [&](UnitKind shooter, UnitKind target) {
        return config.unit(target).air ? config.unit(shooter).hits_air : config.unit(shooter).hits_ground;
    };

    CombatResult result;
    for (int round = 0; round < config.combat_round_cap; ++round) {
        if (total_units(sides[0].alive) == 0 || total_units(sides[1].alive) == 0) break;

        std::array<std::array<std::int64_t, kUnitKinds>, 2> incoming{};
        for (int from = 0; from < 2; ++from) {
            const Side& src = sides[from];
            const Side& dst = sides[1 - from];
            for (auto shooter : kAllUnits) {
                const int n = src.alive[idx(shooter)];
                if (n == 0 || config.unit(shooter).power == 0) continue;
                const std::int64_t damage =
                    std::int64_t{n} * config.unit(shooter).power * (100 + attack_pct(*src.army, shooter)) / 100;
                std::int64_t pool = 0;
                for (auto target : kAllUnits) {
                    if (dst.alive[idx(target)] > 0 && can_hit(shooter, target)) pool += dst.hp_left[idx(target)];
                }
                if (pool == 0) continue;
                for (auto target : kAllUnits) {
                    if (dst.alive[idx(target)] > 0 && can_hit(shooter, target)) {
                        incoming[1 - from][idx(target)] += damage * dst.hp_left[idx(target)] / pool;
                    }
                }
            }
        }

        bool any = false;
        for (int side = 0; side < 2; ++side) {
            Side& s = sides[side];
            for (auto k : kAllUnits) {
                std::int64_t dmg = incoming[side][idx(k)] * (100 - armor_pct(*s.army, k)) / 100;
                if (dmg <= 0) continue;
                any = true;
                s.hp_left[idx(k)] = std::max<std::int64_t>(0, s.hp_left[idx(k)] - dmg);
                const std::int64_t hp = config.unit(k).hp;
                s.alive[idx(k)] = static_cast<int>((s.hp_left[idx(k)] + hp - 1) / hp);
            }
        }
        ++result.rounds;
        if (!any) break;
    }

    for (auto k : kAllUnits) {
        result.attacker_losses[idx(k)] = std::max(0, attacker.counts[idx(k)]) - sides[0].alive[idx(k)];
        result.defender_losses[idx(k)] = std::max(0, defender.counts[idx(k)]) - sides[1].alive[idx(k)];
    }
    return result;
}

// ---------------------------------------------------------------------------
// Opponent script

EnemyCommand jittered_command(const Difficulty& difficulty, std::size_t index, std::uint64_t seed) {
    EnemyCommand c = difficulty.commands.at(index);
    const std::uint64_t r = splitmix64(seed * 0x100000001b3ULL + index + 1);
    if (c.time_s > 0 && difficulty.time_jitter_seconds > 0) {
        const int span = 2 * difficulty.time_jitter_seconds + 1;
        const int shift = static_cast<int>(r % static_cast<std::uint64_t>(span)) - difficulty.time_jitter_seconds;
        c.time_s = std::max(1, c.time_s + shift);
    }
    if (c.kind == EnemyCommandKind::Attack && difficulty.size_jitter_pct > 0) {
        const int grow = static_cast<int>((r >> 20) % static_cast<std::uint64_t>(difficulty.size_jitter_pct + 1));
        for (auto& n : c.units) n = n * (100 + grow) / 100;
    }
    return c;
}

std::vector<OpponentCommand> opponent_actions(const GameState& state, const Difficulty& difficulty) {
    std::vector<OpponentCommand> out;
    for (std::size_t i = state.enemy.next_command; i < difficulty.commands.size(); ++i) {
        EnemyCommand c = jittered_command(difficulty, i, state.rng_seed);
        if (c.time_s > state.time_s) break;
        out.push_back({i, c});
    }
    return out;
}

std::optional<Outcome> is_terminated(const GameState& state, const GameDataConfig& config) {
    if (state.enemy.hatchery_hp.empty()) return Outcome::Win;
    if (state.count(BuildingKind::Nexus, false) == 0) return Outcome::Loss;
    if (state.time_s >= config.time_cap_seconds) return Outcome::Draw;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Simulator

Simulator::Simulator(GameDataConfig config, Difficulty difficulty)
    : config_(std::move(config)), difficulty_(std::move(difficulty)) {
    validate(config_);
}

std::pair<GameState, Observation> Simulator::reset(std::uint64_t seed) const {
    GameState s;
    s.rng_seed = seed;
    s.minerals_milli = std::int64_t{config_.opening_minerals} * 1000;
    s.gas_milli = std::int64_t{config_.opening_gas} * 1000;
    s.minerals_collected_milli = s.minerals_milli;
    s.gas_collected_milli = s.gas_milli;

    Building nexus;
    nexus.id = s.next_building_id++;
    nexus.kind = BuildingKind::Nexus;
    nexus.total_milli = std::int64_t{config_.building(BuildingKind::Nexus).build_seconds} * 1000;
    nexus.progress_milli = nexus.total_milli;
    nexus.hp = config_.building(BuildingKind::Nexus).hp;
    nexus.energy_milli = config_.chrono_start_energy * 1000;
    s.buildings.push_back(nexus);
    s.units[idx(UnitKind::Probe)] = config_.opening_probes;

    s.enemy.level = difficulty_.level;
    s.enemy.hatchery_hp.push_back(config_.hatchery_hp);
    s.enemy.drones = config_.opening_probes;
    refresh_supply(s);
    Observation obs = render_observation(s);
    return {std::move(s), std::move(obs)};
}

void Simulator::refresh_supply(GameState& s) const {
    const int cap = config_.supply_per_nexus * s.count(BuildingKind::Nexus, true) +
                    config_.supply_per_pylon * s.count(BuildingKind::Pylon, true);
    s.supply_cap = std::min(cap, config_.max_supply);
    int used = 0;
    for (auto k : kAllUnits) {
        if (is_player_unit(k)) used += (s.units[idx(k)] + s.queued(k)) * config_.unit(k).supply;
    }
    s.supply_used = used;
}

Army Simulator::player_army(const GameState& s) const {
    Army a;
    for (auto k : {UnitKind::Zealot, UnitKind::Stalker, UnitKind::Carrier}) a.counts[idx(k)] = s.units[idx(k)];
    for (auto t : kAllTechs) {
        if (!s.research_done[idx(t)]) continue;
        const auto& spec = config_.tech(t);
        if (spec.target == TechTarget::Ground) {
            a.ground_attack_pct += spec.attack_bonus_pct;
            a.ground_armor_pct += spec.armor_bonus_pct;
        } else if (spec.target == TechTarget::Air) {
            a.air_attack_pct += spec.attack_bonus_pct;
            a.air_armor_pct += spec.armor_bonus_pct;
        }
    }
    return a;
}

GameState Simulator::step(GameState s, std::span<const ActionToken> actions, int n_ticks) const {
    if (s.outcome) throw GameOver();
    for (const auto& a : actions) {
        apply_action(s, a);
        if ((s.outcome = is_terminated(s))) return s;
    }
    for (int i = 0; i < n_ticks; ++i) {
        advance_tick(s);
        if ((s.outcome = is_terminated(s))) break;
    }
    return s;
}

void Simulator::apply_action(GameState& s, const ActionToken& action) const {
    auto skip = [&](const std::string& reason) {
        ++s.actions_skipped;
        log_event(s, "Skipped " + std::string(action.surface) + ": " + reason);
    };

    if (action.id == ActionId::EmptyAction) return;

    if (auto unit = unit_for(action.id)) {
        const auto& spec = config_.unit(*unit);
        if (auto missing = missing_building(s, spec.requires_buildings)) {
            return skip("requires " + std::string(name_of(*missing)));
        }
        Building* producer = nullptr;
        for (auto& b : s.buildings) {
            if (b.kind != spec.producer || !b.complete()) continue;
            if (static_cast<int>(b.queue.size()) >= config_.max_queue) continue;
            if (!producer || b.queue.size() < producer->queue.size()) producer = &b;
        }
        if (!producer) {
            if (s.count(spec.producer, true) == 0) return skip("requires " + std::string(name_of(spec.producer)));
            return skip("production queues full");
        }
        if (!affordable(s, spec.minerals, spec.gas)) return skip("not enough resources");
        if (s.supply_used + spec.supply > s.supply_cap) return skip("not enough supply");
        spend(s, spec.minerals, spec.gas);
        Job job;
        job.kind = Job::Kind::Unit;
        job.unit = *unit;
        std::int64_t total = std::int64_t{spec.build_seconds} * 1000;
        if (spec.producer == BuildingKind::Gateway) {
            for (auto t : kAllTechs) {
                const auto& ts = config_.tech(t);
                if (s.research_done[idx(t)] && ts.target == TechTarget::Gateway) {
                    total = total * (100 - ts.production_speedup_pct) / 100;
                }
            }
        }
        job.total_milli = std::max<std::int64_t>(1000, total);
        producer->queue.push_back(job);
        s.supply_used += spec.supply;
        return;
    }

    if (auto kind = building_for(action.id)) {
        const auto& spec = config_.building(*kind);
        if (auto missing = missing_building(s, spec.requires_buildings)) {
            return skip("requires " + std::string(name_of(*missing)));
        }
        if (spec.max_count > 0 && s.count(*kind, false) >= spec.max_count) return skip("building limit reached");
        if (*kind == BuildingKind::Assimilator &&
            s.count(BuildingKind::Assimilator, false) >=
                config_.assimilators_per_nexus * s.count(BuildingKind::Nexus, false)) {
            return skip("no free geyser");
        }
        if (s.units[idx(UnitKind::Probe)] == 0) return skip("no Probe available");
        if (!affordable(s, spec.minerals, spec.gas)) return skip("not enough resources");
        spend(s, spec.minerals, spec.gas);
        Building b;
        b.id = s.next_building_id++;
        b.kind = *kind;
        b.total_milli = std::int64_t{spec.build_seconds} * 1000;
        b.hp = spec.hp;
        s.buildings.push_back(b);
        return;
    }

    if (auto tech = tech_for(action.id)) {
        const auto& spec = config_.tech(*tech);
        if (s.research_done[idx(*tech)]) return skip("already researched");
        if (s.research_queued(*tech)) return skip("already in progress");
        if (auto missing = missing_building(s, spec.requires_buildings)) {
            return skip("requires " + std::string(name_of(*missing)));
        }
        for (auto t : spec.requires_techs) {
            if (!s.research_done[idx(t)]) return skip("requires " + std::string(name_of(t)));
        }
        Building* producer = nullptr;
        for (auto& b : s.buildings) {
            if (b.kind != spec.producer || !b.complete()) continue;
            if (static_cast<int>(b.queue.size()) >= config_.max_queue) continue;
            if (!producer || b.queue.size() < producer->queue.size()) producer = &b;
        }
        if (!producer) return skip("requires idle " + std::string(name_of(spec.producer)));
        if (!affordable(s, spec.minerals, spec.gas)) return skip("not enough resources");
        spend(s, spec.minerals, spec.gas);
        Job job;
        job.kind = Job::Kind::Research;
        job.tech = *tech;
        job.total_milli = std::int64_t{spec.build_seconds} * 1000;
        producer->queue.push_back(job);
        return;
    }

    switch (action.id) {
        case ActionId::ChronoboostNexus: {
            Building* caster = nullptr;
            for (auto& b : s.buildings) {
                if (b.kind == BuildingKind::Nexus && b.complete() &&
                    b.energy_milli >= config_.chrono_energy_cost * 1000 &&
                    (!caster || b.energy_milli > caster->energy_milli)) {
                    caster = &b;
                }
            }
            if (!caster) return skip("no Nexus with enough energy");
            Building* target = nullptr;
            int best_rank = 99;
            constexpr std::array kPreference{BuildingKind::Stargate, BuildingKind::CyberneticsCore,
                                             BuildingKind::Forge, BuildingKind::Gateway, BuildingKind::Nexus};
            for (auto& b : s.buildings) {
                if (!b.complete() || b.queue.empty() || b.chrono_seconds_left > 0) continue;
                const auto it = std::find(kPreference.begin(), kPreference.end(), b.kind);
                if (it == kPreference.end()) continue;
                const int rank = static_cast<int>(it - kPreference.begin());
                if (rank < best_rank) {
                    best_rank = rank;
                    target = &b;
                }
            }
            if (!target) return skip("no active production to boost");
            caster->energy_milli -= config_.chrono_energy_cost * 1000;
            target->chrono_seconds_left = config_.chrono_duration_seconds;
            return;
        }
        case ActionId::ScoutWithProbe:
            if (s.units[idx(UnitKind::Probe)] == 0) return skip("no Probe available");
            if (s.scout_arrival_s >= 0) return skip("scout already en route");
            s.scout_arrival_s = s.time_s + config_.scout_travel_seconds;
            return;
        case ActionId::Attack:
            if (s.army_supply(config_) == 0) return skip("no army");
            attack(s);
            return;
        default: return;
    }
}

void Simulator::attack(GameState& s) const {
    ++s.attacks_launched;
    const Army mine = player_army(s);
    Army theirs;
    theirs.counts = s.enemy.home_army;
    const CombatResult r = resolve_combat(mine, theirs, config_);
    for (auto k : kAllUnits) {
        s.units[idx(k)] -= r.attacker_losses[idx(k)];
        s.units_lost[idx(k)] += r.attacker_losses[idx(k)];
        s.enemy.home_army[idx(k)] -= r.defender_losses[idx(k)];
    }
    std::string text = "Attack: lost " + describe(r.attacker_losses) + ", killed " + describe(r.defender_losses);

    const Army survivors = player_army(s);
    std::int64_t siege = 0;
    for (auto k : kAllUnits) {
        const auto& u = config_.unit(k);
        if (!u.hits_ground || survivors.counts[idx(k)] == 0) continue;
        const int pct = u.air ? survivors.air_attack_pct : survivors.ground_attack_pct;
        siege += std::int64_t{survivors.counts[idx(k)]} * u.power * (100 + pct) / 100 * config_.siege_seconds;
    }
    if (total_units(s.enemy.home_army) == 0 && siege > 0) {
        int destroyed = 0;
        while (siege > 0 && !s.enemy.hatchery_hp.empty()) {
            int& hp = s.enemy.hatchery_hp.back();
            const std::int64_t dealt = std::min<std::int64_t>(hp, siege);
            hp -= static_cast<int>(dealt);
            siege -= dealt;
            if (hp <= 0) {
                s.enemy.hatchery_hp.pop_back();
                ++destroyed;
            }
        }
        text += ", destroyed " + std::to_string(destroyed) + " enemy base(s)";
    }
    refresh_supply(s);
    log_event(s, text);
}

void Simulator::defend(GameState& s, const UnitCounts& wave) const {
    Army theirs;
    theirs.counts = wave;
    const CombatResult r = resolve_combat(theirs, player_army(s), config_);
    UnitCounts survivors = wave;
    for (auto k : kAllUnits) {
        survivors[idx(k)] -= r.attacker_losses[idx(k)];
        s.units[idx(k)] -= r.defender_losses[idx(k)];
        s.units_lost[idx(k)] += r.defender_losses[idx(k)];
    }
    std::string text = "Enemy attack (" + describe(wave) + "): lost " + describe(r.defender_losses) + ", killed " +
                       describe(r.attacker_losses);

    std::int64_t siege = 0;
    for (auto k : kAllUnits) {
        const auto& u = config_.unit(k);
        if (u.hits_ground) siege += std::int64_t{survivors[idx(k)]} * u.power * config_.siege_seconds;
    }
    // Survivors raze the newest bases first; a fallen base takes its workers.
    int destroyed = 0;
    while (siege > 0) {
        auto it = std::find_if(s.buildings.rbegin(), s.buildings.rend(),
                               [](const Building& b) { return b.kind == BuildingKind::Nexus; });
        if (it == s.buildings.rend()) break;
        const std::int64_t dealt = std::min<std::int64_t>(it->hp, siege);
        it->hp -= static_cast<int>(dealt);
        siege -= dealt;
        if (it->hp <= 0) {
            s.buildings.erase(std::next(it).base());
            ++destroyed;
            const int killed = std::min(s.units[idx(UnitKind::Probe)], config_.mineral_workers_per_nexus);
            s.units[idx(UnitKind::Probe)] -= killed;
            s.units_lost[idx(UnitKind::Probe)] += killed;
        }
    }
    if (destroyed > 0) text += ", lost " + std::to_string(destroyed) + " Nexus";
    for (auto k : kAllUnits) s.enemy.home_army[idx(k)] += survivors[idx(k)];

    refresh_supply(s);
    // Supply can exceed the cap after a Nexus falls; the displaced units die.
    for (auto k : {UnitKind::Probe, UnitKind::Zealot, UnitKind::Stalker, UnitKind::Carrier}) {
        while (s.supply_used > s.supply_cap && s.units[idx(k)] > 0) {
            --s.units[idx(k)];
            ++s.units_lost[idx(k)];
            s.supply_used -= config_.unit(k).supply;
        }
    }
    while (s.supply_used > s.supply_cap) {
        bool removed = false;
        for (auto& b : s.buildings) {
            if (!b.queue.empty() && b.queue.back().kind == Job::Kind::Unit) {
                s.supply_used -= config_.unit(b.queue.back().unit).supply;
                b.queue.pop_back();
                removed = true;
                break;
            }
        }
        if (!removed) break;
    }
    log_event(s, text);
}

void Simulator::apply_opponent(GameState& s, const EnemyCommand& c) const {
    switch (c.kind) {
        case EnemyCommandKind::Expand:
            for (int i = 0; i < c.amount; ++i) s.enemy.hatchery_hp.push_back(config_.hatchery_hp);
            break;
        case EnemyCommandKind::Drones: s.enemy.drones += c.amount; break;
        case EnemyCommandKind::Train:
            for (auto k : kAllUnits) s.enemy.home_army[idx(k)] += c.units[idx(k)] * difficulty_.income_pct / 100;
            break;
        case EnemyCommandKind::Attack: {
            UnitCounts wave = c.units;
            if (c.with_home_army) {
                for (auto k : kAllUnits) wave[idx(k)] += s.enemy.home_army[idx(k)];
                s.enemy.home_army = {};
            }
            ++s.enemy.waves_sent;
            defend(s, wave);
            break;
        }
    }
}

void Simulator::advance_tick(GameState& s) const {
    const int dt = config_.tick_seconds;

    for (const auto& oc : opponent_actions(s, difficulty_)) {
        apply_opponent(s, oc.command);
        s.enemy.next_command = oc.index + 1;
        if (hep::is_terminated(s, config_)) {
            s.time_s += dt;
            ++s.tick;
            return;
        }
    }

    // Income from the workforce at the start of the tick.
    const int workers = s.units[idx(UnitKind::Probe)];
    const int gas_workers =
        std::min(workers, config_.workers_per_assimilator * s.count(BuildingKind::Assimilator, true));
    const int mineral_workers =
        std::min(workers - gas_workers, config_.mineral_workers_per_nexus * s.count(BuildingKind::Nexus, true));
    const std::int64_t minerals = std::int64_t{mineral_workers} * config_.minerals_per_worker_milli * dt;
    const std::int64_t gas = std::int64_t{gas_workers} * config_.gas_per_worker_milli * dt;
    s.minerals_milli += minerals;
    s.minerals_collected_milli += minerals;
    s.gas_milli += gas;
    s.gas_collected_milli += gas;

    bool structure_completed = false;
    for (auto& b : s.buildings) {
        if (!b.complete()) {
            b.progress_milli = std::min(b.total_milli, b.progress_milli + std::int64_t{1000} * dt);
            if (b.complete()) {
                structure_completed = true;
                if (b.kind == BuildingKind::Nexus) b.energy_milli = config_.chrono_start_energy * 1000;
                log_event(s, std::string(name_of(b.kind)) + " completed");
            }
            continue;
        }
        if (b.kind == BuildingKind::Nexus) {
            b.energy_milli = std::min(config_.chrono_energy_max * 1000,
                                      b.energy_milli + config_.chrono_energy_regen_milli * dt);
        }
        if (!b.queue.empty()) {
            Job& job = b.queue.front();
            std::int64_t rate = std::int64_t{1000} * dt;
            if (b.chrono_seconds_left > 0) rate = rate * config_.chrono_speed_pct / 100;
            job.progress_milli = std::min(job.total_milli, job.progress_milli + rate);
            if (job.progress_milli >= job.total_milli) {
                if (job.kind == Job::Kind::Unit) {
                    ++s.units[idx(job.unit)];
                    ++s.units_trained[idx(job.unit)];
                    if (job.unit != UnitKind::Probe) log_event(s, std::string(name_of(job.unit)) + " trained");
                } else {
                    s.research_done[idx(job.tech)] = true;
                    ++s.research_completed;
                    log_event(s, std::string(name_of(job.tech)) + " research completed");
                }
                b.queue.erase(b.queue.begin());
            }
        }
        b.chrono_seconds_left = std::max(0, b.chrono_seconds_left - dt);
    }
    if (structure_completed) refresh_supply(s);

    s.time_s += dt;
    ++s.tick;

    if (s.scout_arrival_s >= 0 && s.scout_arrival_s <= s.time_s) {
        s.scout_arrival_s = -1;
        s.intel_until_s = s.time_s + config_.scout_visible_seconds;
        log_event(s, "Scout reached the enemy base");
    }
}

std::optional<Outcome> Simulator::is_terminated(const GameState& state) const {
    return hep::is_terminated(state, config_);
}

// ---------------------------------------------------------------------------
// Observation

ObservationSnapshot snapshot_of(const GameState& s, const GameDataConfig& config) {
    ObservationSnapshot o;
    o.time_s = s.time_s;
    o.minerals = static_cast<int>(s.minerals());
    o.gas = static_cast<int>(s.gas());
    o.minerals_collected = static_cast<int>(s.minerals_collected());
    o.gas_collected = static_cast<int>(s.gas_collected());
    o.supply_used = s.supply_used;
    o.supply_cap = s.supply_cap;
    o.worker_supply = s.worker_supply(config);
    o.army_supply = s.army_supply(config);
    const int workers = s.units[idx(UnitKind::Probe)];
    o.gas_workers = std::min(workers, config.workers_per_assimilator * s.count(BuildingKind::Assimilator, true));
    o.mineral_workers =
        std::min(workers - o.gas_workers, config.mineral_workers_per_nexus * s.count(BuildingKind::Nexus, true));
    for (const auto& b : s.buildings) {
        auto& line = o.buildings[idx(b.kind)];
        if (b.complete()) {
            ++line.complete;
            if (b.kind == BuildingKind::Nexus && b.energy_milli >= config.chrono_energy_cost * 1000) ++o.chrono_ready;
        } else {
            ++line.in_progress;
        }
    }
    for (auto k : kAllUnits) {
        if (!is_player_unit(k)) continue;
        o.units[idx(k)] = s.units[idx(k)];
        o.in_production[idx(k)] = s.queued(k);
    }
    for (auto t : kAllTechs) o.research_percent[idx(t)] = s.research_percent(t);
    o.scout_en_route = s.scout_arrival_s >= 0;
    if (s.intel_until_s >= 0 && s.time_s <= s.intel_until_s) {
        EnemyIntel intel;
        intel.bases = static_cast<int>(s.enemy.hatchery_hp.size());
        intel.drones = s.enemy.drones;
        intel.army = s.enemy.home_army;
        o.enemy = intel;
    }
    const std::size_t shown = std::min<std::size_t>(5, s.events.size());
    for (std::size_t i = s.events.size() - shown; i < s.events.size(); ++i) {
        o.events.push_back(format_clock(s.events[i].time_s) + " " + s.events[i].text);
    }
    return o;
}

Observation Simulator::render_observation(const GameState& state) const {
    Observation obs;
    obs.snapshot = snapshot_of(state, config_);
    obs.text = render_snapshot(obs.snapshot);
    return obs;
}

std::string format_clock(int seconds) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d:%02d", seconds / 60, seconds % 60);
    return buf;
}

std::string render_snapshot(const ObservationSnapshot& o) {
    std::string t;
    auto line = [&t](const std::string& s) {
        t += s;
        t += '\n';
    };
    line("Game time: " + format_clock(o.time_s));
    line("Resources:");
    line("- Minerals: " + std::to_string(o.minerals));
    line("- Gas: " + std::to_string(o.gas));
    line("- Minerals collected: " + std::to_string(o.minerals_collected));
    line("- Gas collected: " + std::to_string(o.gas_collected));
    line("Supply:");
    line("- Used: " + std::to_string(o.supply_used) + "/" + std::to_string(o.supply_cap));
    line("- Workers: " + std::to_string(o.worker_supply) + " (minerals " + std::to_string(o.mineral_workers) +
         ", gas " + std::to_string(o.gas_workers) + ")");
    line("- Army: " + std::to_string(o.army_supply));
    line("Buildings:");
    for (auto k : kAllBuildings) {
        const auto& b = o.buildings[idx(k)];
        if (b.complete == 0 && b.in_progress == 0) continue;
        line("- " + std::string(name_of(k)) + ": " + std::to_string(b.complete) + " complete, " +
             std::to_string(b.in_progress) + " in progress");
    }
    line("- Chronoboost ready: " + std::to_string(o.chrono_ready));
    line("Units:");
    for (auto k : kAllUnits) {
        if (!is_player_unit(k)) continue;
        if (o.units[idx(k)] == 0 && o.in_production[idx(k)] == 0) continue;
        std::string s = "- " + std::string(name_of(k)) + ": " + std::to_string(o.units[idx(k)]);
        if (o.in_production[idx(k)] > 0) s += ", " + std::to_string(o.in_production[idx(k)]) + " in production";
        line(s);
    }
    if (o.scout_en_route) line("- Scouting Probe: en route");
    line("Research:");
    bool any_research = false;
    for (auto tk : kAllTechs) {
        if (o.research_percent[idx(tk)] < 0) continue;
        any_research = true;
        line("- " + std::string(name_of(tk)) + ", " + std::to_string(o.research_percent[idx(tk)]) + "%");
    }
    if (!any_research) line("- none");
    if (o.enemy) {
        line("Enemy:");
        line("- Bases: " + std::to_string(o.enemy->bases));
        line("- Drones: " + std::to_string(o.enemy->drones));
        for (auto k : kAllUnits) {
            if (is_player_unit(k) || o.enemy->army[idx(k)] == 0) continue;
            line("- " + std::string(name_of(k)) + ": " + std::to_string(o.enemy->army[idx(k)]));
        }
    }
    line("Recent events:");
    if (o.events.empty()) line("- none");
    for (const auto& e : o.events) line("- " + e);
    return t;
}

namespace {

std::optional<int> parse_int(std::string_view s) {
    if (s.empty()) return std::nullopt;
    int v = 0;
    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '-') {
        neg = true;
        i = 1;
    }
    if (i == s.size()) return std::nullopt;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') return std::nullopt;
        v = v * 10 + (s[i] - '0');
    }
    return neg ? -v : v;
}

std::optional<int> parse_clock(std::string_view s) {
    const auto colon = s.find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    auto m = parse_int(s.substr(0, colon));
    auto sec = parse_int(s.substr(colon + 1));
    if (!m || !sec) return std::nullopt;
    return *m * 60 + *sec;
}

// "- Key: rest" -> {Key, rest}
std::optional<std::pair<std::string_view, std::string_view>> item(std::string_view line) {
    if (!line.starts_with("- ")) return std::nullopt;
    line.remove_prefix(2);
    const auto colon = line.find(": ");
    if (colon == std::string_view::npos) return std::pair{line, std::string_view{}};
    return std::pair{line.substr(0, colon), line.substr(colon + 2)};
}

}  // namespace

std::optional<ObservationSnapshot> parse_observation(std::string_view text) {
    ObservationSnapshot o;
    std::string_view section;
    bool saw_time = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty()) continue;

        if (line.starts_with("Game time: ")) {
            auto t = parse_clock(line.substr(11));
            if (!t) return std::nullopt;
            o.time_s = *t;
            saw_time = true;
            continue;
        }
        if (!line.starts_with("- ")) {
            section = line;
            if (section == "Enemy:") o.enemy = EnemyIntel{};
            continue;
        }
        auto kv = item(line);
        if (!kv) return std::nullopt;
        auto [key, value] = *kv;

        if (section == "Resources:") {
            auto v = parse_int(value);
            if (!v) return std::nullopt;
            if (key == "Minerals") o.minerals = *v;
            else if (key == "Gas") o.gas = *v;
            else if (key == "Minerals collected") o.minerals_collected = *v;
            else if (key == "Gas collected") o.gas_collected = *v;
        } else if (section == "Supply:") {
            if (key == "Used") {
                const auto slash = value.find('/');
                if (slash == std::string_view::npos) return std::nullopt;
                auto u = parse_int(value.substr(0, slash));
                auto c = parse_int(value.substr(slash + 1));
                if (!u || !c) return std::nullopt;
                o.supply_used = *u;
                o.supply_cap = *c;
            } else if (key == "Workers") {
                int w = 0, m = 0, g = 0;
                if (std::sscanf(std::string(value).c_str(), "%d (minerals %d, gas %d)", &w, &m, &g) != 3) {
                    return std::nullopt;
                }
                o.worker_supply = w;
                o.mineral_workers = m;
                o.gas_workers = g;
            } else if (key == "Army") {
                auto v = parse_int(value);
                if (!v) return std::nullopt;
                o.army_supply = *v;
            }
        } else if (section == "Buildings:") {
            if (key == "Chronoboost ready") {
                auto v = parse_int(value);
                if (!v) return std::nullopt;
                o.chrono_ready = *v;
            } else if (auto b = building_from_name(key)) {
                int c = 0, p = 0;
                if (std::sscanf(std::string(value).c_str(), "%d complete, %d in progress", &c, &p) != 2) {
                    return std::nullopt;
                }
                o.buildings[idx(*b)] = {c, p};
            }
        } else if (section == "Units:") {
            if (key == "Scouting Probe") {
                o.scout_en_route = true;
            } else if (auto u = unit_from_name(key)) {
                int n = 0, q = 0;
                const int got = std::sscanf(std::string(value).c_str(), "%d, %d in production", &n, &q);
                if (got < 1) return std::nullopt;
                o.units[idx(*u)] = n;
                o.in_production[idx(*u)] = got == 2 ? q : 0;
            }
        } else if (section == "Research:") {
            if (key == "none" && value.empty()) continue;
            const std::string_view entry = line.substr(2);
            const auto comma = entry.rfind(", ");
            if (comma == std::string_view::npos || !entry.ends_with("%")) return std::nullopt;
            auto tech = tech_from_name(entry.substr(0, comma));
            auto pct = parse_int(entry.substr(comma + 2, entry.size() - comma - 3));
            if (!tech || !pct) return std::nullopt;
            o.research_percent[idx(*tech)] = *pct;
        } else if (section == "Enemy:") {
            auto v = parse_int(value);
            if (!v) return std::nullopt;
            if (key == "Bases") o.enemy->bases = *v;
            else if (key == "Drones") o.enemy->drones = *v;
            else if (auto u = unit_from_name(key)) o.enemy->army[idx(*u)] = *v;
        } else if (section == "Recent events:") {
            const std::string_view entry = line.substr(2);
            if (entry != "none") o.events.emplace_back(entry);
        }
    }
    if (!saw_time) return std::nullopt;
    return o;
}

}  // namespace hep
