#pragma once

// Simulator invariants shared by the unit suite and the acceptance binary.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hep/macro_sim.hpp"

namespace test {

enum class Agent { Noop, RandomLegal };

struct PropertyRun {
    int ticks = 0;
    std::string first_failure;  // empty when every tick held
    std::string final_digest;
    std::vector<std::string> tick_digests;
};

inline std::string check_tick(const hep::GameState& s, const hep::GameDataConfig& cfg) {
    if (s.minerals_collected_milli - s.minerals_spent_milli != s.minerals_milli) return "mineral conservation";
    if (s.gas_collected_milli - s.gas_spent_milli != s.gas_milli) return "gas conservation";
    if (s.minerals_milli < 0 || s.gas_milli < 0) return "negative bank";
    if (s.supply_used > s.supply_cap) return "supply used above cap";
    if (s.supply_cap > cfg.max_supply) return "supply cap above maximum";
    for (const auto& b : s.buildings) {
        for (const auto& j : b.queue) {
            if (j.progress_milli < 0 || j.progress_milli > j.total_milli) return "job progress out of range";
        }
    }
    return {};
}

// Plays one game tick by tick. The random agent draws up to three library
// actions per tick; infeasible ones are the simulator's problem.
inline PropertyRun play(const hep::Simulator& sim, std::uint64_t seed, Agent agent, int max_ticks = 1500,
                        bool keep_digests = false) {
    PropertyRun run;
    auto [state, obs] = sim.reset(seed);
    std::mt19937_64 rng(seed * 7919 + static_cast<std::uint64_t>(agent));
    const auto lib = hep::action_library();
    std::vector<std::int64_t> progress;
    if (auto f = check_tick(state, sim.config()); !f.empty()) run.first_failure = "t=0 " + f;
    while (!state.outcome && run.ticks < max_ticks) {
        std::vector<hep::ActionToken> actions;
        if (agent == Agent::RandomLegal) {
            const auto k = rng() % 4;
            for (std::uint64_t i = 0; i < k; ++i) actions.push_back(lib[rng() % lib.size()]);
        } else {
            actions.push_back(hep::token(hep::ActionId::EmptyAction));
        }
        state = sim.step(std::move(state), actions, 1);
        ++run.ticks;
        if (run.first_failure.empty()) {
            if (auto f = check_tick(state, sim.config()); !f.empty()) {
                run.first_failure = "t=" + std::to_string(state.time_s) + " " + f;
            }
        }
        if (keep_digests) run.tick_digests.push_back(hep::state_digest(state));
    }
    run.final_digest = hep::state_digest(state);
    return run;
}

// Bank growth with w workers and no spending over t ticks, against the
// closed form w * rate * t * tick_seconds. Returns the first mismatch.
inline std::string check_income_linearity(const hep::Simulator& sim, std::uint64_t seed) {
    const auto& cfg = sim.config();
    for (int w = 1; w <= cfg.mineral_workers_per_nexus; ++w) {
        auto [state, obs] = sim.reset(seed);
        state.units[hep::idx(hep::UnitKind::Probe)] = w;
        const std::int64_t start = state.minerals_milli;
        const std::vector<hep::ActionToken> idle{hep::token(hep::ActionId::EmptyAction)};
        for (int t = 1; t <= 60; ++t) {
            state = sim.step(std::move(state), idle, 1);
            const std::int64_t expected =
                std::int64_t{w} * cfg.minerals_per_worker_milli * t * cfg.tick_seconds;
            if (state.minerals_milli - start != expected) {
                return "w=" + std::to_string(w) + " t=" + std::to_string(t);
            }
        }
    }
    return {};
}

}  // namespace test
