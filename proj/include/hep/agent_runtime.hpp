#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hep/hierarchy_guard.hpp"
#include "hep/llm_backend.hpp"
#include "hep/macro_sim.hpp"
#include "hep/prompt_kit.hpp"
#include "hep/telemetry.hpp"

namespace hep {

struct RuntimeConfig {
    int n = 20;  // ticks between agent queries
    ActionId a0 = ActionId::EmptyAction;
    int max_ticks = 1500;
    AblationConfig ablation;
    EnforceMode enforce = EnforceMode::On;
    std::uint64_t seed = 0;
    int difficulty = 6;
    TelemetryConfig telemetry;
};

void validate(const RuntimeConfig& config);  // ConfigError

struct MatchTotals {
    int queries = 0;
    int backend_errors = 0;
    long long prompt_tokens = 0;
    long long output_tokens = 0;
    long long total_tokens = 0;
    double wall_time_s = 0.0;
};

struct MatchRecord {
    RuntimeConfig config;
    std::string backend;
    std::vector<QueryRecord> queries;
    TelemetrySink telemetry;
    std::optional<Outcome> outcome;  // set iff the game ended
    int ticks = 0;                   // ticks actually played
    MatchTotals totals;
    ComplianceSummary compliance;
    GameState final_state;
};

// SHA-256 over the final state, every query record and the outcome.
std::string match_digest(const MatchRecord& record);

// The game world a match is played in.
struct World {
    GameDataConfig game;
    DifficultySchedules schedules;
    PromptAssets assets;
};

World load_world(const std::filesystem::path& assets_dir);  // assets_dir/{prompts,game}

MatchRecord run_match(const RuntimeConfig& config, const PromptAssets& assets, ChatBackend& backend,
                      const Simulator& simulator, std::string backend_label = "custom");
MatchRecord run_match(const RuntimeConfig& config, const World& world, const BackendConfig& backend);

struct BatchCell {
    RuntimeConfig config;
    BackendConfig backend;
};

struct CellResult {
    BatchCell cell;
    std::optional<Outcome> outcome;
    std::optional<std::string> error;  // the match could not run; counted as a loss
    MatchTotals totals;
    std::string digest;
};

struct MeanCost {
    double prompt_tokens = 0;
    double output_tokens = 0;
    double total_tokens = 0;
    double wall_time_s = 0;
};

struct BatchRow {
    std::string backend;
    std::string ablation;
    int difficulty = 0;
    int games = 0;
    int wins = 0;
    int losses = 0;
    int draws = 0;
    int errors = 0;
    MeanCost per_query;
};

struct BatchReport {
    std::vector<CellResult> results;  // grid order
    std::vector<BatchRow> rows;       // grouped by backend, ablation, difficulty in first-seen order

    std::string render() const;
};

std::string win_rate_cell(int wins, int games);  // "12/12 (100%)"
std::string difficulty_name(int level);

// Called from worker threads with the grid index of each finished match.
using MatchCallback = std::function<void(std::size_t, const MatchRecord&)>;

// Runs every cell, up to `jobs` at a time. Throws EmptyGrid for an empty grid.
BatchReport run_batch(const std::vector<BatchCell>& grid, const World& world, int jobs = 1,
                      const MatchCallback& on_match = {});

// Grid file: `defaults:` map plus `cells:` list; each cell may give `seeds:`
// (list) or `seed:` and any of difficulty, ablation, backend, n,
// enforce_hierarchy, max_ticks.
std::vector<BatchCell> parse_grid(std::string_view yaml_text);
std::vector<BatchCell> load_grid(const std::filesystem::path& path);

}  // namespace hep
