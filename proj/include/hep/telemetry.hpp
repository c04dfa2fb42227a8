#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hep/action_grammar.hpp"
#include "hep/hierarchy_guard.hpp"
#include "hep/llm_backend.hpp"
#include "hep/macro_sim.hpp"

namespace hep {

struct SeriesPoint {
    int time_s = 0;
    int minerals_bank = 0;
    int gas_bank = 0;
    int minerals_collected_total = 0;
    int gas_collected_total = 0;
    int worker_supply = 0;
    int army_supply = 0;
    int supply_used = 0;
    int supply_cap = 0;
    int pylon_count = 0;

    friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

inline constexpr std::string_view kCsvHeader =
    "time_s,minerals_bank,gas_bank,minerals_collected_total,gas_collected_total,worker_supply,army_supply,"
    "supply_used,supply_cap,pylon_count";

// Column names after time_s, in CSV order.
const std::vector<std::string>& series_metrics();
int metric_value(const SeriesPoint& point, std::string_view metric);  // ConfigError for unknown names

SeriesPoint point_of(const GameState& state, const GameDataConfig& config);

struct ResearchStatus {
    TechKind tech;
    int percent;

    friend bool operator==(const ResearchStatus&, const ResearchStatus&) = default;
};

struct SnapshotRow {
    int time_s = 0;
    UnitCounts supply_by_unit{};  // unit count times unit supply, player units only
    std::vector<ResearchStatus> research;  // started technologies only
};

struct TacticTracePoint {
    int tick = 0;
    int time_s = 0;
    std::optional<std::string> tactic;
    std::optional<ActionId> priority;
    bool compliant = true;
};

struct TelemetryConfig {
    std::vector<int> snapshot_times{240, 480, 720, 960};
};

// One sink per match, single writer.
class TelemetrySink {
public:
    explicit TelemetrySink(const GameDataConfig& config, TelemetryConfig telemetry = {});

    // Appends a point; returns false and keeps nothing when time does not
    // move forward. Emits a SnapshotRow when a snapshot time is reached.
    bool sample(const GameState& state);
    void trace(int tick, int time_s, const DecisionOutput& decision, const HierarchyReport& report);

    const std::vector<SeriesPoint>& series() const { return series_; }
    const std::vector<SnapshotRow>& snapshots() const { return snapshots_; }
    const std::vector<TacticTracePoint>& tactic_trace() const { return trace_; }

private:
    GameDataConfig config_;
    TelemetryConfig telemetry_;
    std::size_t next_snapshot_ = 0;
    std::vector<SeriesPoint> series_;
    std::vector<SnapshotRow> snapshots_;
    std::vector<TacticTracePoint> trace_;
};

std::string to_csv(std::span<const SeriesPoint> series);
std::vector<SeriesPoint> parse_csv(std::string_view text);  // IoError on malformed input
void export_csv(std::span<const SeriesPoint> series, const std::filesystem::path& path);
std::vector<SeriesPoint> import_csv(const std::filesystem::path& path);

std::string snapshots_to_csv(std::span<const SnapshotRow> rows);
std::string trace_to_csv(std::span<const TacticTracePoint> trace);

// One agent query: what the agent saw, said, and what was executed.
struct QueryRecord {
    int tick = 0;
    int time_s = 0;
    std::string observation_digest;
    DecisionOutput decision;
    HierarchyReport report;
    CostMeter meter;
    std::optional<std::string> error;  // backend failure; a0 was executed instead
};

std::string to_json_line(const QueryRecord& query);
void export_jsonl(std::span<const QueryRecord> queries, const std::filesystem::path& path);

struct ComparisonCell {
    int time_s = 0;
    std::string metric;
    std::optional<double> a;
    std::optional<double> b;
    std::optional<double> ratio;  // absent when b is zero or a value is missing
};

struct ComparisonTable {
    std::string label_a;
    std::string label_b;
    std::vector<ComparisonCell> cells;

    const ComparisonCell* find(int time_s, std::string_view metric) const;
    std::string render() const;
};

// Value at time t by linear interpolation between the neighbouring samples;
// absent outside the sampled range.
std::optional<double> interpolate(std::span<const SeriesPoint> series, std::string_view metric, double time_s);

inline const std::vector<int> kDefaultCheckpoints{240, 300, 480, 720, 960};

// Ratios run_a / run_b for every metric at every checkpoint. Throws
// Incomparable when the two runs share no sampled time.
ComparisonTable compare_report(std::span<const SeriesPoint> run_a, std::span<const SeriesPoint> run_b,
                               const std::vector<int>& checkpoints = kDefaultCheckpoints,
                               std::string label_a = "a", std::string label_b = "b");

}  // namespace hep
