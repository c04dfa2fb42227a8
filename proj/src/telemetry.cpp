#include "hep/telemetry.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hep/error.hpp"

namespace hep {

namespace {

using Field = int SeriesPoint::*;

struct Column {
    std::string_view name;
    Field field;
};

constexpr std::array<Column, 10> kColumns{{
    {"time_s", &SeriesPoint::time_s},
    {"minerals_bank", &SeriesPoint::minerals_bank},
    {"gas_bank", &SeriesPoint::gas_bank},
    {"minerals_collected_total", &SeriesPoint::minerals_collected_total},
    {"gas_collected_total", &SeriesPoint::gas_collected_total},
    {"worker_supply", &SeriesPoint::worker_supply},
    {"army_supply", &SeriesPoint::army_supply},
    {"supply_used", &SeriesPoint::supply_used},
    {"supply_cap", &SeriesPoint::supply_cap},
    {"pylon_count", &SeriesPoint::pylon_count},
}};

Field field_of(std::string_view metric) {
    for (const auto& c : kColumns) {
        if (c.name == metric) return c.field;
    }
    throw ConfigError("unknown series metric '" + std::string(metric) + "'");
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

nlohmann::json tokens_json(const std::vector<ActionToken>& tokens) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& t : tokens) out.push_back(std::string(t.surface));
    return out;
}

}  // namespace

const std::vector<std::string>& series_metrics() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (std::size_t i = 1; i < kColumns.size(); ++i) out.emplace_back(kColumns[i].name);
        return out;
    }();
    return names;
}

int metric_value(const SeriesPoint& point, std::string_view metric) { return point.*field_of(metric); }

SeriesPoint point_of(const GameState& s, const GameDataConfig& config) {
    SeriesPoint p;
    p.time_s = s.time_s;
    p.minerals_bank = static_cast<int>(s.minerals());
    p.gas_bank = static_cast<int>(s.gas());
    p.minerals_collected_total = static_cast<int>(s.minerals_collected());
    p.gas_collected_total = static_cast<int>(s.gas_collected());
    p.worker_supply = s.worker_supply(config);
    p.army_supply = s.army_supply(config);
    p.supply_used = s.supply_used;
    p.supply_cap = s.supply_cap;
    p.pylon_count = s.count(BuildingKind::Pylon, true);
    return p;
}

TelemetrySink::TelemetrySink(const GameDataConfig& config, TelemetryConfig telemetry)
    : config_(config), telemetry_(std::move(telemetry)) {
    std::sort(telemetry_.snapshot_times.begin(), telemetry_.snapshot_times.end());
}

bool TelemetrySink::sample(const GameState& state) {
    if (!series_.empty() && state.time_s <= series_.back().time_s) return false;
    series_.push_back(point_of(state, config_));
    while (next_snapshot_ < telemetry_.snapshot_times.size() &&
           state.time_s >= telemetry_.snapshot_times[next_snapshot_]) {
        SnapshotRow row;
        row.time_s = telemetry_.snapshot_times[next_snapshot_++];
        for (auto k : kAllUnits) {
            if (is_player_unit(k)) row.supply_by_unit[idx(k)] = state.units[idx(k)] * config_.unit(k).supply;
        }
        for (auto t : kAllTechs) {
            const int pct = state.research_percent(t);
            if (pct >= 0) row.research.push_back({t, pct});
        }
        snapshots_.push_back(std::move(row));
    }
    return true;
}

void TelemetrySink::trace(int tick, int time_s, const DecisionOutput& decision, const HierarchyReport& report) {
    trace_.push_back({tick, time_s, decision.current_tactic, decision.priority, report.compliant});
}

std::string to_csv(std::span<const SeriesPoint> series) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& p : series) {
        for (std::size_t i = 0; i < kColumns.size(); ++i) {
            if (i > 0) out += ',';
            out += std::to_string(p.*kColumns[i].field);
        }
        out += '\n';
    }
    return out;
}

std::vector<SeriesPoint> parse_csv(std::string_view text) {
    std::vector<SeriesPoint> out;
    std::size_t pos = 0;
    bool header = true;
    int line_no = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (header) {
            if (line != kCsvHeader) throw IoError("unexpected CSV header");
            header = false;
            continue;
        }
        if (line.empty()) continue;
        SeriesPoint p;
        std::size_t col = 0;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            const std::string_view cell = line.substr(start, comma == std::string_view::npos ? line.size() - start
                                                                                             : comma - start);
            if (col >= kColumns.size()) throw IoError("too many columns on CSV line " + std::to_string(line_no));
            int v = 0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || ptr != cell.data() + cell.size()) {
                throw IoError("bad number on CSV line " + std::to_string(line_no));
            }
            p.*kColumns[col++].field = v;
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (col != kColumns.size()) throw IoError("too few columns on CSV line " + std::to_string(line_no));
        out.push_back(p);
    }
    if (header) throw IoError("empty CSV");
    return out;
}

void export_csv(std::span<const SeriesPoint> series, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << to_csv(series);
    if (!out) throw IoError("write failed on " + path.string());
}

std::vector<SeriesPoint> import_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

std::string snapshots_to_csv(std::span<const SnapshotRow> rows) {
    std::string out = "time_s";
    for (auto k : kAllUnits) {
        if (is_player_unit(k)) out += "," + std::string(name_of(k)) + "_supply";
    }
    out += ",research\n";
    for (const auto& r : rows) {
        out += std::to_string(r.time_s);
        for (auto k : kAllUnits) {
            if (is_player_unit(k)) out += "," + std::to_string(r.supply_by_unit[idx(k)]);
        }
        out += ",\"";
        for (std::size_t i = 0; i < r.research.size(); ++i) {
            if (i > 0) out += "; ";
            out += std::string(name_of(r.research[i].tech)) + ", " + std::to_string(r.research[i].percent) + "%";
        }
        out += "\"\n";
    }
    return out;
}

std::string trace_to_csv(std::span<const TacticTracePoint> trace) {
    std::string out = "tick,time_s,tactic,priority,compliant\n";
    for (const auto& p : trace) {
        out += std::to_string(p.tick) + "," + std::to_string(p.time_s) + ",";
        out += p.tactic ? "\"" + *p.tactic + "\"" : std::string();
        out += ",";
        if (p.priority) out += surface(*p.priority);
        out += p.compliant ? ",1\n" : ",0\n";
    }
    return out;
}

std::string to_json_line(const QueryRecord& q) {
    nlohmann::json j;
    j["tick"] = q.tick;
    j["time_s"] = q.time_s;
    j["observation_digest"] = q.observation_digest;
    j["current_tactic"] = q.decision.current_tactic ? nlohmann::json(*q.decision.current_tactic) : nlohmann::json();
    j["priority"] = q.decision.priority ? nlohmann::json(std::string(surface(*q.decision.priority)))
                                        : nlohmann::json();
    j["raw_actions"] = tokens_json(q.decision.raw_actions);
    j["validated_actions"] = tokens_json(q.decision.validated_actions);
    nlohmann::json violations = nlohmann::json::array();
    for (const auto& v : q.decision.violations) violations.push_back({{"text", v.text}, {"reason", v.reason}});
    j["violations"] = violations;
    nlohmann::json suppressed = nlohmann::json::array();
    for (const auto& s : q.report.suppressed) {
        suppressed.push_back({{"action", std::string(s.token.surface)}, {"reason", s.reason}});
    }
    j["hierarchy"] = {{"priority_active", q.report.priority_active},
                      {"suppressed", suppressed},
                      {"inserted_priority", q.report.inserted_priority},
                      {"compliant", q.report.compliant}};
    j["prompt_tokens"] = q.meter.prompt_tokens;
    j["output_tokens"] = q.meter.output_tokens;
    j["total_tokens"] = q.meter.total_tokens;
    j["wall_time_s"] = q.meter.wall_time_s;
    j["error"] = q.error ? nlohmann::json(*q.error) : nlohmann::json();
    j["response"] = q.decision.raw_text;
    return j.dump();
}

void export_jsonl(std::span<const QueryRecord> queries, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& q : queries) out << to_json_line(q) << '\n';
    if (!out) throw IoError("write failed on " + path.string());
}

std::optional<double> interpolate(std::span<const SeriesPoint> series, std::string_view metric, double t) {
    const Field f = field_of(metric);
    if (series.empty() || t < series.front().time_s || t > series.back().time_s) return std::nullopt;
    auto it = std::lower_bound(series.begin(), series.end(), t,
                               [](const SeriesPoint& p, double time) { return p.time_s < time; });
    if (it->time_s == t) return static_cast<double>((*it).*f);
    const SeriesPoint& hi = *it;
    const SeriesPoint& lo = *(it - 1);
    const double w = (t - lo.time_s) / static_cast<double>(hi.time_s - lo.time_s);
    return lo.*f + w * (hi.*f - lo.*f);
}

const ComparisonCell* ComparisonTable::find(int time_s, std::string_view metric) const {
    for (const auto& c : cells) {
        if (c.time_s == time_s && c.metric == metric) return &c;
    }
    return nullptr;
}

std::string ComparisonTable::render() const {
    std::string out = "time_s,metric," + label_a + "," + label_b + ",ratio\n";
    for (const auto& c : cells) {
        out += std::to_string(c.time_s) + "," + c.metric + ",";
        out += c.a ? format_double(*c.a) : "n/a";
        out += ",";
        out += c.b ? format_double(*c.b) : "n/a";
        out += ",";
        out += c.ratio ? format_double(*c.ratio) : "undefined";
        out += "\n";
    }
    return out;
}

ComparisonTable compare_report(std::span<const SeriesPoint> a, std::span<const SeriesPoint> b,
                               const std::vector<int>& checkpoints, std::string label_a, std::string label_b) {
    if (a.empty() || b.empty() || a.back().time_s < b.front().time_s || b.back().time_s < a.front().time_s) {
        throw Incomparable("the two runs cover disjoint time ranges");
    }
    ComparisonTable table{std::move(label_a), std::move(label_b), {}};
    for (int t : checkpoints) {
        for (const auto& metric : series_metrics()) {
            ComparisonCell c;
            c.time_s = t;
            c.metric = metric;
            c.a = interpolate(a, metric, t);
            c.b = interpolate(b, metric, t);
            if (c.a && c.b && *c.b != 0.0) c.ratio = *c.a / *c.b;
            table.cells.push_back(std::move(c));
        }
    }
    return table;
}

}  // namespace hep
