#include "hep/agent_runtime.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "hep/digest.hpp"
#include "hep/error.hpp"

namespace hep {

void validate(const RuntimeConfig& c) {
    if (c.n < 1) throw ConfigError("interaction frequency n must be >= 1");
    if (c.max_ticks < 1) throw ConfigError("max_ticks must be >= 1");
}

std::string match_digest(const MatchRecord& r) {
    std::string payload = serialize(r.final_state);
    for (const auto& q : r.queries) {
        payload += '\n';
        payload += to_json_line(q);
    }
    payload += '\n';
    payload += r.outcome ? std::string(to_string(*r.outcome)) : std::string("unfinished");
    return sha256_hex(payload);
}

World load_world(const std::filesystem::path& assets_dir) {
    World w;
    w.assets = load_assets(assets_dir / "prompts");
    validate_cards(w.assets.tactic_cards);
    w.game = load_game_data(assets_dir / "game" / "game_data.yaml");
    w.schedules = load_difficulty_schedules(assets_dir / "game" / "difficulty_schedules.yaml");
    return w;
}

MatchRecord run_match(const RuntimeConfig& config, const PromptAssets& assets, ChatBackend& backend,
                      const Simulator& sim, std::string backend_label) {
    validate(config);
    const auto known = tactic_names(assets);
    MatchRecord rec{config, std::move(backend_label), {}, TelemetrySink(sim.config(), config.telemetry), {}, 0, {},
                    {}, {}};

    auto [state, obs] = sim.reset(config.seed);
    rec.telemetry.sample(state);
    std::vector<HierarchyReport> reports;
    const std::vector<ActionToken> idle{token(config.a0)};

    int t = 0;
    for (; t < config.max_ticks && !state.outcome; ++t) {
        if (t % config.n != 0) {
            state = sim.step(std::move(state), idle, 1);
            rec.telemetry.sample(state);
            continue;
        }

        QueryRecord q;
        q.tick = t;
        q.time_s = state.time_s;
        obs = sim.render_observation(state);
        q.observation_digest = sha256_hex(obs.text);
        const MessageList messages = build_messages(obs.text, assets, config.ablation);

        std::vector<ActionToken> actions = idle;
        try {
            ChatResult reply = backend.chat(messages);
            q.meter = reply.meter;
            q.decision = parse_decision(reply.text, known);
            auto [validated, report] = enforce(q.decision);
            switch (config.enforce) {
                case EnforceMode::On:
                    q.decision.validated_actions = std::move(validated);
                    q.report = std::move(report);
                    break;
                case EnforceMode::ReportOnly:
                    q.decision.validated_actions = q.decision.raw_actions;
                    q.report = std::move(report);
                    break;
                case EnforceMode::Off:
                    q.decision.validated_actions = q.decision.raw_actions;
                    q.report = HierarchyReport{};
                    q.report.priority_active = q.decision.priority.has_value();
                    q.report.kept = q.decision.raw_actions;
                    break;
            }
            actions = q.decision.validated_actions;
        } catch (const BackendError& e) {
            q.error = e.what();
            q.decision.validated_actions = idle;
            q.meter = make_meter(estimate_prompt_tokens(messages), 0, 0.0);
            ++rec.totals.backend_errors;
        }

        rec.telemetry.trace(t, q.time_s, q.decision, q.report);
        reports.push_back(q.report);
        ++rec.totals.queries;
        rec.totals.prompt_tokens += q.meter.prompt_tokens;
        rec.totals.output_tokens += q.meter.output_tokens;
        rec.totals.total_tokens += q.meter.total_tokens;
        rec.totals.wall_time_s += q.meter.wall_time_s;
        rec.queries.push_back(std::move(q));

        if (actions.empty()) actions = idle;
        state = sim.step(std::move(state), actions, 1);
        rec.telemetry.sample(state);
    }

    rec.ticks = t;
    rec.outcome = state.outcome;
    rec.compliance = audit_trace(reports);
    rec.final_state = std::move(state);
    return rec;
}

MatchRecord run_match(const RuntimeConfig& config, const World& world, const BackendConfig& backend_config) {
    Simulator sim(world.game, world.schedules.at(config.difficulty));
    auto backend = make_backend(backend_config);
    return run_match(config, world.assets, *backend, sim, describe(backend_config));
}

std::string win_rate_cell(int wins, int games) {
    const long pct = games > 0 ? std::lround(100.0 * wins / games) : 0;
    return std::to_string(wins) + "/" + std::to_string(games) + " (" + std::to_string(pct) + "%)";
}

std::string difficulty_name(int level) {
    switch (level) {
        case 4: return "Hard";
        case 5: return "Harder";
        case 6: return "VeryHard";
        case 7: return "Elite";
        default: return "Level" + std::to_string(level);
    }
}

std::string BatchReport::render() const {
    std::string out = "backend,ablation,difficulty,win_rate,wins,losses,draws,errors,"
                      "mean_prompt_tokens,mean_output_tokens,mean_total_tokens,mean_wall_time_s\n";
    char buf[160];
    for (const auto& r : rows) {
        out += r.backend + "," + r.ablation + "," + difficulty_name(r.difficulty) + "," +
               win_rate_cell(r.wins, r.games) + "," + std::to_string(r.wins) + "," + std::to_string(r.losses) + "," +
               std::to_string(r.draws) + "," + std::to_string(r.errors) + ",";
        std::snprintf(buf, sizeof buf, "%.1f,%.1f,%.1f,%.3f\n", r.per_query.prompt_tokens, r.per_query.output_tokens,
                      r.per_query.total_tokens, r.per_query.wall_time_s);
        out += buf;
    }
    return out;
}

BatchReport run_batch(const std::vector<BatchCell>& grid, const World& world, int jobs,
                      const MatchCallback& on_match) {
    if (grid.empty()) throw EmptyGrid();
    BatchReport report;
    report.results.resize(grid.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) {
            CellResult& out = report.results[i];
            out.cell = grid[i];
            try {
                MatchRecord rec = run_match(grid[i].config, world, grid[i].backend);
                out.outcome = rec.outcome;
                out.totals = rec.totals;
                out.digest = match_digest(rec);
                if (on_match) on_match(i, rec);
            } catch (const std::exception& e) {
                out.error = e.what();
            }
        }
    };
    const int threads = std::clamp(jobs, 1, static_cast<int>(grid.size()));
    std::vector<std::thread> pool;
    for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    struct Acc {
        BatchRow row;
        long long queries = 0;
        double prompt = 0, output = 0, total = 0, wall = 0;
    };
    std::vector<Acc> groups;
    for (const auto& r : report.results) {
        const std::string backend = describe(r.cell.backend);
        const std::string ablation = ablation_name(r.cell.config.ablation);
        const int difficulty = r.cell.config.difficulty;
        auto it = std::find_if(groups.begin(), groups.end(), [&](const Acc& a) {
            return a.row.backend == backend && a.row.ablation == ablation && a.row.difficulty == difficulty;
        });
        if (it == groups.end()) {
            groups.push_back({});
            it = groups.end() - 1;
            it->row.backend = backend;
            it->row.ablation = ablation;
            it->row.difficulty = difficulty;
        }
        ++it->row.games;
        if (r.error) {
            ++it->row.errors;
            ++it->row.losses;
        } else if (r.outcome == Outcome::Win) {
            ++it->row.wins;
        } else if (r.outcome == Outcome::Loss) {
            ++it->row.losses;
        } else {
            ++it->row.draws;
        }
        it->queries += r.totals.queries;
        it->prompt += static_cast<double>(r.totals.prompt_tokens);
        it->output += static_cast<double>(r.totals.output_tokens);
        it->total += static_cast<double>(r.totals.total_tokens);
        it->wall += r.totals.wall_time_s;
    }
    for (auto& g : groups) {
        if (g.queries > 0) {
            const double q = static_cast<double>(g.queries);
            g.row.per_query = {g.prompt / q, g.output / q, g.total / q, g.wall / q};
        }
        report.rows.push_back(g.row);
    }
    return report;
}

namespace {

void apply_fields(const YAML::Node& node, BatchCell& cell, std::vector<std::uint64_t>& seeds) {
    try {
        if (node["difficulty"]) {
            const auto text = node["difficulty"].as<std::string>();
            auto level = parse_difficulty_level(text);
            if (!level) throw ConfigError("unknown difficulty '" + text + "'");
            cell.config.difficulty = *level;
        }
        if (node["ablation"]) {
            const auto text = node["ablation"].as<std::string>();
            auto a = parse_ablation(text);
            if (!a) throw ConfigError("unknown ablation '" + text + "'");
            cell.config.ablation = *a;
        }
        if (node["backend"]) cell.backend = parse_backend_spec(node["backend"].as<std::string>());
        if (node["n"]) cell.config.n = node["n"].as<int>();
        if (node["max_ticks"]) cell.config.max_ticks = node["max_ticks"].as<int>();
        if (node["enforce_hierarchy"]) {
            cell.config.enforce = parse_enforce_mode(node["enforce_hierarchy"].as<std::string>());
        }
        if (node["seed"]) seeds = {node["seed"].as<std::uint64_t>()};
        if (node["seeds"]) {
            seeds.clear();
            for (const auto& s : node["seeds"]) seeds.push_back(s.as<std::uint64_t>());
        }
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("bad grid entry: ") + e.what());
    }
}

}  // namespace

std::vector<BatchCell> parse_grid(std::string_view yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("malformed grid: ") + e.what());
    }
    if (!root.IsMap() || !root["cells"] || !root["cells"].IsSequence()) {
        throw ConfigError("grid needs a 'cells' list");
    }
    BatchCell defaults;
    std::vector<std::uint64_t> default_seeds{0};
    if (root["defaults"]) apply_fields(root["defaults"], defaults, default_seeds);

    std::vector<BatchCell> grid;
    for (const auto& node : root["cells"]) {
        BatchCell cell = defaults;
        std::vector<std::uint64_t> seeds = default_seeds;
        apply_fields(node, cell, seeds);
        for (auto s : seeds) {
            cell.config.seed = s;
            validate(cell.config);
            grid.push_back(cell);
        }
    }
    return grid;
}

std::vector<BatchCell> load_grid(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read grid file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_grid(ss.str());
}

}  // namespace hep
