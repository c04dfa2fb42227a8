#include "hep/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "hep/agent_runtime.hpp"
#include "hep/error.hpp"

#ifndef HEP_DEFAULT_ASSETS_DIR
#define HEP_DEFAULT_ASSETS_DIR "assets"
#endif

namespace hep {

namespace {

namespace fs = std::filesystem;

// A usage problem found after CLI11 accepted the command line.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string check_difficulty(const std::string& v) {
    return parse_difficulty_level(v) ? "" : "no such difficulty level '" + v + "' (use 4-7 or hard|harder|veryhard|elite)";
}

std::string check_ablation(const std::string& v) {
    return parse_ablation(v) ? "" : "unknown ablation '" + v + "' (use full|no-etp|no-hdp|no-etp-no-hdp)";
}

std::string check_enforce(const std::string& v) {
    try {
        parse_enforce_mode(v);
        return "";
    } catch (const ConfigError& e) {
        return e.what();
    }
}

std::string check_backend(const std::string& v) {
    try {
        parse_backend_spec(v);
        return "";
    } catch (const ConfigError& e) {
        return e.what();
    }
}

void write_file(const fs::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("write failed on " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream ss;
    ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return ss.str();
}

// Refuses network backends unless --live was given and the secret is present.
void gate_live(const BackendConfig& backend, bool live) {
    if (backend.kind != BackendKind::Live) return;
    if (!live) throw UsageError("live backends need the --live flag");
    const char* token = std::getenv(backend.auth_env.c_str());
    if (!token || !*token) throw ConfigError("environment variable " + backend.auth_env + " is not set");
}

std::string counts_line(const UnitCounts& counts) {
    std::string out;
    for (auto k : kAllUnits) {
        if (!is_player_unit(k)) continue;
        if (!out.empty()) out += ", ";
        out += std::string(name_of(k)) + " " + std::to_string(counts[idx(k)]);
    }
    return out;
}

std::string outcome_text(const std::optional<Outcome>& o) {
    return o ? std::string(to_string(*o)) : std::string("unfinished");
}

std::string summary_text(const MatchRecord& r, const std::string& digest) {
    const auto& s = r.final_state;
    const auto& c = r.compliance;
    std::ostringstream out;
    out << "backend: " << r.backend << "\n"
        << "difficulty: " << difficulty_name(r.config.difficulty) << " (" << r.config.difficulty << ")\n"
        << "seed: " << r.config.seed << "\n"
        << "ablation: " << ablation_name(r.config.ablation) << "\n"
        << "n: " << r.config.n << "\n"
        << "enforce_hierarchy: " << to_string(r.config.enforce) << "\n"
        << "outcome: " << outcome_text(r.outcome) << "\n"
        << "ticks: " << r.ticks << "\n"
        << "game_time: " << format_clock(s.time_s) << "\n"
        << "queries: " << r.totals.queries << "\n"
        << "backend_errors: " << r.totals.backend_errors << "\n"
        << "prompt_tokens: " << r.totals.prompt_tokens << "\n"
        << "output_tokens: " << r.totals.output_tokens << "\n"
        << "total_tokens: " << r.totals.total_tokens << "\n"
        << "wall_time_s: " << std::fixed << std::setprecision(3) << r.totals.wall_time_s << "\n"
        << "priority_active_steps: " << c.priority_active_steps << "/" << c.steps << "\n"
        << "compliant_steps: " << c.compliant_steps << "/" << c.steps << "\n"
        << "suppressed_actions: " << c.suppressed_total << "\n"
        << "inserted_priorities: " << c.inserted_total << "\n"
        << "units_alive: " << counts_line(s.units) << "\n"
        << "units_trained: " << counts_line(s.units_trained) << "\n"
        << "units_lost: " << counts_line(s.units_lost) << "\n"
        << "research_completed: " << s.research_completed << "\n"
        << "attacks_launched: " << s.attacks_launched << "\n"
        << "enemy_waves: " << s.enemy.waves_sent << "\n"
        << "enemy_bases_left: " << s.enemy.hatchery_hp.size() << "\n"
        << "actions_skipped: " << s.actions_skipped << "\n"
        << "minerals_collected_total: " << s.minerals_collected() << "\n"
        << "gas_collected_total: " << s.gas_collected() << "\n"
        << "digest: " << digest << "\n";
    return out.str();
}

constexpr std::string_view kPlotScript =
    "# gnuplot telemetry.csv overview; run: gnuplot -p plot.gp\n"
    "set datafile separator ','\n"
    "set key autotitle columnhead\n"
    "set xlabel 'time (s)'\n"
    "set multiplot layout 2,2\n"
    "plot 'telemetry.csv' using 1:4 with lines, '' using 1:5 with lines\n"
    "plot 'telemetry.csv' using 1:2 with lines, '' using 1:3 with lines\n"
    "plot 'telemetry.csv' using 1:6 with lines, '' using 1:7 with lines\n"
    "plot 'telemetry.csv' using 1:8 with lines, '' using 1:9 with lines\n"
    "unset multiplot\n";

// Writes the per-match files. Only meta.json may carry a timestamp.
void write_match_dir(const fs::path& dir, const MatchRecord& r, const std::optional<std::string>& created) {
    ensure_dir(dir);
    const std::string digest = match_digest(r);
    write_file(dir / "summary.txt", summary_text(r, digest));
    export_csv(r.telemetry.series(), dir / "telemetry.csv");
    export_jsonl(r.queries, dir / "record.jsonl");
    write_file(dir / "snapshots.csv", snapshots_to_csv(r.telemetry.snapshots()));
    write_file(dir / "tactic_trace.csv", trace_to_csv(r.telemetry.tactic_trace()));
    write_file(dir / "plot.gp", kPlotScript);

    nlohmann::ordered_json meta;
    if (created) meta["created_utc"] = *created;
    meta["backend"] = r.backend;
    meta["difficulty"] = r.config.difficulty;
    meta["seed"] = r.config.seed;
    meta["ablation"] = ablation_name(r.config.ablation);
    meta["n"] = r.config.n;
    meta["enforce_hierarchy"] = to_string(r.config.enforce);
    meta["max_ticks"] = r.config.max_ticks;
    meta["outcome"] = outcome_text(r.outcome);
    meta["digest"] = digest;
    write_file(dir / "meta.json", meta.dump(2) + "\n");
}

struct Common {
    std::string assets_dir = HEP_DEFAULT_ASSETS_DIR;
    bool live = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--assets-dir", c.assets_dir, "Directory holding prompts/ and game/")->capture_default_str();
    cmd->add_flag("--live", c.live, "Allow live (network) backends; needs the auth variable set");
}

struct PlayArgs {
    std::string difficulty = "veryhard";
    std::uint64_t seed = 0;
    std::string backend = "scripted:hep_oracle";
    int n = 20;
    std::string ablation = "full";
    std::string enforce = "on";
    int max_ticks = 1500;
    std::string out_dir = "out/play";
    std::string record;
};

int do_play(const PlayArgs& a, const Common& c, std::ostream& out) {
    RuntimeConfig config;
    config.difficulty = *parse_difficulty_level(a.difficulty);
    config.seed = a.seed;
    config.n = a.n;
    config.ablation = *parse_ablation(a.ablation);
    config.enforce = parse_enforce_mode(a.enforce);
    config.max_ticks = a.max_ticks;
    validate(config);
    BackendConfig backend = parse_backend_spec(a.backend);
    if (!a.record.empty()) backend.record_path = a.record;
    gate_live(backend, c.live);

    const World world = load_world(c.assets_dir);
    const MatchRecord rec = run_match(config, world, backend);
    write_match_dir(a.out_dir, rec, utc_now());
    out << "outcome: " << outcome_text(rec.outcome) << " at " << format_clock(rec.final_state.time_s) << "\n"
        << "wrote " << a.out_dir << "\n";
    return 0;
}

struct GridArgs {
    std::string grid_file;
    std::string out_dir = "out/batch";
    int jobs = 0;
};

int default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string results_csv(const BatchReport& report) {
    std::string out = "index,backend,ablation,difficulty,seed,n,enforce_hierarchy,outcome,error,queries,"
                      "total_tokens,digest\n";
    for (std::size_t i = 0; i < report.results.size(); ++i) {
        const auto& r = report.results[i];
        const auto& cfg = r.cell.config;
        std::string error = r.error.value_or("");
        for (auto& ch : error) {
            if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
        }
        out += std::to_string(i) + "," + describe(r.cell.backend) + "," + ablation_name(cfg.ablation) + "," +
               difficulty_name(cfg.difficulty) + "," + std::to_string(cfg.seed) + "," + std::to_string(cfg.n) + "," +
               std::string(to_string(cfg.enforce)) + "," + (r.error ? std::string("error") : outcome_text(r.outcome)) +
               "," + error + "," + std::to_string(r.totals.queries) + "," + std::to_string(r.totals.total_tokens) +
               "," + r.digest + "\n";
    }
    return out;
}

std::string cell_dir_name(std::size_t i) {
    std::ostringstream ss;
    ss << "match_" << std::setw(3) << std::setfill('0') << i;
    return ss.str();
}

struct GridRun {
    std::vector<BatchCell> grid;
    BatchReport report;
    std::vector<std::vector<SeriesPoint>> series;
};

GridRun run_grid(const GridArgs& a, const Common& c, const std::string& verb) {
    GridRun run;
    run.grid = load_grid(a.grid_file);
    for (const auto& cell : run.grid) gate_live(cell.backend, c.live);
    const World world = load_world(c.assets_dir);
    ensure_dir(a.out_dir);
    run.series.resize(run.grid.size());
    const fs::path root = a.out_dir;
    run.report = run_batch(run.grid, world, a.jobs > 0 ? a.jobs : default_jobs(),
                           [&](std::size_t i, const MatchRecord& rec) {
                               write_match_dir(root / cell_dir_name(i), rec, std::nullopt);
                               run.series[i] = rec.telemetry.series();
                           });
    write_file(root / "results.csv", results_csv(run.report));
    write_file(root / "summary.csv", run.report.render());

    nlohmann::ordered_json meta;
    meta["created_utc"] = utc_now();
    meta["verb"] = verb;
    meta["grid_file"] = a.grid_file;
    meta["cells"] = run.grid.size();
    write_file(root / "meta.json", meta.dump(2) + "\n");
    return run;
}

int do_batch(const GridArgs& a, const Common& c, std::ostream& out) {
    const GridRun run = run_grid(a, c, "batch");
    out << run.report.render();
    return 0;
}

int do_ablate(const GridArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
    const GridRun run = run_grid(a, c, "ablate");
    auto first_of = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < run.grid.size(); ++i) {
            if (ablation_name(run.grid[i].config.ablation) == name && !run.report.results[i].error) return i;
        }
        return std::nullopt;
    };

    std::string text = run.report.render();
    const auto full = first_of("full");
    if (!full) err << "warning: grid has no completed full cell; no comparisons written\n";
    for (const std::string name : {"no-etp", "no-hdp"}) {
        const auto other = first_of(name);
        if (!other) {
            err << "warning: grid has no completed " << name << " cell; skipping that comparison\n";
            continue;
        }
        if (!full) continue;
        const ComparisonTable table = compare_report(run.series[*full], run.series[*other], kDefaultCheckpoints,
                                                     "full", name);
        write_file(fs::path(a.out_dir) / ("compare_full_vs_" + name + ".csv"), table.render());
        text += "\nfull vs " + name + "\n" + table.render();
    }
    write_file(fs::path(a.out_dir) / "ablation_report.txt", text);
    out << text;
    return 0;
}

struct ReportArgs {
    std::string a, b;
    std::string label_a = "a", label_b = "b";
    std::vector<int> checkpoints = kDefaultCheckpoints;
    std::string out_file;
};

fs::path telemetry_path(const fs::path& p) { return fs::is_directory(p) ? p / "telemetry.csv" : p; }

int do_report(const ReportArgs& a, std::ostream& out) {
    const auto sa = import_csv(telemetry_path(a.a));
    const auto sb = import_csv(telemetry_path(a.b));
    const std::string table = compare_report(sa, sb, a.checkpoints, a.label_a, a.label_b).render();
    if (!a.out_file.empty()) write_file(a.out_file, table);
    out << table;
    return 0;
}

struct InspectArgs {
    std::string ablation = "full";
    std::string obs_file;
};

int do_inspect(const InspectArgs& a, const Common& c, std::ostream& out) {
    const PromptAssets assets = load_assets(fs::path(c.assets_dir) / "prompts");
    std::string obs = a.obs_file.empty() ? assets.example_input : read_file(a.obs_file);
    const MessageList messages = build_messages(obs, assets, *parse_ablation(a.ablation));
    std::size_t total = 0;
    for (const auto& m : messages) {
        out << "=== " << to_string(m.role) << " (" << m.content.size() << " bytes) ===\n" << m.content << "\n";
        total += m.content.size();
    }
    out << "=== total: " << total << " bytes in " << messages.size() << " messages ===\n";
    return 0;
}

int do_dump_actions(bool annotate, std::ostream& out) {
    if (!annotate) {
        out << render_action_library();
        return 0;
    }
    for (const auto& t : action_library()) {
        out << t.surface << "\t" << to_string(t.group) << "\t" << to_string(t.category) << "\n";
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hierarchical expert prompt agent for a StarCraft II style macro simulator", "hep"};
    app.require_subcommand(1);
    Common common;

    PlayArgs play;
    auto* play_cmd = app.add_subcommand("play", "Run one match and write its out-dir");
    add_common(play_cmd, common);
    play_cmd->add_option("--difficulty", play.difficulty, "4-7 or hard|harder|veryhard|elite")
        ->check(CLI::Validator(check_difficulty, "LEVEL"))
        ->capture_default_str();
    play_cmd->add_option("--seed", play.seed, "Match seed")->capture_default_str();
    play_cmd->add_option("--backend", play.backend, "scripted:<policy> | replay:<path> | live:<endpoint>")
        ->check(CLI::Validator(check_backend, "SPEC"))
        ->capture_default_str();
    play_cmd->add_option("--n", play.n, "Ticks between agent queries")->check(CLI::PositiveNumber)->capture_default_str();
    play_cmd->add_option("--ablation", play.ablation, "full | no-etp | no-hdp | no-etp-no-hdp")
        ->check(CLI::Validator(check_ablation, "ABLATION"))
        ->capture_default_str();
    play_cmd->add_option("--enforce-hierarchy", play.enforce, "on | off | report-only")
        ->check(CLI::Validator(check_enforce, "MODE"))
        ->capture_default_str();
    play_cmd->add_option("--max-ticks", play.max_ticks, "Tick budget")->check(CLI::PositiveNumber)->capture_default_str();
    play_cmd->add_option("--out-dir", play.out_dir, "Output directory")->capture_default_str();
    play_cmd->add_option("--record", play.record, "Append every exchange to this transcript (JSONL)");

    GridArgs batch;
    auto* batch_cmd = app.add_subcommand("batch", "Run every cell of a grid file and tabulate win rates");
    add_common(batch_cmd, common);
    batch_cmd->add_option("--grid-file", batch.grid_file, "Grid YAML")->required()->check(CLI::ExistingFile);
    batch_cmd->add_option("--out-dir", batch.out_dir, "Output directory")->capture_default_str();
    batch_cmd->add_option("--jobs", batch.jobs, "Parallel matches (default: processors)")->check(CLI::NonNegativeNumber);

    GridArgs ablate;
    ablate.out_dir = "out/ablate";
    auto* ablate_cmd = app.add_subcommand("ablate", "Run an ablation grid and compare full against each ablation");
    add_common(ablate_cmd, common);
    ablate_cmd->add_option("--grid-file", ablate.grid_file, "Grid YAML")->required()->check(CLI::ExistingFile);
    ablate_cmd->add_option("--out-dir", ablate.out_dir, "Output directory")->capture_default_str();
    ablate_cmd->add_option("--jobs", ablate.jobs, "Parallel matches (default: processors)")->check(CLI::NonNegativeNumber);

    ReportArgs report;
    auto* report_cmd = app.add_subcommand("report", "Compare two telemetry CSVs at checkpoints");
    report_cmd->add_option("--a", report.a, "telemetry.csv or a play out-dir")->required();
    report_cmd->add_option("--b", report.b, "telemetry.csv or a play out-dir")->required();
    report_cmd->add_option("--label-a", report.label_a)->capture_default_str();
    report_cmd->add_option("--label-b", report.label_b)->capture_default_str();
    report_cmd->add_option("--checkpoints", report.checkpoints, "Times in seconds")->delimiter(',');
    report_cmd->add_option("--out", report.out_file, "Also write the table here");

    InspectArgs inspect;
    auto* inspect_cmd = app.add_subcommand("inspect-prompt", "Print the assembled messages with byte counts");
    add_common(inspect_cmd, common);
    inspect_cmd->add_option("--ablation", inspect.ablation, "full | no-etp | no-hdp | no-etp-no-hdp")
        ->check(CLI::Validator(check_ablation, "ABLATION"))
        ->capture_default_str();
    inspect_cmd->add_option("--obs-file", inspect.obs_file, "Observation text (default: the bundled example)");

    bool annotate = false;
    auto* dump_cmd = app.add_subcommand("dump-actions", "Print the legal action library");
    dump_cmd->add_flag("--annotate", annotate, "Add group and category columns");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*play_cmd) return do_play(play, common, out);
        if (*batch_cmd) return do_batch(batch, common, out);
        if (*ablate_cmd) return do_ablate(ablate, common, out, err);
        if (*report_cmd) return do_report(report, out);
        if (*inspect_cmd) return do_inspect(inspect, common, out);
        if (*dump_cmd) return do_dump_actions(annotate, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const AssetMissing& e) {
        err << "error: AssetMissing: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace hep
