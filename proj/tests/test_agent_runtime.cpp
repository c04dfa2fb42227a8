#include "hep/agent_runtime.hpp"

#include "hep/error.hpp"
#include "support.hpp"

using namespace hep;

namespace {

// Frozen from one run of the bundled oracle and schedules.
const std::string kVeryHardSeed7Digest = "118b026e6a166bb20da56d9b5494fa73cf1741cf329be2b9c30d670b13cb3d72";

class FailingBackend final : public ChatBackend {
public:
    ChatResult chat(const MessageList&) override { throw BackendUnavailable("down for the test"); }
};

class FixedBackend final : public ChatBackend {
public:
    explicit FixedBackend(std::string text) : text_(std::move(text)) {}
    ChatResult chat(const MessageList& m) override {
        return {text_, make_meter(estimate_prompt_tokens(m), estimate_tokens(text_), 0.0)};
    }

private:
    std::string text_;
};

Simulator sim_for(int level) { return Simulator(test::world().game, test::world().schedules.at(level)); }

BackendConfig scripted(const std::string& policy) { return parse_backend_spec("scripted:" + policy); }

int expected_queries(int ticks, int n) {
    int q = 0;
    for (int t = 0; t < ticks; ++t) q += t % n == 0;
    return q;
}

}  // namespace

TEST_CASE("config validation") {
    RuntimeConfig c;
    CHECK_NOTHROW(validate(c));
    c.n = 0;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c.n = 1;
    c.max_ticks = 0;
    CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("queries happen exactly on ticks divisible by n") {
    const auto sim = sim_for(6);
    ScriptedBackend noop(Policy::NoopOracle);
    for (int n : {1, 2, 3, 5, 20}) {
        for (int ticks = 1; ticks <= 100; ++ticks) {
            RuntimeConfig c;
            c.n = n;
            c.max_ticks = ticks;
            const auto rec = run_match(c, test::world().assets, noop, sim);
            REQUIRE(rec.ticks == ticks);
            CHECK(rec.totals.queries == expected_queries(ticks, n));
            CHECK(static_cast<int>(rec.queries.size()) == rec.totals.queries);
            CHECK(rec.telemetry.tactic_trace().size() == rec.queries.size());
            for (const auto& q : rec.queries) CHECK(q.tick % n == 0);
        }
    }
}

TEST_CASE("small cadence examples") {
    const auto sim = sim_for(6);
    ScriptedBackend noop(Policy::NoopOracle);
    RuntimeConfig c;
    c.n = 1;
    c.max_ticks = 10;
    CHECK(run_match(c, test::world().assets, noop, sim).totals.queries == 10);
    c.n = 3;
    c.max_ticks = 9;
    const auto rec = run_match(c, test::world().assets, noop, sim);
    REQUIRE(rec.queries.size() == 3);
    CHECK(rec.queries[0].tick == 0);
    CHECK(rec.queries[1].tick == 3);
    CHECK(rec.queries[2].tick == 6);
    CHECK_FALSE(rec.outcome.has_value());
}

TEST_CASE("a backend that always fails plays like the idle oracle") {
    for (std::uint64_t seed : {0u, 7u}) {
        const auto sim = sim_for(6);
        RuntimeConfig c;
        c.seed = seed;
        FailingBackend failing;
        ScriptedBackend noop(Policy::NoopOracle);
        const auto a = run_match(c, test::world().assets, failing, sim);
        const auto b = run_match(c, test::world().assets, noop, sim);
        CHECK(serialize(a.final_state) == serialize(b.final_state));
        CHECK(a.outcome == b.outcome);
        CHECK(a.totals.backend_errors == a.totals.queries);
        for (const auto& q : a.queries) {
            REQUIRE(q.error.has_value());
            CHECK(q.meter.total_tokens == q.meter.prompt_tokens);
        }
    }
}

TEST_CASE("enforcement modes decide what is executed") {
    const auto sim = sim_for(6);
    FixedBackend backend("Priority: BUILD NEXUS\n<TRAIN ZEALOT> <TRAIN PROBE>");
    RuntimeConfig c;
    c.max_ticks = 1;

    c.enforce = EnforceMode::On;
    auto on = run_match(c, test::world().assets, backend, sim).queries.at(0);
    CHECK(on.decision.validated_actions ==
          std::vector{token(ActionId::BuildNexus), token(ActionId::TrainProbe)});
    CHECK(on.report.suppressed.size() == 1);

    c.enforce = EnforceMode::ReportOnly;
    auto report_only = run_match(c, test::world().assets, backend, sim).queries.at(0);
    CHECK(report_only.decision.validated_actions == report_only.decision.raw_actions);
    CHECK(report_only.report.suppressed.size() == 1);
    CHECK_FALSE(report_only.report.compliant);

    c.enforce = EnforceMode::Off;
    auto off = run_match(c, test::world().assets, backend, sim).queries.at(0);
    CHECK(off.decision.validated_actions == off.decision.raw_actions);
    CHECK(off.report.suppressed.empty());
    CHECK(off.report.priority_active);
}

TEST_CASE("hep_oracle wins VeryHard seed 7 the same way every time") {
    RuntimeConfig c;
    c.seed = 7;
    c.difficulty = 6;
    const auto a = run_match(c, test::world(), scripted("hep_oracle"));
    const auto b = run_match(c, test::world(), scripted("hep_oracle"));
    CHECK(a.outcome == Outcome::Win);
    CHECK(a.ticks == 881);
    CHECK(format_clock(a.final_state.time_s) == "14:40");
    CHECK(match_digest(a) == match_digest(b));
    CHECK(match_digest(a) == kVeryHardSeed7Digest);

    const auto known = tactic_names(test::world().assets);
    for (const auto& q : a.queries) {
        CHECK_FALSE(q.decision.raw_actions.empty());
        REQUIRE(q.decision.current_tactic.has_value());
        CHECK(std::find(known.begin(), known.end(), *q.decision.current_tactic) != known.end());
        CHECK(q.meter.total_tokens == q.meter.prompt_tokens + q.meter.output_tokens);
    }
    CHECK(a.totals.queries == expected_queries(a.ticks, c.n));
    CHECK(a.compliance.steps == a.totals.queries);
}

TEST_CASE("batch") {
    const auto& world = test::world();

    SUBCASE("empty grid") { CHECK_THROWS_AS(run_batch({}, world), EmptyGrid); }

    SUBCASE("twelve seeds of hep_oracle at Hard") {
        std::vector<BatchCell> grid;
        for (std::uint64_t s = 0; s < 12; ++s) {
            BatchCell cell;
            cell.config.difficulty = 4;
            cell.config.seed = s;
            cell.backend = scripted("hep_oracle");
            grid.push_back(cell);
        }
        const auto report = run_batch(grid, world, 4);
        REQUIRE(report.rows.size() == 1);
        CHECK(win_rate_cell(report.rows[0].wins, report.rows[0].games) == "12/12 (100%)");
        CHECK(report.render().find(",Hard,12/12 (100%),12,0,0,0,") != std::string::npos);
    }

    SUBCASE("thread count does not change the report") {
        const auto grid = parse_grid(
            "defaults: {difficulty: harder, seeds: [1, 2]}\n"
            "cells:\n"
            "  - {backend: 'scripted:hep_oracle'}\n"
            "  - {backend: 'scripted:baseline_oracle', ablation: no-etp-no-hdp}\n"
            "  - {backend: 'scripted:noop_oracle', n: 7, max_ticks: 300}\n");
        REQUIRE(grid.size() == 6);
        const auto one = run_batch(grid, world, 1);
        const auto many = run_batch(grid, world, 6);
        CHECK(one.render() == many.render());
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(one.results[i].digest == many.results[i].digest);
        CHECK(one.rows.size() == 3);
    }

    SUBCASE("a cell that cannot run is a loss with an error") {
        BatchCell bad;
        bad.backend = parse_backend_spec("replay:/nonexistent/transcript.jsonl");
        bad.config.max_ticks = 5;
        const auto report = run_batch({bad}, world);
        REQUIRE(report.results[0].error.has_value());
        CHECK(report.rows[0].errors == 1);
        CHECK(report.rows[0].losses == 1);
    }
}

TEST_CASE("grid files") {
    const auto grid = parse_grid(
        "defaults: {backend: 'scripted:hep_oracle', difficulty: veryhard, seeds: [1, 2, 3]}\n"
        "cells:\n"
        "  - {ablation: full}\n"
        "  - {ablation: no-etp, seed: 9, n: 10, enforce_hierarchy: report-only}\n");
    REQUIRE(grid.size() == 4);
    CHECK(grid[0].config.seed == 1);
    CHECK(grid[2].config.seed == 3);
    CHECK(grid[3].config.seed == 9);
    CHECK(grid[3].config.n == 10);
    CHECK(grid[3].config.enforce == EnforceMode::ReportOnly);
    CHECK_FALSE(grid[3].config.ablation.include_etp);
    CHECK(grid[0].config.difficulty == 6);

    CHECK_THROWS_AS(parse_grid("cells: [{difficulty: nightmare}]"), ConfigError);
    CHECK_THROWS_AS(parse_grid("cells: [{n: 0}]"), ConfigError);
    CHECK_THROWS_AS(parse_grid("just text"), ConfigError);
    CHECK_THROWS_AS(parse_grid("cells: [unclosed"), ConfigError);
    CHECK_THROWS_AS(load_grid("/nonexistent/grid.yaml"), ConfigError);
    CHECK(load_grid(test::kAssets / "grids" / "ablation.yaml").size() == 9);
}

TEST_CASE("difficulty names") {
    CHECK(difficulty_name(4) == "Hard");
    CHECK(difficulty_name(7) == "Elite");
    CHECK(win_rate_cell(9, 12) == "9/12 (75%)");
    CHECK(win_rate_cell(0, 0) == "0/0 (0%)");
}
