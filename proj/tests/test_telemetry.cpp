#include "hep/telemetry.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

#include "hep/agent_runtime.hpp"
#include "hep/error.hpp"
#include "support.hpp"

using namespace hep;

namespace {

SeriesPoint point(int t, int minerals_total, int gas_total) {
    SeriesPoint p;
    p.time_s = t;
    p.minerals_collected_total = minerals_total;
    p.gas_collected_total = gas_total;
    p.minerals_bank = minerals_total / 2;
    p.supply_used = 12 + t / 10;
    p.supply_cap = 15 + t / 5;
    p.worker_supply = 12;
    p.pylon_count = t / 100;
    return p;
}

std::vector<SeriesPoint> oracle_run(int level, const std::string& policy, std::uint64_t seed = 7) {
    RuntimeConfig c;
    c.difficulty = level;
    c.seed = seed;
    return run_match(c, test::world(), parse_backend_spec("scripted:" + policy)).telemetry.series();
}

}  // namespace

TEST_CASE("csv header and metric names") {
    CHECK(kCsvHeader ==
          "time_s,minerals_bank,gas_bank,minerals_collected_total,gas_collected_total,worker_supply,army_supply,"
          "supply_used,supply_cap,pylon_count");
    CHECK(series_metrics().size() == 9);
    CHECK(series_metrics().front() == "minerals_bank");
    CHECK_THROWS_AS(metric_value(SeriesPoint{}, "happiness"), ConfigError);
}

TEST_CASE("csv export and import") {
    const auto dir = test::scratch("telemetry_csv");
    CHECK(to_csv({}) == std::string(kCsvHeader) + "\n");

    const std::vector<SeriesPoint> three{point(0, 50, 0), point(1, 61, 0), point(2, 73, 4)};
    const std::string csv = to_csv(three);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    CHECK(parse_csv(csv) == three);

    const auto real = oracle_run(6, "hep_oracle");
    export_csv(real, dir / "series.csv");
    CHECK(import_csv(dir / "series.csv") == real);

    CHECK_THROWS_AS(parse_csv("time_s,nope\n1,2\n"), IoError);
    CHECK_THROWS_AS(parse_csv(std::string(kCsvHeader) + "\n1,2,3\n"), IoError);
    CHECK_THROWS_AS(import_csv(dir / "absent.csv"), IoError);
}

TEST_CASE("sampling") {
    const auto& w = test::world();
    Simulator sim(w.game, w.schedules.at(6));
    TelemetrySink sink(w.game, TelemetryConfig{{100, 200}});
    auto [s, obs] = sim.reset(0);
    CHECK(sink.sample(s));
    REQUIRE(sink.series().size() == 1);
    CHECK(sink.series()[0].minerals_bank == 50);
    CHECK(sink.series()[0].supply_used == 12);
    CHECK_FALSE(sink.sample(s));
    CHECK(sink.series().size() == 1);

    const std::vector<ActionToken> idle{token(ActionId::EmptyAction)};
    while (s.time_s < 200) {
        s = sim.step(std::move(s), idle, 1);
        CHECK(sink.sample(s));
    }
    REQUIRE(sink.snapshots().size() == 2);
    CHECK(sink.snapshots()[0].time_s == 100);
    CHECK(sink.snapshots()[1].time_s == 200);
    CHECK(sink.snapshots()[1].supply_by_unit[idx(UnitKind::Probe)] == 12);
    for (std::size_t i = 1; i < sink.series().size(); ++i) {
        CHECK(sink.series()[i].time_s > sink.series()[i - 1].time_s);
    }
}

TEST_CASE("snapshot and trace csv") {
    RuntimeConfig c;
    c.seed = 7;
    const auto rec = run_match(c, test::world(), parse_backend_spec("scripted:hep_oracle"));
    const auto snaps = snapshots_to_csv(rec.telemetry.snapshots());
    CHECK(snaps.starts_with("time_s,"));
    CHECK(std::count(snaps.begin(), snaps.end(), '\n') == 1 + static_cast<long>(rec.telemetry.snapshots().size()));
    const auto trace = trace_to_csv(rec.telemetry.tactic_trace());
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 1 + static_cast<long>(rec.queries.size()));
    CHECK(trace.find("Carrier tactic") != std::string::npos);
}

TEST_CASE("query records as json lines") {
    RuntimeConfig c;
    c.seed = 3;
    c.max_ticks = 100;
    const auto rec = run_match(c, test::world(), parse_backend_spec("scripted:hep_oracle"));
    const auto dir = test::scratch("telemetry_jsonl");
    export_jsonl(rec.queries, dir / "record.jsonl");
    std::istringstream in(test::slurp(dir / "record.jsonl"));
    std::string line;
    std::size_t i = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        const auto& q = rec.queries.at(i++);
        for (const char* key : {"tick", "time_s", "observation_digest", "current_tactic", "priority", "raw_actions",
                                "validated_actions", "violations", "hierarchy", "prompt_tokens", "output_tokens",
                                "total_tokens", "wall_time_s", "error", "response"}) {
            CHECK_MESSAGE(j.contains(key), key);
        }
        CHECK(j["tick"] == q.tick);
        CHECK(j["total_tokens"] == q.meter.total_tokens);
        CHECK(j["raw_actions"].size() == q.decision.raw_actions.size());
    }
    CHECK(i == rec.queries.size());
}

TEST_CASE("interpolation") {
    std::vector<SeriesPoint> s{point(0, 0, 0), point(10, 100, 10)};
    CHECK(*interpolate(s, "minerals_collected_total", 2.5) == doctest::Approx(25.0));
    CHECK(*interpolate(s, "minerals_collected_total", 10) == doctest::Approx(100.0));
    CHECK_FALSE(interpolate(s, "minerals_collected_total", 11).has_value());
    CHECK_FALSE(interpolate({}, "gas_bank", 0).has_value());
}

TEST_CASE("compare_report") {
    const auto hep_run = oracle_run(6, "hep_oracle");
    const auto base_run = oracle_run(6, "baseline_oracle");

    SUBCASE("identical runs") {
        const auto t = compare_report(hep_run, hep_run);
        for (const auto& cell : t.cells) {
            if (cell.ratio) CHECK(*cell.ratio == 1.0);
        }
    }
    SUBCASE("swapping the runs inverts every ratio") {
        const auto ab = compare_report(hep_run, base_run);
        const auto ba = compare_report(base_run, hep_run);
        REQUIRE(ab.cells.size() == ba.cells.size());
        int defined = 0;
        for (std::size_t i = 0; i < ab.cells.size(); ++i) {
            if (ab.cells[i].ratio && ba.cells[i].ratio) {
                CHECK(std::abs(*ab.cells[i].ratio * *ba.cells[i].ratio - 1.0) <= 1e-9);
                ++defined;
            }
        }
        CHECK(defined > 0);
    }
    SUBCASE("zero denominator is undefined") {
        std::vector<SeriesPoint> a{point(0, 50, 0), point(600, 5000, 500)};
        std::vector<SeriesPoint> b{point(0, 50, 0), point(600, 4000, 0)};
        const auto t = compare_report(a, b, {480});
        const auto* gas = t.find(480, "gas_collected_total");
        REQUIRE(gas != nullptr);
        CHECK(gas->b == 0.0);
        CHECK_FALSE(gas->ratio.has_value());
        CHECK(t.render().find("gas_collected_total") != std::string::npos);
    }
    SUBCASE("runs that never overlap") {
        std::vector<SeriesPoint> a{point(0, 0, 0), point(10, 1, 1)};
        std::vector<SeriesPoint> b{point(20, 0, 0), point(30, 1, 1)};
        CHECK_THROWS_AS(compare_report(a, b), Incomparable);
    }
    SUBCASE("hep out-mines the baseline at five minutes") {
        const auto t = compare_report(hep_run, base_run, kDefaultCheckpoints, "hep", "baseline");
        const auto* m = t.find(300, "minerals_collected_total");
        REQUIRE(m != nullptr);
        REQUIRE(m->ratio.has_value());
        CHECK(*m->ratio > 1.0);
    }
}
