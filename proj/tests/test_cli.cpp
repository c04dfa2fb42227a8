#include "hep/cli.hpp"

#include <cstdlib>
#include <regex>

#include "hep/action_grammar.hpp"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run hep_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "hep");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Run r;
    r.code = hep::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

// Every file under `dir` except meta.json, by relative path.
std::map<std::string, std::string> tree(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file() || e.path().filename() == "meta.json") continue;
        files[fs::relative(e.path(), dir).string()] = test::slurp(e.path());
    }
    return files;
}

std::string write_grid(const std::string& name, const std::string& yaml) {
    const auto path = test::scratch("grids_" + name) / "grid.yaml";
    test::spit(path, yaml);
    return path.string();
}

}  // namespace

TEST_CASE("exit statuses") {
    CHECK(hep_cli({}).code == 2);
    CHECK(hep_cli({"--help"}).code == 0);
    CHECK(hep_cli({"fly"}).code == 2);
    CHECK(hep_cli({"play", "--no-such-flag"}).code == 2);
    CHECK(hep_cli({"play", "--difficulty", "9"}).code == 2);
    CHECK(hep_cli({"play", "--n", "0"}).code == 2);
    CHECK(hep_cli({"play", "--ablation", "half"}).code == 2);
    CHECK(hep_cli({"play", "--backend", "scripted:nobody"}).code == 2);
    CHECK(hep_cli({"batch"}).code == 2);
    CHECK(hep_cli({"batch", "--grid-file", "/nonexistent/grid.yaml"}).code == 2);

    const auto missing = hep_cli({"play", "--assets-dir", (test::scratch("cli_empty_assets")).string(), "--out-dir",
                                  (test::scratch("cli_missing_out")).string()});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("AssetMissing") != std::string::npos);

    const auto bad_grid = write_grid("bad", "cells: [{difficulty: nightmare}]\n");
    CHECK(hep_cli({"batch", "--grid-file", bad_grid, "--out-dir", test::scratch("cli_bad_grid").string()}).code ==
          1);
}

TEST_CASE("live backends need --live and the auth variable") {
    const auto out = test::scratch("cli_live").string();
    const auto no_flag = hep_cli({"play", "--backend", "live:http://127.0.0.1:1/v1", "--out-dir", out});
    CHECK(no_flag.code == 2);
    ::unsetenv("HEP_API_KEY");
    const auto no_key = hep_cli({"play", "--live", "--backend", "live:http://127.0.0.1:1/v1", "--out-dir", out});
    CHECK(no_key.code == 1);
    CHECK(no_key.err.find("HEP_API_KEY") != std::string::npos);
}

TEST_CASE("play writes a complete out-dir and reruns byte for byte") {
    const auto a = test::scratch("cli_play_a");
    const auto b = test::scratch("cli_play_b");
    const std::vector<std::string> common{"play", "--difficulty", "veryhard", "--seed", "7", "--backend",
                                          "scripted:hep_oracle"};
    auto args_a = common;
    args_a.insert(args_a.end(), {"--out-dir", a.string()});
    auto args_b = common;
    args_b.insert(args_b.end(), {"--out-dir", b.string()});

    const auto ra = hep_cli(args_a);
    REQUIRE(ra.code == 0);
    CHECK(ra.out.find("outcome: win at 14:40") != std::string::npos);
    REQUIRE(hep_cli(args_b).code == 0);

    for (const char* f : {"summary.txt", "telemetry.csv", "record.jsonl", "meta.json", "snapshots.csv",
                          "tactic_trace.csv", "plot.gp"}) {
        CHECK_MESSAGE(fs::exists(a / f), f);
    }
    const auto summary = test::slurp(a / "summary.txt");
    CHECK(summary.find("outcome: win") != std::string::npos);
    CHECK(summary.find("digest: 118b026e6a166bb20da56d9b5494fa73cf1741cf329be2b9c30d670b13cb3d72") !=
          std::string::npos);
    CHECK(test::slurp(a / "telemetry.csv").starts_with("time_s,minerals_bank,"));
    CHECK(test::slurp(a / "meta.json").find("created_utc") != std::string::npos);
    CHECK(tree(a) == tree(b));
}

TEST_CASE("batch reruns byte for byte") {
    const auto grid = write_grid("small",
                                 "defaults: {difficulty: hard, seeds: [0, 1]}\n"
                                 "cells:\n"
                                 "  - {backend: 'scripted:hep_oracle'}\n"
                                 "  - {backend: 'scripted:baseline_oracle', ablation: no-etp-no-hdp}\n");
    const auto a = test::scratch("cli_batch_a");
    const auto b = test::scratch("cli_batch_b");
    const auto ra = hep_cli({"batch", "--grid-file", grid, "--out-dir", a.string(), "--jobs", "1"});
    const auto rb = hep_cli({"batch", "--grid-file", grid, "--out-dir", b.string(), "--jobs", "4"});
    REQUIRE(ra.code == 0);
    REQUIRE(rb.code == 0);
    CHECK(ra.out == rb.out);
    CHECK(tree(a) == tree(b));
    CHECK(fs::exists(a / "match_003" / "summary.txt"));
    CHECK(test::slurp(a / "summary.csv").find("scripted:hep_oracle,full,Hard,2/2 (100%)") != std::string::npos);
}

TEST_CASE("ablate on the bundled grid") {
    const auto out = test::scratch("cli_ablate");
    const auto r = hep_cli({"ablate", "--grid-file", (test::kAssets / "grids" / "ablation.yaml").string(),
                            "--out-dir", out.string()});
    REQUIRE(r.code == 0);
    const auto report = test::slurp(out / "ablation_report.txt");
    CHECK(report.find("scripted:hep_oracle,full,VeryHard,3/3 (100%)") != std::string::npos);
    CHECK(report.find("scripted:hep_oracle,no-etp,VeryHard,0/3 (0%)") != std::string::npos);
    CHECK(report.find("scripted:hep_oracle,no-hdp,VeryHard,0/3 (0%)") != std::string::npos);
    CHECK(report.find("full vs no-etp\n") != std::string::npos);
    CHECK(report.find("full vs no-hdp\n") != std::string::npos);
    CHECK(fs::exists(out / "compare_full_vs_no-etp.csv"));
    CHECK(fs::exists(out / "compare_full_vs_no-hdp.csv"));

    const auto again = test::scratch("cli_ablate_again");
    REQUIRE(hep_cli({"ablate", "--grid-file", (test::kAssets / "grids" / "ablation.yaml").string(), "--out-dir",
                     again.string()})
                .code == 0);
    CHECK(tree(out) == tree(again));
}

TEST_CASE("ablate with the no-hdp cell missing warns and carries on") {
    const auto grid = write_grid("partial",
                                 "defaults: {backend: 'scripted:hep_oracle', difficulty: hard, seed: 1}\n"
                                 "cells:\n"
                                 "  - {ablation: full}\n"
                                 "  - {ablation: no-etp}\n");
    const auto out = test::scratch("cli_ablate_partial");
    const auto r = hep_cli({"ablate", "--grid-file", grid, "--out-dir", out.string()});
    CHECK(r.code == 0);
    CHECK(r.err.find("warning: grid has no completed no-hdp cell") != std::string::npos);
    const auto report = test::slurp(out / "ablation_report.txt");
    CHECK(report.find("full vs no-etp") != std::string::npos);
    CHECK(report.find("full vs no-hdp") == std::string::npos);
}

TEST_CASE("report compares two play out-dirs") {
    const auto a = test::scratch("cli_report_a");
    const auto b = test::scratch("cli_report_b");
    REQUIRE(hep_cli({"play", "--seed", "7", "--out-dir", a.string()}).code == 0);
    REQUIRE(hep_cli({"play", "--seed", "7", "--backend", "scripted:baseline_oracle", "--ablation", "no-etp-no-hdp",
                     "--out-dir", b.string()})
                .code == 0);
    const auto table = a / "vs.csv";
    const auto r = hep_cli({"report", "--a", a.string(), "--b", b.string(), "--label-a", "hep", "--label-b", "cos",
                            "--checkpoints", "300,480", "--out", table.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("time_s,metric,hep,cos,ratio") != std::string::npos);
    CHECK(r.out.find("300,minerals_collected_total,") != std::string::npos);
    CHECK(test::slurp(table) == r.out);
    CHECK(hep_cli({"report", "--a", (a / "nothing.csv").string(), "--b", b.string()}).code == 1);
}

TEST_CASE("inspect-prompt") {
    const auto full = hep_cli({"inspect-prompt"});
    REQUIRE(full.code == 0);
    CHECK(full.out.find("Choose Tactic") != std::string::npos);

    const auto no_etp = hep_cli({"inspect-prompt", "--ablation", "no-etp"});
    REQUIRE(no_etp.code == 0);
    CHECK(no_etp.out.find("Choose Tactic") == std::string::npos);
    CHECK(no_etp.out.find("Name: Carrier tactic") == std::string::npos);

    const std::regex header(R"(=== (\w+) \((\d+) bytes\) ===\n)");
    std::size_t sum = 0, sections = 0;
    for (auto it = std::sregex_iterator(full.out.begin(), full.out.end(), header); it != std::sregex_iterator();
         ++it) {
        const std::size_t n = std::stoul((*it)[2]);
        const std::size_t start = static_cast<std::size_t>(it->position(0) + it->length(0));
        CHECK(full.out.compare(start + n, 1, "\n") == 0);
        CHECK(full.out.compare(start + n + 1, 4, "=== ") == 0);
        sum += n;
        ++sections;
    }
    CHECK(sections == 4);
    std::smatch total;
    REQUIRE(std::regex_search(full.out, total, std::regex(R"(=== total: (\d+) bytes in 4 messages ===)")));
    CHECK(std::stoul(total[1]) == sum);

    const auto obs = test::scratch("cli_obs") / "obs.txt";
    test::spit(obs, "Game time: 03:00\n");
    const auto custom = hep_cli({"inspect-prompt", "--obs-file", obs.string()});
    CHECK(custom.out.find("=== user (17 bytes) ===\nGame time: 03:00\n") != std::string::npos);
}

TEST_CASE("dump-actions") {
    const auto r = hep_cli({"dump-actions"});
    REQUIRE(r.code == 0);
    CHECK(r.out == hep::render_action_library());
    CHECK(r.out == test::slurp(test::kAssets / "prompts" / "action_library.txt"));
    const auto annotated = hep_cli({"dump-actions", "--annotate"});
    CHECK(annotated.out.find("<BUILD NEXUS>\tpriority\t") != std::string::npos);
}
