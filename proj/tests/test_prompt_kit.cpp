#include "hep/prompt_kit.hpp"

#include "hep/action_grammar.hpp"
#include "hep/error.hpp"
#include "support.hpp"

using namespace hep;

namespace {

const PromptAssets& assets() { return test::world().assets; }

const AblationConfig kFull{true, true};
const AblationConfig kNoEtp{false, true};
const AblationConfig kNoHdp{true, false};
const AblationConfig kNeither{false, false};

}  // namespace

TEST_CASE("bundled assets load with both tactic cards") {
    REQUIRE(assets().tactic_cards.size() == 2);
    CHECK(assets().tactic_cards[0].name == "Zealot & Stalker tactic");
    CHECK(assets().tactic_cards[1].name == "Carrier tactic");
    CHECK_NOTHROW(validate_cards(assets().tactic_cards));
}

TEST_CASE("empty asset directory reports the role prompt first") {
    const auto dir = test::scratch("prompt_empty");
    try {
        load_assets(dir);
        FAIL("expected AssetMissing");
    } catch (const AssetMissing& e) {
        CHECK(e.name() == "role_prompt");
    }
}

TEST_CASE("a third hand-written card is picked up") {
    const auto dir = test::scratch("prompt_three");
    std::filesystem::copy(test::kAssets / "prompts", dir, std::filesystem::copy_options::recursive);
    std::string yaml = test::slurp(dir / "tactics.yaml");
    yaml +=
        "  - name: Void Ray tactic\n"
        "    key_buildings: [Stargate]\n"
        "    key_technologies: []\n"
        "    key_forces: [Stalker]\n"
        "    key_timing: Any time.\n"
        "    applicable_situation: Never, this is a test card.\n";
    test::spit(dir / "tactics.yaml", yaml);
    const auto loaded = load_assets(dir);
    CHECK(loaded.tactic_cards.size() == 3);
    CHECK(tactic_names(loaded).back() == "Void Ray tactic");
}

TEST_CASE("duplicate tactic names are rejected") {
    const std::string yaml =
        "selection_instructions: pick one\n"
        "tactics:\n"
        "  - {name: A, key_buildings: [], key_technologies: [], key_forces: [], key_timing: t, "
        "applicable_situation: s}\n"
        "  - {name: A, key_buildings: [], key_technologies: [], key_forces: [], key_timing: t, "
        "applicable_situation: s}\n";
    CHECK_THROWS_AS(parse_tactics(yaml), AssetParse);
}

TEST_CASE("cards naming unknown game objects fail validation") {
    auto cards = assets().tactic_cards;
    cards[0].key_forces.push_back("Mothership");
    CHECK_THROWS_AS(validate_cards(cards), AssetParse);
}

TEST_CASE("render_tactic") {
    const auto& carrier = assets().tactic_cards[1];
    const std::string text = render_tactic(carrier);
    CHECK(text.substr(0, text.find('\n')) == "Name: Carrier tactic");

    std::size_t last = 0;
    for (const char* label : {"Name:", "Key buildings:", "Key technologies:", "Key forces:", "Key timing:",
                              "Applicable situation:"}) {
        const auto at = text.find(label);
        REQUIRE(at != std::string::npos);
        CHECK(at >= last);
        last = at;
    }

    TacticCard bare = carrier;
    bare.key_technologies.clear();
    CHECK(render_tactic(bare).find("Key technologies: (none)") != std::string::npos);

    CHECK(render_tactic(assets().tactic_cards[0]) != text);
}

TEST_CASE("full system prompt matches the golden file") {
    const std::string golden = test::slurp(test::kGolden / "system_prompt_full.txt");
    REQUIRE(!golden.empty());
    CHECK(assemble_system_prompt(assets(), kFull) == golden);
}

TEST_CASE("segments appear in order role, tactics, priority layer, action library") {
    const std::string full = assemble_system_prompt(assets(), kFull);
    const auto role = full.find(assets().role_prompt.substr(0, 40));
    const auto etp = full.find("Choose Tactic");
    const auto hdp = full.find("Priority Construction Analysis");
    const auto library = full.find(std::string(surface(ActionId::TrainProbe)) + "\n" +
                                   std::string(surface(ActionId::BuildPylon)));
    REQUIRE(role != std::string::npos);
    REQUIRE(etp != std::string::npos);
    REQUIRE(hdp != std::string::npos);
    REQUIRE(library != std::string::npos);
    CHECK(role < etp);
    CHECK(etp < hdp);
    CHECK(hdp < library);
}

TEST_CASE("ablations drop exactly their own layer") {
    const std::string full = assemble_system_prompt(assets(), kFull);
    const std::string no_etp = assemble_system_prompt(assets(), kNoEtp);
    const std::string no_hdp = assemble_system_prompt(assets(), kNoHdp);
    const std::string neither = assemble_system_prompt(assets(), kNeither);

    SUBCASE("tactic layer") {
        CHECK(no_etp.find("Choose Tactic") == std::string::npos);
        for (const auto& card : assets().tactic_cards) {
            CHECK(no_etp.find("Name: " + card.name) == std::string::npos);
            CHECK(no_hdp.find("Name: " + card.name) != std::string::npos);
        }
        CHECK(no_etp.find("Priority Construction Analysis") != std::string::npos);
    }
    SUBCASE("priority layer") {
        CHECK(no_hdp.find("Priority Construction Analysis") == std::string::npos);
        CHECK(no_hdp.find("Priority:") == std::string::npos);
        CHECK(no_hdp.find("Choose Tactic") != std::string::npos);
        // The Nexus and gas timing knowledge survives in the routine section.
        CHECK(no_hdp.find("second Nexus") != std::string::npos);
        CHECK(no_hdp.find("Assimilator") != std::string::npos);
    }
    SUBCASE("both layers") {
        CHECK(neither.find("Choose Tactic") == std::string::npos);
        CHECK(neither.find("Priority Construction Analysis") == std::string::npos);
        CHECK(neither.find("1. Conventional Construction Planning") != std::string::npos);
    }
    SUBCASE("every variant ends with the whole action library") {
        for (const auto* p : {&full, &no_etp, &no_hdp, &neither}) {
            CHECK(p->ends_with(assets().action_library_text));
        }
    }
    SUBCASE("lengths shrink under ablation") {
        CHECK(full.size() > no_etp.size());
        CHECK(full.size() > no_hdp.size());
        CHECK(no_etp.size() > neither.size());
        CHECK(no_hdp.size() > neither.size());
    }
}

TEST_CASE("no marker lines leak into any prompt or example") {
    for (const auto& ab : {kFull, kNoEtp, kNoHdp, kNeither}) {
        const auto prompt = assemble_system_prompt(assets(), ab);
        CHECK(prompt.find("%etp%") == std::string::npos);
        CHECK(prompt.find("%no-etp%") == std::string::npos);
        const auto example = example_output_for(assets(), ab);
        CHECK(example.find("%etp%") == std::string::npos);
        CHECK(example.find("%no-etp%") == std::string::npos);
    }
}

TEST_CASE("examples shown to the model match the ablation") {
    const auto tactics = tactic_names(assets());
    const auto full = parse_decision(example_output_for(assets(), kFull), tactics);
    CHECK(full.current_tactic.has_value());
    CHECK(full.priority.has_value());
    const auto no_etp = parse_decision(example_output_for(assets(), kNoEtp), tactics);
    CHECK_FALSE(no_etp.current_tactic.has_value());
    CHECK(no_etp.priority.has_value());
    const auto no_hdp = parse_decision(example_output_for(assets(), kNoHdp), tactics);
    CHECK(no_hdp.current_tactic.has_value());
    CHECK_FALSE(no_hdp.priority.has_value());
    const auto neither = parse_decision(example_output_for(assets(), kNeither), tactics);
    CHECK_FALSE(neither.current_tactic.has_value());
    CHECK_FALSE(neither.priority.has_value());
}

TEST_CASE("every library surface appears verbatim in the action library asset") {
    for (const auto& t : action_library()) {
        CHECK(assets().action_library_text.find(std::string(t.surface)) != std::string::npos);
    }
    CHECK(assets().action_library_text + "\n" == render_action_library());
}

TEST_CASE("build_messages") {
    const auto m = build_messages("obs", assets(), kFull);
    REQUIRE(m.size() == 4);
    CHECK(m[0].role == Role::System);
    CHECK(m[1].role == Role::User);
    CHECK(m[2].role == Role::Assistant);
    CHECK(m[3].role == Role::User);
    CHECK(m[0].content == assemble_system_prompt(assets(), kFull));
    CHECK(m[1].content == assets().example_input);
    CHECK(m[3].content == "obs");
    CHECK(build_messages("obs", assets(), kFull) == m);
    CHECK_THROWS_AS(build_messages("", assets(), kFull), EmptyObservation);
}

TEST_CASE("ablation names round-trip") {
    for (const char* name : {"full", "no-etp", "no-hdp", "no-etp-no-hdp"}) {
        const auto a = parse_ablation(name);
        REQUIRE(a.has_value());
        CHECK(ablation_name(*a) == name);
    }
    CHECK_FALSE(parse_ablation("half").has_value());
}
