#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hep/game_data.hpp"

namespace hep {

struct TacticCard {
    std::string name;
    std::vector<std::string> key_buildings;
    std::vector<std::string> key_technologies;
    std::vector<std::string> key_forces;
    std::string key_timing;
    std::string applicable_situation;

    friend bool operator==(const TacticCard&, const TacticCard&) = default;
};

// Text assets are kept as written on disk, minus trailing newlines. Lines
// starting with "%etp% " only appear when the tactic block is included and
// lines starting with "%no-etp% " only when it is not.
struct PromptAssets {
    std::string role_prompt;
    std::string hdp_text;
    std::string hdp_ablated_text;
    std::string action_library_text;
    std::string example_input;
    std::string example_output;
    std::string example_output_ablated_etp;
    std::string example_output_ablated_hdp;
    std::string tactic_selection;  // the "Choose Tactic" preamble
    std::vector<TacticCard> tactic_cards;
};

struct AblationConfig {
    bool include_etp = true;
    bool include_hdp = true;

    friend bool operator==(const AblationConfig&, const AblationConfig&) = default;
};

// "full", "no-etp", "no-hdp", "no-etp-no-hdp"
std::optional<AblationConfig> parse_ablation(std::string_view text);
std::string ablation_name(const AblationConfig& ablation);

enum class Role { System, User, Assistant };
std::string_view to_string(Role role);

struct ChatMessage {
    Role role;
    std::string content;

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

using MessageList = std::vector<ChatMessage>;

// Throws AssetMissing(name) naming the first missing file (without
// extension) and AssetParse for a malformed tactic file.
PromptAssets load_assets(const std::filesystem::path& directory);

struct TacticFile {
    std::string selection_instructions;
    std::vector<TacticCard> cards;
};
TacticFile parse_tactics(std::string_view yaml_text);

// Every building, tech and unit named on a card must be a game-data name.
void validate_cards(const std::vector<TacticCard>& cards);

std::string render_tactic(const TacticCard& card);
std::string render_etp_block(const PromptAssets& assets);
std::string select_lines(std::string_view text, bool include_etp);

std::string hdp_block(const PromptAssets& assets, const AblationConfig& ablation);
const std::string& example_output_source(const PromptAssets& assets, const AblationConfig& ablation);
std::string example_output_for(const PromptAssets& assets, const AblationConfig& ablation);

std::string assemble_system_prompt(const PromptAssets& assets, const AblationConfig& ablation);

// [system, user(example input), assistant(example output), user(observation)]
MessageList build_messages(std::string_view obs_text, const PromptAssets& assets, const AblationConfig& ablation);

std::vector<std::string> tactic_names(const PromptAssets& assets);

}  // namespace hep
