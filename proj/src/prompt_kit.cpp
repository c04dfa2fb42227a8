#include "hep/prompt_kit.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "hep/error.hpp"

namespace hep {

namespace {

constexpr std::string_view kEtpMarker = "%etp% ";
constexpr std::string_view kNoEtpMarker = "%no-etp% ";

std::string read_asset(const std::filesystem::path& dir, const std::string& name, const std::string& file) {
    const auto path = dir / file;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw AssetMissing(name);
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    if (text.empty()) throw AssetParse(file + " is empty");
    return text;
}

std::vector<std::string> string_list(const YAML::Node& card, const char* key, const std::string& where) {
    const YAML::Node node = card[key];
    if (!node) throw AssetParse(std::string("missing '") + key + "' in " + where);
    if (!node.IsSequence()) throw AssetParse(std::string("'") + key + "' must be a list in " + where);
    std::vector<std::string> out;
    for (const auto& item : node) out.push_back(item.as<std::string>());
    return out;
}

std::string text_field(const YAML::Node& card, const char* key, const std::string& where) {
    const YAML::Node node = card[key];
    if (!node || !node.IsScalar()) throw AssetParse(std::string("missing '") + key + "' in " + where);
    std::string value = node.as<std::string>();
    if (value.empty()) throw AssetParse(std::string("empty '") + key + "' in " + where);
    return value;
}

std::string join(const std::vector<std::string>& items) {
    if (items.empty()) return "(none)";
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += ", ";
        out += s;
    }
    return out;
}

}  // namespace

std::optional<AblationConfig> parse_ablation(std::string_view text) {
    if (text == "full") return AblationConfig{true, true};
    if (text == "no-etp") return AblationConfig{false, true};
    if (text == "no-hdp") return AblationConfig{true, false};
    if (text == "no-etp-no-hdp") return AblationConfig{false, false};
    return std::nullopt;
}

std::string ablation_name(const AblationConfig& a) {
    if (a.include_etp && a.include_hdp) return "full";
    if (a.include_hdp) return "no-etp";
    if (a.include_etp) return "no-hdp";
    return "no-etp-no-hdp";
}

std::string_view to_string(Role role) {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "user";
}

TacticFile parse_tactics(std::string_view yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception& e) {
        throw AssetParse(std::string("tactics: ") + e.what());
    }
    if (!root.IsMap()) throw AssetParse("tactics: top level must be a mapping");
    TacticFile out;
    try {
        out.selection_instructions = text_field(root, "selection_instructions", "tactics");
        const YAML::Node list = root["tactics"];
        if (!list || !list.IsSequence()) throw AssetParse("tactics: missing 'tactics' list");
        std::set<std::string> names;
        for (std::size_t i = 0; i < list.size(); ++i) {
            const YAML::Node card = list[i];
            const std::string where = "tactic #" + std::to_string(i + 1);
            if (!card.IsMap()) throw AssetParse(where + " must be a mapping");
            TacticCard c;
            c.name = text_field(card, "name", where);
            c.key_buildings = string_list(card, "key_buildings", where);
            c.key_technologies = string_list(card, "key_technologies", where);
            c.key_forces = string_list(card, "key_forces", where);
            c.key_timing = text_field(card, "key_timing", where);
            c.applicable_situation = text_field(card, "applicable_situation", where);
            if (!names.insert(c.name).second) throw AssetParse("duplicate tactic name '" + c.name + "'");
            out.cards.push_back(std::move(c));
        }
    } catch (const YAML::Exception& e) {
        throw AssetParse(std::string("tactics: ") + e.what());
    }
    if (out.cards.empty()) throw AssetParse("tactics: no tactic cards");
    return out;
}

PromptAssets load_assets(const std::filesystem::path& dir) {
    PromptAssets a;
    a.role_prompt = read_asset(dir, "role_prompt", "role_prompt.txt");
    a.hdp_text = read_asset(dir, "hdp", "hdp.txt");
    a.hdp_ablated_text = read_asset(dir, "hdp_ablated", "hdp_ablated.txt");
    a.action_library_text = read_asset(dir, "action_library", "action_library.txt");
    a.example_input = read_asset(dir, "example_input", "example_input.txt");
    a.example_output = read_asset(dir, "example_output", "example_output.txt");
    a.example_output_ablated_etp = read_asset(dir, "example_output_ablated_etp", "example_output_ablated_etp.txt");
    a.example_output_ablated_hdp = read_asset(dir, "example_output_ablated_hdp", "example_output_ablated_hdp.txt");
    TacticFile tactics = parse_tactics(read_asset(dir, "tactics", "tactics.yaml"));
    a.tactic_selection = std::move(tactics.selection_instructions);
    a.tactic_cards = std::move(tactics.cards);
    return a;
}

void validate_cards(const std::vector<TacticCard>& cards) {
    for (const auto& c : cards) {
        for (const auto& b : c.key_buildings) {
            if (!building_from_name(b)) throw AssetParse("tactic '" + c.name + "' names unknown building '" + b + "'");
        }
        for (const auto& t : c.key_technologies) {
            if (!tech_from_name(t)) throw AssetParse("tactic '" + c.name + "' names unknown research '" + t + "'");
        }
        for (const auto& u : c.key_forces) {
            auto kind = unit_from_name(u);
            if (!kind || !is_player_unit(*kind)) {
                throw AssetParse("tactic '" + c.name + "' names unknown unit '" + u + "'");
            }
        }
    }
}

std::string render_tactic(const TacticCard& card) {
    std::string out;
    out += "Name: " + card.name + "\n";
    out += "Key buildings: " + join(card.key_buildings) + "\n";
    out += "Key technologies: " + join(card.key_technologies) + "\n";
    out += "Key forces: " + join(card.key_forces) + "\n";
    out += "Key timing: " + card.key_timing + "\n";
    out += "Applicable situation: " + card.applicable_situation;
    return out;
}

std::string render_etp_block(const PromptAssets& assets) {
    std::string out = assets.tactic_selection;
    for (const auto& card : assets.tactic_cards) {
        out += "\n";
        out += render_tactic(card);
    }
    return out;
}

std::string select_lines(std::string_view text, bool include_etp) {
    std::string out;
    std::size_t pos = 0;
    bool first = true;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.starts_with(kEtpMarker)) {
            if (!include_etp) continue;
            line.remove_prefix(kEtpMarker.size());
        } else if (line.starts_with(kNoEtpMarker)) {
            if (include_etp) continue;
            line.remove_prefix(kNoEtpMarker.size());
        }
        if (!first) out += '\n';
        out += line;
        first = false;
    }
    return out;
}

std::string hdp_block(const PromptAssets& assets, const AblationConfig& ablation) {
    return select_lines(ablation.include_hdp ? assets.hdp_text : assets.hdp_ablated_text, ablation.include_etp);
}

const std::string& example_output_source(const PromptAssets& assets, const AblationConfig& ablation) {
    if (!ablation.include_hdp) return assets.example_output_ablated_hdp;
    if (!ablation.include_etp) return assets.example_output_ablated_etp;
    return assets.example_output;
}

std::string example_output_for(const PromptAssets& assets, const AblationConfig& ablation) {
    return select_lines(example_output_source(assets, ablation), ablation.include_etp);
}

std::string assemble_system_prompt(const PromptAssets& assets, const AblationConfig& ablation) {
    std::string out = assets.role_prompt;
    out += '\n';
    if (ablation.include_etp) {
        out += render_etp_block(assets);
        out += '\n';
    }
    out += hdp_block(assets, ablation);
    out += '\n';
    out += assets.action_library_text;
    return out;
}

MessageList build_messages(std::string_view obs_text, const PromptAssets& assets, const AblationConfig& ablation) {
    if (obs_text.empty()) throw EmptyObservation();
    MessageList m;
    m.push_back({Role::System, assemble_system_prompt(assets, ablation)});
    m.push_back({Role::User, assets.example_input});
    m.push_back({Role::Assistant, example_output_for(assets, ablation)});
    m.push_back({Role::User, std::string(obs_text)});
    return m;
}

std::vector<std::string> tactic_names(const PromptAssets& assets) {
    std::vector<std::string> out;
    for (const auto& c : assets.tactic_cards) out.push_back(c.name);
    return out;
}

}  // namespace hep
