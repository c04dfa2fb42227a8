#include "hep/llm_backend.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

#include "hep/digest.hpp"
#include "hep/error.hpp"

namespace hep {

int estimate_tokens(std::string_view text) { return static_cast<int>((text.size() + 3) / 4); }

int estimate_prompt_tokens(const MessageList& messages) {
    int n = 0;
    for (const auto& m : messages) n += estimate_tokens(m.content);
    return n;
}

CostMeter make_meter(int prompt_tokens, int output_tokens, double wall_time_s) {
    return {prompt_tokens, output_tokens, prompt_tokens + output_tokens, wall_time_s};
}

BackendConfig parse_backend_spec(std::string_view spec) {
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) {
        throw ConfigError("backend must be scripted:<policy>, replay:<path> or live:<endpoint>");
    }
    const std::string_view kind = spec.substr(0, colon);
    const std::string rest(spec.substr(colon + 1));
    if (rest.empty()) throw ConfigError("backend '" + std::string(spec) + "' has an empty argument");
    BackendConfig c;
    if (kind == "scripted") {
        if (!parse_policy(rest)) throw ConfigError("unknown scripted policy '" + rest + "'");
        c.kind = BackendKind::Scripted;
        c.policy = rest;
    } else if (kind == "replay") {
        c.kind = BackendKind::Replay;
        c.transcript_path = rest;
    } else if (kind == "live") {
        c.kind = BackendKind::Live;
        c.endpoint = rest;
    } else {
        throw ConfigError("unknown backend kind '" + std::string(kind) + "'");
    }
    return c;
}

std::string describe(const BackendConfig& c) {
    switch (c.kind) {
        case BackendKind::Scripted: return "scripted:" + c.policy;
        case BackendKind::Replay: return "replay:" + c.transcript_path.string();
        case BackendKind::Live: return "live:" + c.endpoint;
    }
    return "scripted:" + c.policy;
}

std::unique_ptr<ChatBackend> make_backend(const BackendConfig& config) {
    std::unique_ptr<ChatBackend> backend;
    switch (config.kind) {
        case BackendKind::Scripted: {
            auto policy = parse_policy(config.policy);
            if (!policy) throw ConfigError("unknown scripted policy '" + config.policy + "'");
            backend = std::make_unique<ScriptedBackend>(*policy);
            break;
        }
        case BackendKind::Replay:
            backend = std::make_unique<ReplayBackend>(load_transcript(config.transcript_path));
            break;
        case BackendKind::Live: backend = std::make_unique<LiveBackend>(config); break;
    }
    if (config.record_path) backend = std::make_unique<RecordingBackend>(std::move(backend), *config.record_path);
    return backend;
}

ChatResult ScriptedBackend::chat(const MessageList& messages) {
    ChatResult r;
    r.text = scripted_response(policy_, messages);
    r.meter = make_meter(estimate_prompt_tokens(messages), estimate_tokens(r.text), 0.0);
    return r;
}

std::string request_digest(const MessageList& messages) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& m : messages) j.push_back({{"role", to_string(m.role)}, {"content", m.content}});
    return sha256_hex(j.dump());
}

std::string to_json_line(const TranscriptEntry& e) {
    nlohmann::json j;
    j["step"] = e.step;
    j["request_digest"] = e.request_digest;
    j["response"] = e.response;
    j["prompt_tokens"] = e.prompt_tokens;
    j["output_tokens"] = e.output_tokens;
    j["wall_time_s"] = e.wall_time_s;
    return j.dump();
}

TranscriptEntry entry_from_json_line(std::string_view line) {
    try {
        const auto j = nlohmann::json::parse(line);
        TranscriptEntry e;
        e.step = j.at("step").get<int>();
        e.request_digest = j.at("request_digest").get<std::string>();
        e.response = j.at("response").get<std::string>();
        e.prompt_tokens = j.at("prompt_tokens").get<int>();
        e.output_tokens = j.at("output_tokens").get<int>();
        e.wall_time_s = j.at("wall_time_s").get<double>();
        return e;
    } catch (const nlohmann::json::exception& ex) {
        throw IoError(std::string("malformed transcript line: ") + ex.what());
    }
}

void record(const std::filesystem::path& path, const TranscriptEntry& entry) {
    std::ofstream out(path, std::ios::app | std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for appending");
    out << to_json_line(entry) << '\n';
    if (!out) throw IoError("write failed on " + path.string());
}

std::vector<TranscriptEntry> load_transcript(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TranscriptMissing(path.string());
    std::vector<TranscriptEntry> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(entry_from_json_line(line));
    }
    return out;
}

ChatResult ReplayBackend::chat(const MessageList&) {
    if (next_ >= entries_.size()) throw TranscriptExhausted();
    const auto& e = entries_[next_++];
    return {e.response, make_meter(e.prompt_tokens, e.output_tokens, e.wall_time_s)};
}

ChatResult RecordingBackend::chat(const MessageList& messages) {
    ChatResult r = inner_->chat(messages);
    TranscriptEntry e;
    e.step = step_++;
    e.request_digest = request_digest(messages);
    e.response = r.text;
    e.prompt_tokens = r.meter.prompt_tokens;
    e.output_tokens = r.meter.output_tokens;
    e.wall_time_s = r.meter.wall_time_s;
    record(path_, e);
    return r;
}

}  // namespace hep
