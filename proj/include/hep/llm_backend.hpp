#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hep/macro_sim.hpp"
#include "hep/prompt_kit.hpp"

namespace hep {

struct CostMeter {
    int prompt_tokens = 0;
    int output_tokens = 0;
    int total_tokens = 0;
    double wall_time_s = 0.0;

    friend bool operator==(const CostMeter&, const CostMeter&) = default;
};

struct ChatResult {
    std::string text;
    CostMeter meter;
};

// ceil(bytes / 4). A rough stand-in for a real tokenizer, nothing more.
int estimate_tokens(std::string_view text);
int estimate_prompt_tokens(const MessageList& messages);
CostMeter make_meter(int prompt_tokens, int output_tokens, double wall_time_s);

enum class BackendKind { Live, Scripted, Replay };

struct BackendConfig {
    BackendKind kind = BackendKind::Scripted;
    // live
    std::string endpoint;  // base URL; "/chat/completions" is appended
    std::string model = "gpt-3.5-turbo";
    std::string auth_env = "HEP_API_KEY";  // name of the variable holding the bearer token
    // scripted
    std::string policy = "hep_oracle";
    // replay
    std::filesystem::path transcript_path;

    double timeout_s = 60.0;
    int retries = 2;
    // Any kind: append every exchange to this transcript.
    std::optional<std::filesystem::path> record_path;
};

// "scripted:<policy>", "replay:<path>" or "live:<endpoint>"; ConfigError otherwise.
BackendConfig parse_backend_spec(std::string_view spec);
std::string describe(const BackendConfig& config);

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    // Throws BackendError subclasses; the runtime turns them into a0.
    virtual ChatResult chat(const MessageList& messages) = 0;
};

// One backend instance per match; replay and recording state is per instance.
std::unique_ptr<ChatBackend> make_backend(const BackendConfig& config);

// Scripted policies. Each is a pure function of the message list: the
// system prompt tells the policy which prompt layers it was given and the
// last user message is parsed back into an observation snapshot.
enum class Policy { HepOracle, HepNoEtpOracle, HepNoHdpOracle, BaselineOracle, NoopOracle };
std::optional<Policy> parse_policy(std::string_view name);
std::string_view to_string(Policy policy);
const std::vector<std::string>& policy_names();

struct PolicyTraits {
    bool tactics = true;     // follows the tactic knowledge base and may switch tactics
    bool priorities = true;  // writes a Priority field and obeys it
    bool baseline = false;   // the plain chain-of-summary player
    bool noop = false;
};
PolicyTraits traits_for(Policy policy, std::string_view system_prompt);

std::string scripted_response(Policy policy, const MessageList& messages);
std::string scripted_response(const PolicyTraits& traits, const ObservationSnapshot& obs);

class ScriptedBackend final : public ChatBackend {
public:
    explicit ScriptedBackend(Policy policy) : policy_(policy) {}
    ChatResult chat(const MessageList& messages) override;

private:
    Policy policy_;
};

// Transcripts: one JSON object per line.
struct TranscriptEntry {
    int step = 0;
    std::string request_digest;
    std::string response;
    int prompt_tokens = 0;
    int output_tokens = 0;
    double wall_time_s = 0.0;

    friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

std::string request_digest(const MessageList& messages);
std::string to_json_line(const TranscriptEntry& entry);
TranscriptEntry entry_from_json_line(std::string_view line);  // IoError on malformed lines
void record(const std::filesystem::path& path, const TranscriptEntry& entry);
std::vector<TranscriptEntry> load_transcript(const std::filesystem::path& path);  // TranscriptMissing

class ReplayBackend final : public ChatBackend {
public:
    explicit ReplayBackend(std::vector<TranscriptEntry> entries) : entries_(std::move(entries)) {}
    ChatResult chat(const MessageList& messages) override;

private:
    std::vector<TranscriptEntry> entries_;
    std::size_t next_ = 0;
};

class RecordingBackend final : public ChatBackend {
public:
    RecordingBackend(std::unique_ptr<ChatBackend> inner, std::filesystem::path path)
        : inner_(std::move(inner)), path_(std::move(path)) {}
    ChatResult chat(const MessageList& messages) override;

private:
    std::unique_ptr<ChatBackend> inner_;
    std::filesystem::path path_;
    int step_ = 0;
};

// OpenAI-compatible chat completions over HTTP(S).
std::string chat_request_body(const MessageList& messages, const std::string& model);
// Content of choices[0].message.content plus usage when reported.
struct ParsedCompletion {
    std::string content;
    std::optional<int> prompt_tokens;
    std::optional<int> completion_tokens;
};
ParsedCompletion parse_chat_response(std::string_view body);  // BackendUnavailable on bad shape

class LiveBackend final : public ChatBackend {
public:
    explicit LiveBackend(BackendConfig config);
    ChatResult chat(const MessageList& messages) override;

private:
    BackendConfig config_;
};

}  // namespace hep
