#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "figkit/bench.hpp"

namespace figkit {

inline constexpr const char* kPromptTemplateVersion = "tables78-v1";

// Loads the two-part prompt template from `asset_dir` (defaults to the
// compiled-in assets directory) and substitutes the problem payload for the
// {input_data} placeholder. The result is the exact request body text.
std::string build_judge_prompt(const BenchProblem& problem,
                               const std::string& prediction,
                               const std::string& asset_dir = "");

std::string default_asset_dir();

// The JSON payload substituted into the template.
std::string judge_input_payload(const BenchProblem& problem,
                                const std::string& prediction);

// ---------------------------------------------------------------------------
// Transport
// ---------------------------------------------------------------------------
class JudgeUnreachable : public std::runtime_error {
public:
    explicit JudgeUnreachable(const std::string& msg) : std::runtime_error(msg) {}
};

// Abstract judge transport: takes the full prompt text, returns the raw
// model reply. Implementations may throw JudgeUnreachable.
class JudgeClient {
public:
    virtual ~JudgeClient() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

struct HttpJudgeConfig {
    std::string endpoint;  // e.g. http://host:port
    std::string path = "/v1/chat/completions";
    std::string model = "gpt-4.1";
    double temperature = 0.0;
    std::string api_key;          // empty: no Authorization header
    int transport_attempts = 3;   // with exponential backoff
    int timeout_seconds = 120;
};

// Chat-completions style HTTP client.
std::unique_ptr<JudgeClient> make_http_judge_client(const HttpJudgeConfig& config);

// Canned replies keyed by a marker substring (the problem id embedded in the
// payload); each lookup consumes the next reply in the list. Records every
// prompt it receives.
class ScriptedJudgeClient : public JudgeClient {
public:
    // script: problem id -> ordered raw replies
    explicit ScriptedJudgeClient(std::map<std::string, std::vector<std::string>> script);

    std::string complete(const std::string& prompt) override;

    const std::vector<std::string>& prompts_seen() const { return prompts_; }

private:
    std::map<std::string, std::vector<std::string>> script_;
    std::map<std::string, size_t> cursor_;
    std::vector<std::string> prompts_;
};

// ---------------------------------------------------------------------------
// Judging
// ---------------------------------------------------------------------------
struct JudgeOptions {
    int verdict_retries = 2;  // repair retries on bad verdicts
    std::string asset_dir;    // template location; empty = default
    std::string cache_dir;    // empty disables the on-disk cache
};

struct JudgeOutcome {
    JudgeVerdict verdict;
    bool flagged = false;  // verdict unusable after retries; scored zero
    int calls = 0;
    int retries = 0;
    int parse_failures = 0;
    bool from_cache = false;
};

// Sends the two-part prompt, parses and validates the verdict against the
// problem's sub-question count, retrying with a repair instruction on
// invalid replies. Transport errors propagate as JudgeUnreachable.
JudgeOutcome judge_problem(const BenchProblem& problem,
                           const std::string& prediction, JudgeClient& client,
                           const JudgeOptions& options = {});

// Verdict validation alone (throws std::runtime_error on violations).
JudgeVerdict parse_judge_reply(const std::string& reply, int n_subquestions);

// Cache key for (problem, prediction) under the current template version.
std::string verdict_cache_key(const std::string& problem_id,
                              const std::string& prediction);

}  // namespace figkit
