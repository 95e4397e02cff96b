#include "figkit/judge.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace figkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string out((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
    return out;
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

const char* kRepairInstruction =
    "\n\nYour previous reply was not a single valid JSON object with "
    "equal-length gt_answers, pred_answers and correctness lists. Return only "
    "the JSON object.";

}  // namespace

std::string default_asset_dir() {
#ifdef FIGKIT_DEFAULT_ASSET_DIR
    return FIGKIT_DEFAULT_ASSET_DIR;
#else
    return "assets";
#endif
}

std::string judge_input_payload(const BenchProblem& problem,
                                const std::string& prediction) {
    json payload{{"question_text", problem.question_text},
                 {"ground_truth_answer", problem.ground_truth_answer},
                 {"prediction_solution", prediction}};
    return payload.dump();
}

std::string build_judge_prompt(const BenchProblem& problem,
                               const std::string& prediction,
                               const std::string& asset_dir) {
    fs::path dir = asset_dir.empty() ? fs::path(default_asset_dir())
                                     : fs::path(asset_dir);
    std::string part1 = read_file(dir / "judge_prompt_part1.txt");
    std::string part2 = read_file(dir / "judge_prompt_part2.txt");
    std::string prompt = part1 + "\n" + part2;

    const std::string placeholder = "{input_data}";
    size_t at = prompt.find(placeholder);
    if (at == std::string::npos) {
        throw std::runtime_error("prompt template lacks {input_data}");
    }
    prompt.replace(at, placeholder.size(), judge_input_payload(problem, prediction));
    return prompt;
}

// ---------------------------------------------------------------------------
// HTTP transport
// ---------------------------------------------------------------------------

namespace {

class HttpJudgeClient : public JudgeClient {
public:
    explicit HttpJudgeClient(HttpJudgeConfig config) : config_(std::move(config)) {}

    std::string complete(const std::string& prompt) override {
        json body{{"model", config_.model},
                  {"temperature", config_.temperature},
                  {"messages",
                   json::array({{{"role", "user"}, {"content", prompt}}})}};
        std::string payload = body.dump();

        std::string last_error;
        for (int attempt = 0; attempt < config_.transport_attempts; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(200 * (1 << (attempt - 1))));
            }
            httplib::Client cli(config_.endpoint);
            cli.set_connection_timeout(config_.timeout_seconds);
            cli.set_read_timeout(config_.timeout_seconds);
            httplib::Headers headers;
            if (!config_.api_key.empty()) {
                headers.insert({"Authorization", "Bearer " + config_.api_key});
            }
            auto res = cli.Post(config_.path, headers, payload, "application/json");
            if (!res) {
                last_error = "transport error " + httplib::to_string(res.error());
                continue;
            }
            if (res->status != 200) {
                last_error = "status " + std::to_string(res->status);
                continue;
            }
            json reply = json::parse(res->body, nullptr, false);
            if (reply.is_discarded()) {
                last_error = "malformed completion envelope";
                continue;
            }
            try {
                return reply.at("choices").at(0).at("message").at("content")
                    .get<std::string>();
            } catch (const json::exception&) {
                last_error = "unexpected completion shape";
            }
        }
        throw JudgeUnreachable(last_error.empty() ? "no attempts made"
                                                  : last_error);
    }

private:
    HttpJudgeConfig config_;
};

}  // namespace

std::unique_ptr<JudgeClient> make_http_judge_client(const HttpJudgeConfig& config) {
    return std::make_unique<HttpJudgeClient>(config);
}

// ---------------------------------------------------------------------------
// Scripted transport
// ---------------------------------------------------------------------------

ScriptedJudgeClient::ScriptedJudgeClient(
    std::map<std::string, std::vector<std::string>> script)
    : script_(std::move(script)) {}

std::string ScriptedJudgeClient::complete(const std::string& prompt) {
    prompts_.push_back(prompt);
    for (const auto& [marker, replies] : script_) {
        if (prompt.find("\"" + marker + "\"") == std::string::npos &&
            prompt.find(marker) == std::string::npos) {
            continue;
        }
        size_t& at = cursor_[marker];
        if (at < replies.size()) return replies[at++];
        return replies.empty() ? "" : replies.back();
    }
    throw JudgeUnreachable("no scripted reply matches the prompt");
}

// ---------------------------------------------------------------------------
// Verdict handling
// ---------------------------------------------------------------------------

JudgeVerdict parse_judge_reply(const std::string& reply, int n) {
    json j = json::parse(reply, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw std::runtime_error("reply is not a JSON object");
    }
    JudgeVerdict v;
    v.analysis = j.value("analysis", "");
    if (!j.contains("gt_answers") || !j.contains("pred_answers") ||
        !j.contains("correctness")) {
        throw std::runtime_error("missing verdict fields");
    }
    for (const auto& g : j.at("gt_answers")) {
        if (!g.is_string()) throw std::runtime_error("gt_answers must be strings");
        v.gt_answers.push_back(g.get<std::string>());
    }
    for (const auto& p : j.at("pred_answers")) {
        if (p.is_null()) {
            v.pred_answers.push_back(std::nullopt);
        } else if (p.is_string()) {
            v.pred_answers.push_back(p.get<std::string>());
        } else {
            throw std::runtime_error("pred_answers must be strings or null");
        }
    }
    for (const auto& c : j.at("correctness")) {
        if (!c.is_boolean()) throw std::runtime_error("correctness must be booleans");
        v.correctness.push_back(c.get<bool>());
    }
    if (v.gt_answers.size() != v.pred_answers.size() ||
        v.gt_answers.size() != v.correctness.size()) {
        throw std::runtime_error("verdict lists have unequal lengths");
    }
    if (static_cast<int>(v.gt_answers.size()) != n) {
        throw std::runtime_error("verdict lists do not match the sub-question count");
    }
    for (size_t i = 0; i < v.pred_answers.size(); ++i) {
        if (!v.pred_answers[i] && v.correctness[i]) {
            throw std::runtime_error("a null prediction cannot be correct");
        }
    }
    return v;
}

std::string verdict_cache_key(const std::string& problem_id,
                              const std::string& prediction) {
    uint64_t h = fnv1a(problem_id + "\x1f" + prediction + "\x1f" +
                       kPromptTemplateVersion);
    return problem_id + "-" + hex64(h);
}

JudgeOutcome judge_problem(const BenchProblem& problem,
                           const std::string& prediction, JudgeClient& client,
                           const JudgeOptions& options) {
    JudgeOutcome outcome;

    fs::path cache_file;
    if (!options.cache_dir.empty()) {
        cache_file = fs::path(options.cache_dir) /
                     (verdict_cache_key(problem.id, prediction) + ".json");
        if (fs::exists(cache_file)) {
            json j = json::parse(read_file(cache_file));
            outcome.flagged = j.value("flagged", false);
            outcome.from_cache = true;
            if (!outcome.flagged) {
                outcome.verdict =
                    parse_judge_reply(j.at("verdict").dump(), problem.n_subquestions);
            }
            return outcome;
        }
    }

    std::string prompt = build_judge_prompt(problem, prediction, options.asset_dir);
    std::string last_reply;
    bool ok = false;
    for (int attempt = 0; attempt <= options.verdict_retries; ++attempt) {
        std::string body = attempt == 0 ? prompt : prompt + kRepairInstruction;
        last_reply = client.complete(body);
        ++outcome.calls;
        try {
            outcome.verdict = parse_judge_reply(last_reply, problem.n_subquestions);
            ok = true;
            break;
        } catch (const std::exception&) {
            ++outcome.parse_failures;
            if (attempt < options.verdict_retries) ++outcome.retries;
        }
    }
    if (!ok) {
        outcome.flagged = true;
        outcome.verdict = JudgeVerdict{};
        outcome.verdict.gt_answers = parse_gt_answer(problem.ground_truth_answer);
        outcome.verdict.pred_answers.assign(outcome.verdict.gt_answers.size(),
                                            std::nullopt);
        outcome.verdict.correctness.assign(outcome.verdict.gt_answers.size(),
                                           false);
    }

    if (!options.cache_dir.empty()) {
        fs::create_directories(options.cache_dir);
        json verdict_json{{"analysis", outcome.verdict.analysis},
                          {"gt_answers", outcome.verdict.gt_answers},
                          {"correctness", outcome.verdict.correctness}};
        json preds = json::array();
        for (const auto& p : outcome.verdict.pred_answers) {
            if (p) {
                preds.push_back(*p);
            } else {
                preds.push_back(nullptr);
            }
        }
        verdict_json["pred_answers"] = preds;
        json j{{"problem_id", problem.id},
               {"template_version", kPromptTemplateVersion},
               {"flagged", outcome.flagged},
               {"attempts", outcome.calls},
               {"verdict", verdict_json}};
        std::ofstream out(cache_file, std::ios::binary);
        out << j.dump(2) << "\n";
    }
    return outcome;
}

}  // namespace figkit
