#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "figkit/corpus.hpp"
#include "figkit/realize.hpp"
#include "figkit/synthesize.hpp"

namespace figkit {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kConfigSchemaVersion = 1;

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SynthesizeSection {
    int count = 10;
    int steps_min = 1;
    int steps_max = 6;
    int iteration_rounds = 3;
    int max_rejects_per_step = 64;
    // "relation_weights": name -> weight map covering all 41 relations.
    std::optional<std::map<std::string, double>> relation_weights;
};

struct RenderSection {
    std::string geo_dir;  // defaults to {output_root}/programs
    int variants = 1;
    std::string split = "train";
};

struct CurateSection {
    std::string dedup_input;  // imagen jsonl
    std::string dedup_dataset_root;
    double dedup_text_threshold = 0.85;
    int dedup_hash_max_distance = 6;
    std::string decontaminate_train;  // instruct jsonl
    std::string decontaminate_bench;
    double decontaminate_threshold = 0.4;
    std::string sample_pool;  // instruct jsonl
    int sample_target = 0;
};

struct EvaluateSection {
    std::string bench;        // instruct jsonl
    std::string predictions;  // jsonl: {id, solution}
    std::string judge_endpoint;
    std::string judge_path = "/v1/chat/completions";
    std::string judge_model = "gpt-4.1";
    double temperature = 0.0;
    std::string credential_env = "JUDGE_API_KEY";
    std::string judge_script;  // canned replies file; bypasses HTTP
    int verdict_retries = 2;
    int transport_attempts = 3;
    int concurrency = 8;
};

struct PipelineConfig {
    int version = kConfigSchemaVersion;
    uint64_t seed = 0;
    int jobs = 1;
    std::string output_root = "out";
    std::string asset_dir;  // prompt templates; empty = compiled default

    SynthesizeSection synthesize;
    RealizeOptions realize;
    RenderSection render;
    CurateSection curate;
    EvaluateSection evaluate;

    SynthesisConfig synthesis_config() const;
};

// Strict parse: unknown keys anywhere are a ConfigError.
PipelineConfig load_config_file(const std::string& path);
PipelineConfig parse_config_json(const std::string& text);

// Fully-resolved dump, written next to every run's outputs.
std::string config_to_json(const PipelineConfig& config);

}  // namespace figkit
