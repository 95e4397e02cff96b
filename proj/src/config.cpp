#include "figkit/config.hpp"

#include <fstream>

#include <json.hpp>

namespace figkit {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok |= (key == k);
        if (!ok) {
            throw ConfigError("unknown config key '" + where + key + "'");
        }
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

SynthesisConfig PipelineConfig::synthesis_config() const {
    SynthesisConfig sc;
    sc.seed = seed;
    sc.steps_min = synthesize.steps_min;
    sc.steps_max = synthesize.steps_max;
    sc.iteration_rounds = synthesize.iteration_rounds;
    sc.max_rejects_per_step = synthesize.max_rejects_per_step;
    sc.realize_options = realize;
    if (synthesize.relation_weights) {
        std::map<RelationKind, double> w;
        for (const auto& [name, weight] : *synthesize.relation_weights) {
            auto kind = relation_by_name(name);
            if (!kind) throw ConfigError("unknown relation in weights: " + name);
            w[*kind] = weight;
        }
        sc.relation_weights = std::move(w);
    }
    return sc;
}

PipelineConfig parse_config_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ConfigError("config is not a JSON object");
    }
    PipelineConfig c;
    reject_unknown(j,
                   {"version", "seed", "jobs", "output_root", "asset_dir",
                    "synthesize", "realize", "render", "curate", "evaluate",
                    "tool_version"},
                   "");
    read(j, "version", c.version);
    if (c.version != kConfigSchemaVersion) {
        throw ConfigError("unsupported config version " + std::to_string(c.version));
    }
    read(j, "seed", c.seed);
    read(j, "jobs", c.jobs);
    read(j, "output_root", c.output_root);
    read(j, "asset_dir", c.asset_dir);

    if (j.contains("synthesize")) {
        const json& s = j.at("synthesize");
        reject_unknown(s,
                       {"count", "steps_min", "steps_max", "iteration_rounds",
                        "max_rejects_per_step", "relation_weights"},
                       "synthesize.");
        read(s, "count", c.synthesize.count);
        read(s, "steps_min", c.synthesize.steps_min);
        read(s, "steps_max", c.synthesize.steps_max);
        read(s, "iteration_rounds", c.synthesize.iteration_rounds);
        read(s, "max_rejects_per_step", c.synthesize.max_rejects_per_step);
        if (s.contains("relation_weights")) {
            c.synthesize.relation_weights =
                s.at("relation_weights").get<std::map<std::string, double>>();
        }
    }
    if (j.contains("realize")) {
        const json& r = j.at("realize");
        reject_unknown(r,
                       {"tau_solve", "delta_min", "theta_min_deg", "radius_min",
                        "radius_max", "max_iterations", "max_resamples",
                        "out_of_frame_limit"},
                       "realize.");
        read(r, "tau_solve", c.realize.tau_solve);
        read(r, "delta_min", c.realize.delta_min);
        read(r, "theta_min_deg", c.realize.theta_min_deg);
        read(r, "radius_min", c.realize.radius_min);
        read(r, "radius_max", c.realize.radius_max);
        read(r, "max_iterations", c.realize.max_iterations);
        read(r, "max_resamples", c.realize.max_resamples);
        read(r, "out_of_frame_limit", c.realize.out_of_frame_limit);
    }
    if (j.contains("render")) {
        const json& r = j.at("render");
        reject_unknown(r, {"geo_dir", "variants", "split"}, "render.");
        read(r, "geo_dir", c.render.geo_dir);
        read(r, "variants", c.render.variants);
        read(r, "split", c.render.split);
    }
    if (j.contains("curate")) {
        const json& cu = j.at("curate");
        reject_unknown(cu,
                       {"dedup_input", "dedup_dataset_root", "dedup_text_threshold",
                        "dedup_hash_max_distance", "decontaminate_train",
                        "decontaminate_bench", "decontaminate_threshold",
                        "sample_pool", "sample_target"},
                       "curate.");
        read(cu, "dedup_input", c.curate.dedup_input);
        read(cu, "dedup_dataset_root", c.curate.dedup_dataset_root);
        read(cu, "dedup_text_threshold", c.curate.dedup_text_threshold);
        read(cu, "dedup_hash_max_distance", c.curate.dedup_hash_max_distance);
        read(cu, "decontaminate_train", c.curate.decontaminate_train);
        read(cu, "decontaminate_bench", c.curate.decontaminate_bench);
        read(cu, "decontaminate_threshold", c.curate.decontaminate_threshold);
        read(cu, "sample_pool", c.curate.sample_pool);
        read(cu, "sample_target", c.curate.sample_target);
    }
    if (j.contains("evaluate")) {
        const json& e = j.at("evaluate");
        reject_unknown(e,
                       {"bench", "predictions", "judge_endpoint", "judge_path",
                        "judge_model", "temperature", "credential_env",
                        "judge_script", "verdict_retries", "transport_attempts",
                        "concurrency"},
                       "evaluate.");
        read(e, "bench", c.evaluate.bench);
        read(e, "predictions", c.evaluate.predictions);
        read(e, "judge_endpoint", c.evaluate.judge_endpoint);
        read(e, "judge_path", c.evaluate.judge_path);
        read(e, "judge_model", c.evaluate.judge_model);
        read(e, "temperature", c.evaluate.temperature);
        read(e, "credential_env", c.evaluate.credential_env);
        read(e, "judge_script", c.evaluate.judge_script);
        read(e, "verdict_retries", c.evaluate.verdict_retries);
        read(e, "transport_attempts", c.evaluate.transport_attempts);
        read(e, "concurrency", c.evaluate.concurrency);
    }
    return c;
}

PipelineConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse_config_json(text);
}

std::string config_to_json(const PipelineConfig& c) {
    json j;
    j["version"] = c.version;
    j["seed"] = c.seed;
    j["jobs"] = c.jobs;
    j["output_root"] = c.output_root;
    j["asset_dir"] = c.asset_dir;
    j["synthesize"] = {{"count", c.synthesize.count},
                       {"steps_min", c.synthesize.steps_min},
                       {"steps_max", c.synthesize.steps_max},
                       {"iteration_rounds", c.synthesize.iteration_rounds},
                       {"max_rejects_per_step", c.synthesize.max_rejects_per_step}};
    if (c.synthesize.relation_weights) {
        j["synthesize"]["relation_weights"] = *c.synthesize.relation_weights;
    }
    j["realize"] = {{"tau_solve", c.realize.tau_solve},
                    {"delta_min", c.realize.delta_min},
                    {"theta_min_deg", c.realize.theta_min_deg},
                    {"radius_min", c.realize.radius_min},
                    {"radius_max", c.realize.radius_max},
                    {"max_iterations", c.realize.max_iterations},
                    {"max_resamples", c.realize.max_resamples},
                    {"out_of_frame_limit", c.realize.out_of_frame_limit}};
    j["render"] = {{"geo_dir", c.render.geo_dir},
                   {"variants", c.render.variants},
                   {"split", c.render.split}};
    j["curate"] = {{"dedup_input", c.curate.dedup_input},
                   {"dedup_dataset_root", c.curate.dedup_dataset_root},
                   {"dedup_text_threshold", c.curate.dedup_text_threshold},
                   {"dedup_hash_max_distance", c.curate.dedup_hash_max_distance},
                   {"decontaminate_train", c.curate.decontaminate_train},
                   {"decontaminate_bench", c.curate.decontaminate_bench},
                   {"decontaminate_threshold", c.curate.decontaminate_threshold},
                   {"sample_pool", c.curate.sample_pool},
                   {"sample_target", c.curate.sample_target}};
    j["evaluate"] = {{"bench", c.evaluate.bench},
                     {"predictions", c.evaluate.predictions},
                     {"judge_endpoint", c.evaluate.judge_endpoint},
                     {"judge_path", c.evaluate.judge_path},
                     {"judge_model", c.evaluate.judge_model},
                     {"temperature", c.evaluate.temperature},
                     {"credential_env", c.evaluate.credential_env},
                     {"judge_script", c.evaluate.judge_script},
                     {"verdict_retries", c.evaluate.verdict_retries},
                     {"transport_attempts", c.evaluate.transport_attempts},
                     {"concurrency", c.evaluate.concurrency}};
    j["tool_version"] = kToolVersion;
    return j.dump(2) + "\n";
}

}  // namespace figkit
