#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "figkit/pipeline.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    uint64_t seed = 0;
    int jobs = 0;
    std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "pipeline config file (JSON)");
    cmd->add_option("--seed", flags.seed, "global seed override");
    cmd->add_option("--jobs", flags.jobs, "worker pool bound");
    cmd->add_option("--out", flags.out, "output root directory");
}

figkit::PipelineConfig resolve(const CLI::App* cmd, const CommonFlags& flags) {
    figkit::PipelineConfig config;
    if (!flags.config_path.empty()) {
        config = figkit::load_config_file(flags.config_path);
    }
    if (cmd->count("--seed")) config.seed = flags.seed;
    if (cmd->count("--jobs")) config.jobs = flags.jobs;
    if (cmd->count("--out")) config.output_root = flags.out;
    return config;
}

bool parse_steps_range(const std::string& text, int* lo, int* hi) {
    size_t dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            *lo = *hi = std::stoi(text);
        } else {
            *lo = std::stoi(text.substr(0, dots));
            *hi = std::stoi(text.substr(dots + 2));
        }
    } catch (const std::exception&) {
        return false;
    }
    return *lo >= 0 && *hi >= *lo;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"figkit: geometric construction corpora and benchmark scoring"};
    app.require_subcommand(1);

    // --- synthesize ---
    auto* synth = app.add_subcommand("synthesize",
                                     "generate construction programs");
    CommonFlags synth_flags;
    add_common(synth, synth_flags);
    int count = 0;
    std::string steps;
    synth->add_option("--count", count, "programs to produce");
    synth->add_option("--steps", steps, "relation steps, MIN..MAX or a number");

    // --- render ---
    auto* render = app.add_subcommand("render",
                                      "render edit trajectories and caption pairs");
    CommonFlags render_flags;
    add_common(render, render_flags);
    std::string geo_dir;
    int variants = 0;
    render->add_option("--geo-dir", geo_dir, "directory of .geo programs");
    render->add_option("--variants", variants, "render seeds per program");

    // --- curate ---
    auto* curate = app.add_subcommand("curate",
                                      "dedup, decontaminate and sample corpora");
    CommonFlags curate_flags;
    add_common(curate, curate_flags);
    std::string dedup_input, dedup_root, train, bench_file, pool;
    int target = 0;
    double decon_threshold = -1;
    curate->add_option("--records", dedup_input, "caption-pair jsonl to dedup");
    curate->add_option("--dataset-root", dedup_root, "root for relative image paths");
    curate->add_option("--train", train, "training jsonl to decontaminate");
    curate->add_option("--bench", bench_file, "benchmark jsonl to test against");
    curate->add_option("--threshold", decon_threshold, "decontamination threshold");
    curate->add_option("--pool", pool, "problem pool jsonl to sample from");
    curate->add_option("--target", target, "benchmark sample size");

    // --- evaluate ---
    auto* evaluate = app.add_subcommand("evaluate",
                                        "score predictions under the judge protocol");
    CommonFlags eval_flags;
    add_common(evaluate, eval_flags);
    std::string eval_bench, predictions, endpoint, script, model;
    evaluate->add_option("--bench", eval_bench, "benchmark jsonl");
    evaluate->add_option("--predictions", predictions, "predictions jsonl");
    evaluate->add_option("--judge-endpoint", endpoint, "judge HTTP endpoint");
    evaluate->add_option("--judge-script", script, "canned judge replies (JSON)");
    evaluate->add_option("--judge-model", model, "judge model name");

    // --- report ---
    auto* report = app.add_subcommand("report",
                                      "re-aggregate a finished evaluate run");
    std::string run_dir, report_out;
    report->add_option("--run", run_dir, "evaluate run directory")->required();
    report->add_option("--out", report_out, "where to write the report");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            auto config = resolve(synth, synth_flags);
            if (synth->count("--count")) config.synthesize.count = count;
            if (synth->count("--steps") &&
                !parse_steps_range(steps, &config.synthesize.steps_min,
                                   &config.synthesize.steps_max)) {
                std::cerr << "bad --steps range: " << steps << "\n";
                return 1;
            }
            return figkit::run_synthesize(config);
        }
        if (render->parsed()) {
            auto config = resolve(render, render_flags);
            if (render->count("--geo-dir")) config.render.geo_dir = geo_dir;
            if (render->count("--variants")) config.render.variants = variants;
            return figkit::run_render(config);
        }
        if (curate->parsed()) {
            auto config = resolve(curate, curate_flags);
            if (curate->count("--records")) config.curate.dedup_input = dedup_input;
            if (curate->count("--dataset-root")) {
                config.curate.dedup_dataset_root = dedup_root;
            }
            if (curate->count("--train")) config.curate.decontaminate_train = train;
            if (curate->count("--bench")) config.curate.decontaminate_bench = bench_file;
            if (curate->count("--threshold")) {
                config.curate.decontaminate_threshold = decon_threshold;
            }
            if (curate->count("--pool")) config.curate.sample_pool = pool;
            if (curate->count("--target")) config.curate.sample_target = target;
            return figkit::run_curate(config);
        }
        if (evaluate->parsed()) {
            auto config = resolve(evaluate, eval_flags);
            if (evaluate->count("--bench")) config.evaluate.bench = eval_bench;
            if (evaluate->count("--predictions")) {
                config.evaluate.predictions = predictions;
            }
            if (evaluate->count("--judge-endpoint")) {
                config.evaluate.judge_endpoint = endpoint;
            }
            if (evaluate->count("--judge-script")) {
                config.evaluate.judge_script = script;
            }
            if (evaluate->count("--judge-model")) config.evaluate.judge_model = model;
            return figkit::run_evaluate(config);
        }
        if (report->parsed()) {
            return figkit::run_report(run_dir, report_out);
        }
    } catch (const std::exception& ex) {
        figkit::log_event("fatal", {{"error", ex.what()}});
        return 1;
    }
    return 1;
}
