#include "figkit/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "figkit/bench.hpp"
#include "figkit/captions.hpp"
#include "figkit/imagehash.hpp"
#include "figkit/judge.hpp"
#include "figkit/render.hpp"
#include "figkit/rng.hpp"

namespace figkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

uint64_t str_hash(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("short write to " + path.string());
}

std::string hex_seed(uint64_t seed) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(seed));
    return buf;
}

// Fail fast on unwritable output roots, before any partial output exists.
bool probe_writable(const fs::path& root) {
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) return false;
    fs::path probe = root / ".write_probe";
    {
        std::ofstream out(probe, std::ios::binary);
        if (!out) return false;
        out << "ok";
        if (!out) return false;
    }
    fs::remove(probe, ec);
    return true;
}

void write_resolved_config(const PipelineConfig& config) {
    write_file(fs::path(config.output_root) / "resolved_config.json",
               config_to_json(config));
}

void parallel_indices(int count, int jobs, const std::function<void(int)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min(jobs, count); ++t) {
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

void log_event(const std::string& event,
               const std::vector<std::pair<std::string, std::string>>& fields) {
    json j{{"event", event}};
    for (const auto& [k, v] : fields) j[k] = v;
    std::cerr << j.dump() << "\n";
}

// ---------------------------------------------------------------------------
// synthesize
// ---------------------------------------------------------------------------

int run_synthesize(const PipelineConfig& config) {
    fs::path out_root(config.output_root);
    fs::path programs_dir = out_root / "programs";
    if (!probe_writable(out_root) || !probe_writable(programs_dir)) {
        log_event("fatal", {{"error", "output root is not writable"},
                            {"path", out_root.string()}});
        return 2;
    }

    auto sc = config.synthesis_config();
    auto manifest = synthesize_batch(sc, config.synthesize.count, config.jobs);

    json program_list = json::array();
    for (size_t i = 0; i < manifest.programs.size(); ++i) {
        const auto& rec = manifest.programs[i];
        std::string file = "programs/" + rec.id + ".geo";
        write_file(out_root / file, serialize_program(rec.program));
        program_list.push_back({{"id", rec.id},
                                {"file", file},
                                {"realize_seed", rec.realize_seed},
                                {"relation_steps", rec.relation_steps}});
    }

    json rejected = json::object();
    for (const auto& [reason, n] : manifest.rejected_by_reason) rejected[reason] = n;
    json m{{"seed", manifest.seed},
           {"attempts", manifest.attempts},
           {"produced", manifest.produced},
           {"failed", manifest.failed},
           {"rejected_by_reason", rejected},
           {"programs", program_list}};
    write_file(out_root / "manifest.json", m.dump(2) + "\n");
    write_resolved_config(config);

    log_event("synthesize_done",
              {{"produced", std::to_string(manifest.produced)},
               {"failed", std::to_string(manifest.failed)}});
    return 0;
}

// ---------------------------------------------------------------------------
// render
// ---------------------------------------------------------------------------

namespace {

struct GeoEntry {
    std::string file;       // absolute path
    std::string id;         // program id (from content)
    uint64_t realize_seed;  // manifest or derived
    ConstructionProgram program;
};

}  // namespace

int run_render(const PipelineConfig& config) {
    fs::path out_root(config.output_root);
    if (!probe_writable(out_root)) {
        log_event("fatal", {{"error", "output root is not writable"}});
        return 2;
    }
    fs::path geo_dir = config.render.geo_dir.empty()
                           ? out_root / "programs"
                           : fs::path(config.render.geo_dir);
    if (!fs::is_directory(geo_dir)) {
        log_event("fatal", {{"error", "geo dir missing"}, {"path", geo_dir.string()}});
        return 2;
    }

    // Manifest (if present) supplies realization seeds.
    std::map<std::string, uint64_t> manifest_seeds;
    for (const fs::path cand :
         {geo_dir / "manifest.json", geo_dir.parent_path() / "manifest.json"}) {
        if (!fs::exists(cand)) continue;
        json m = json::parse(read_file(cand), nullptr, false);
        if (m.is_discarded()) continue;
        for (const auto& p : m.value("programs", json::array())) {
            manifest_seeds[p.at("id").get<std::string>()] =
                p.at("realize_seed").get<uint64_t>();
        }
        break;
    }

    std::vector<std::string> geo_files;
    for (const auto& entry : fs::directory_iterator(geo_dir)) {
        if (entry.path().extension() == ".geo") {
            geo_files.push_back(entry.path().string());
        }
    }
    std::sort(geo_files.begin(), geo_files.end());

    std::vector<GeoEntry> entries;
    int parse_failures = 0;
    for (const auto& file : geo_files) {
        try {
            auto program = parse_program(read_file(file));
            auto violations = validate_program(program);
            if (!violations.empty()) {
                throw std::runtime_error("invalid program: " +
                                         std::string(to_string(violations[0].rule)));
            }
            GeoEntry e;
            e.file = file;
            e.id = program.id();
            e.realize_seed = manifest_seeds.count(e.id)
                                 ? manifest_seeds[e.id]
                                 : hash_combine({config.seed, str_hash(e.id)});
            e.program = std::move(program);
            entries.push_back(std::move(e));
        } catch (const std::exception& ex) {
            ++parse_failures;
            log_event("program_failed", {{"file", file}, {"error", ex.what()}});
        }
    }

    write_file(out_root / "images" / "blank.png", blank_canvas_png());

    struct TrajectoryOut {
        EditTrajectoryRecord edit;
        std::vector<CaptionPairRecord> pairs;
        bool ok = false;
    };
    const int variants = std::max(1, config.render.variants);
    std::vector<TrajectoryOut> outputs(entries.size() * variants);
    std::atomic<int> render_failures{0};

    parallel_indices(static_cast<int>(entries.size()) * variants, config.jobs,
                     [&](int slot) {
        const GeoEntry& e = entries[static_cast<size_t>(slot) / variants];
        int variant = slot % variants;
        uint64_t render_seed =
            hash_combine({config.seed, str_hash(e.id),
                          static_cast<uint64_t>(variant), 0x7e5dULL});
        std::string rel_dir = "images/" + e.id + "/" + hex_seed(render_seed);
        fs::path abs_dir = out_root / rel_dir;
        const int n_steps = static_cast<int>(e.program.statements.size());

        bool complete = true;
        for (int k = 0; k < n_steps && complete; ++k) {
            complete = fs::exists(abs_dir / ("step_" + std::to_string(k) + ".png")) &&
                       fs::exists(abs_dir / ("step_" + std::to_string(k) + ".svg"));
        }
        try {
            if (!complete) {
                auto steps = render_trajectory(e.program, e.realize_seed,
                                               render_seed, config.realize);
                fs::create_directories(abs_dir);
                for (const auto& step : steps) {
                    std::string stem = "step_" + std::to_string(step.step_index);
                    write_file(abs_dir / (stem + ".svg"), step.svg);
                    write_file(abs_dir / (stem + ".png"), step.png);
                }
            }
        } catch (const std::exception& ex) {
            render_failures.fetch_add(1);
            log_event("program_failed", {{"id", e.id}, {"error", ex.what()}});
            return;
        }

        TrajectoryOut& out = outputs[static_cast<size_t>(slot)];
        out.edit.id = "e-" + e.id + "-" + hex_seed(render_seed);
        out.edit.program_id = e.id;
        out.edit.render_seed = render_seed;
        for (int k = 0; k < n_steps; ++k) {
            EditStep step;
            step.instruction = caption_for(e.program.statements[static_cast<size_t>(k)]);
            step.image_before =
                k == 0 ? "images/blank.png"
                       : rel_dir + "/step_" + std::to_string(k - 1) + ".png";
            step.image_after = rel_dir + "/step_" + std::to_string(k) + ".png";
            out.edit.steps.push_back(std::move(step));

            CaptionPairRecord pair;
            pair.id = "c-" + e.id + "-" + hex_seed(render_seed) + "-" +
                      std::to_string(k);
            pair.caption = cumulative_caption(e.program, k);
            pair.image = rel_dir + "/step_" + std::to_string(k) + ".png";
            pair.source = k + 1 == n_steps ? CaptionSource::synthesized
                                           : CaptionSource::edit_step;
            out.pairs.push_back(std::move(pair));
        }
        out.edit.chunk_bounds = chunk_trajectory(n_steps);
        out.edit.below_min = n_steps < 2;
        out.ok = true;
    });

    std::vector<EditTrajectoryRecord> edits;
    std::vector<CaptionPairRecord> pairs;
    for (auto& out : outputs) {
        if (!out.ok) continue;
        edits.push_back(std::move(out.edit));
        for (auto& p : out.pairs) pairs.push_back(std::move(p));
    }
    const std::string& split = config.render.split;
    write_file(out_root / "edit" / split / "records.jsonl",
               edit_records_to_jsonl(edits, config.output_root));
    write_file(out_root / "imagen" / split / "records.jsonl",
               imagen_records_to_jsonl(pairs, config.output_root));
    write_resolved_config(config);

    log_event("render_done",
              {{"trajectories", std::to_string(edits.size())},
               {"caption_pairs", std::to_string(pairs.size())},
               {"failures",
                std::to_string(parse_failures + render_failures.load())}});
    return 0;
}

// ---------------------------------------------------------------------------
// curate
// ---------------------------------------------------------------------------

int run_curate(const PipelineConfig& config) {
    fs::path out_root(config.output_root);
    if (!probe_writable(out_root)) {
        log_event("fatal", {{"error", "output root is not writable"}});
        return 2;
    }

    try {
        if (!config.curate.dedup_input.empty()) {
            auto records =
                imagen_records_from_jsonl(read_file(config.curate.dedup_input));
            std::vector<std::string> texts;
            std::vector<std::optional<uint64_t>> hashes;
            const std::string& root = config.curate.dedup_dataset_root;
            for (const auto& r : records) {
                texts.push_back(r.caption);
                std::optional<uint64_t> h;
                fs::path img = root.empty() ? fs::path(r.image)
                                            : fs::path(root) / r.image;
                if (fs::exists(img)) {
                    try {
                        h = dhash64(decode_png(read_file(img)));
                    } catch (const PngError&) {
                    }
                }
                hashes.push_back(h);
            }
            DedupConfig dc;
            dc.text_threshold = config.curate.dedup_text_threshold;
            dc.hash_max_distance = config.curate.dedup_hash_max_distance;
            auto result = dedup_records(texts, hashes, dc);

            std::vector<CaptionPairRecord> kept;
            for (size_t i : result.kept) kept.push_back(records[i]);
            write_file(out_root / "curated" / "imagen" / "records.jsonl",
                       imagen_records_to_jsonl(kept, ""));
            json dropped = json::array();
            for (const auto& [d, k] : result.matches) {
                dropped.push_back({{"id", records[d].id}, {"kept_id", records[k].id}});
            }
            write_file(out_root / "dedup_report.json",
                       json{{"input", records.size()},
                            {"kept", result.kept.size()},
                            {"dropped", dropped}}
                               .dump(2) +
                           "\n");
            log_event("dedup_done", {{"kept", std::to_string(result.kept.size())},
                                     {"dropped",
                                      std::to_string(result.dropped.size())}});
        }

        if (!config.curate.decontaminate_train.empty()) {
            auto train = instruct_records_from_jsonl(
                read_file(config.curate.decontaminate_train));
            auto bench = instruct_records_from_jsonl(
                read_file(config.curate.decontaminate_bench));
            std::vector<std::pair<std::string, std::string>> train_texts,
                bench_texts;
            for (const auto& r : train) train_texts.push_back({r.id, r.question_text});
            for (const auto& r : bench) bench_texts.push_back({r.id, r.question_text});
            auto result =
                decontaminate(train_texts, bench_texts,
                              config.curate.decontaminate_threshold, config.jobs);

            std::vector<InstructRecord> kept;
            for (size_t i : result.kept) kept.push_back(train[i]);
            write_file(out_root / "curated" / "instruct" / "records.jsonl",
                       instruct_records_to_jsonl(kept));
            json removed = json::array();
            for (const auto& r : result.removed) {
                removed.push_back({{"train_id", r.train_id},
                                   {"bench_id", r.bench_id},
                                   {"score", r.score}});
            }
            write_file(out_root / "decontamination_report.json",
                       json{{"input", train.size()},
                            {"kept", result.kept.size()},
                            {"threshold", config.curate.decontaminate_threshold},
                            {"removed", removed}}
                               .dump(2) +
                           "\n");
            log_event("decontaminate_done",
                      {{"removed", std::to_string(result.removed.size())}});
        }

        if (!config.curate.sample_pool.empty() && config.curate.sample_target > 0) {
            auto pool_records =
                instruct_records_from_jsonl(read_file(config.curate.sample_pool));
            std::vector<BenchProblem> pool;
            for (const auto& r : pool_records) pool.push_back(bench_problem_from(r));
            auto report =
                sample_bench(pool, config.curate.sample_target, config.seed);

            std::vector<InstructRecord> selected;
            for (const auto& id : report.selected_ids) {
                for (const auto& r : pool_records) {
                    if (r.id == id) {
                        selected.push_back(r);
                        break;
                    }
                }
            }
            write_file(out_root / "curated" / "bench" / "records.jsonl",
                       instruct_records_to_jsonl(selected));
            json quotas = json::object();
            for (const auto& [cat, q] : report.quotas) quotas[cat] = q;
            json fills = json::object();
            for (const auto& [cat, f] : report.shortfall_fill) fills[cat] = f;
            write_file(out_root / "sampling_report.json",
                       json{{"target", config.curate.sample_target},
                            {"quotas", quotas},
                            {"shortfall_fill", fills},
                            {"selected", report.selected_ids}}
                               .dump(2) +
                           "\n");
            log_event("sample_done",
                      {{"selected", std::to_string(report.selected_ids.size())}});
        }
    } catch (const SchemaViolation& ex) {
        log_event("fatal", {{"error", ex.what()}});
        return 1;
    }

    write_resolved_config(config);
    return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

namespace {

// Captures every prompt/reply pair that actually reaches the transport.
class RecordingClient : public JudgeClient {
public:
    explicit RecordingClient(JudgeClient* inner) : inner_(inner) {}

    std::string complete(const std::string& prompt) override {
        if (!inner_) throw JudgeUnreachable("no judge transport configured");
        std::string reply = inner_->complete(prompt);
        std::lock_guard<std::mutex> lock(mu_);
        prompts_.push_back(prompt);
        replies_.push_back(reply);
        return reply;
    }

    json transcript() const {
        json out = json::array();
        for (size_t i = 0; i < prompts_.size(); ++i) {
            out.push_back({{"prompt", prompts_[i]}, {"reply", replies_[i]}});
        }
        return out;
    }

    size_t calls() const { return prompts_.size(); }

private:
    JudgeClient* inner_;
    std::mutex mu_;
    std::vector<std::string> prompts_;
    std::vector<std::string> replies_;
};

int evaluate_impl(const PipelineConfig& config, const std::string& cache_dir,
                  bool allow_transport) {
    fs::path out_root(config.output_root);
    if (!probe_writable(out_root)) {
        log_event("fatal", {{"error", "output root is not writable"}});
        return 2;
    }

    std::vector<BenchProblem> problems;
    std::map<std::string, std::string> predictions;
    try {
        auto bench_records =
            instruct_records_from_jsonl(read_file(config.evaluate.bench));
        for (const auto& r : bench_records) problems.push_back(bench_problem_from(r));
        std::string pred_text = read_file(config.evaluate.predictions);
        size_t pos = 0;
        while (pos < pred_text.size()) {
            size_t eol = pred_text.find('\n', pos);
            if (eol == std::string::npos) eol = pred_text.size();
            std::string line = pred_text.substr(pos, eol - pos);
            pos = eol + 1;
            if (line.empty()) continue;
            json j = json::parse(line);
            predictions[j.at("id").get<std::string>()] =
                j.at("solution").get<std::string>();
        }
    } catch (const std::exception& ex) {
        log_event("fatal", {{"error", ex.what()}});
        return 1;
    }
    std::sort(problems.begin(), problems.end(),
              [](const BenchProblem& a, const BenchProblem& b) { return a.id < b.id; });

    // Transport: scripted file beats HTTP; neither means cache-only.
    std::unique_ptr<JudgeClient> transport;
    std::unique_ptr<ScriptedJudgeClient> scripted;
    if (allow_transport && !config.evaluate.judge_script.empty()) {
        json script = json::parse(read_file(config.evaluate.judge_script));
        std::map<std::string, std::vector<std::string>> canned;
        for (const auto& [id, replies] : script.items()) {
            for (const auto& r : replies) {
                canned[id].push_back(r.is_string() ? r.get<std::string>() : r.dump());
            }
        }
        scripted = std::make_unique<ScriptedJudgeClient>(std::move(canned));
    } else if (allow_transport && !config.evaluate.judge_endpoint.empty()) {
        HttpJudgeConfig hc;
        hc.endpoint = config.evaluate.judge_endpoint;
        hc.path = config.evaluate.judge_path;
        hc.model = config.evaluate.judge_model;
        hc.temperature = config.evaluate.temperature;
        hc.transport_attempts = config.evaluate.transport_attempts;
        if (const char* key = std::getenv(config.evaluate.credential_env.c_str())) {
            hc.api_key = key;
        }
        transport = make_http_judge_client(hc);
    }
    RecordingClient client(scripted ? static_cast<JudgeClient*>(scripted.get())
                                    : transport.get());

    JudgeOptions jopt;
    jopt.verdict_retries = config.evaluate.verdict_retries;
    jopt.asset_dir = config.asset_dir;
    jopt.cache_dir = cache_dir;

    std::vector<ProblemResult> results(problems.size());
    JudgeStats stats;
    std::mutex stats_mu;
    std::atomic<bool> unreachable{false};
    std::string unreachable_msg;

    parallel_indices(static_cast<int>(problems.size()),
                     std::max(1, config.evaluate.concurrency), [&](int i) {
        if (unreachable.load()) return;
        const BenchProblem& problem = problems[static_cast<size_t>(i)];
        ProblemResult r;
        r.id = problem.id;
        r.category = problem.category;
        r.n_subquestions = problem.n_subquestions;
        auto pred = predictions.find(problem.id);
        std::string prediction = pred == predictions.end() ? "" : pred->second;
        try {
            auto outcome = judge_problem(problem, prediction, client, jopt);
            r.flagged = outcome.flagged;
            r.verdict = outcome.verdict;
            if (!outcome.flagged) {
                r.score = score_problem(outcome.verdict, problem.n_subquestions);
            }
            std::lock_guard<std::mutex> lock(stats_mu);
            stats.calls += outcome.calls;
            stats.retries += outcome.retries;
            stats.parse_failures += outcome.parse_failures;
            if (outcome.from_cache) ++stats.cache_hits;
        } catch (const JudgeUnreachable& ex) {
            unreachable.store(true);
            std::lock_guard<std::mutex> lock(stats_mu);
            unreachable_msg = ex.what();
        }
        results[static_cast<size_t>(i)] = std::move(r);
    });

    if (unreachable.load()) {
        log_event("fatal", {{"error", "judge unreachable"},
                            {"detail", unreachable_msg}});
        return 1;
    }

    auto report = aggregate_results(std::move(results), stats);
    write_file(out_root / "report.json", eval_report_to_json(report));
    write_file(out_root / "report.txt", eval_report_table(report));
    write_file(out_root / "judge_transcript.json",
               client.transcript().dump(2) + "\n");
    write_resolved_config(config);

    std::cout << eval_report_table(report);
    log_event("evaluate_done",
              {{"problems", std::to_string(report.overall.count)},
               {"judge_calls", std::to_string(stats.calls)},
               {"cache_hits", std::to_string(stats.cache_hits)}});
    return 0;
}

}  // namespace

int run_evaluate(const PipelineConfig& config) {
    return evaluate_impl(config, config.output_root + "/cache", true);
}

int run_report(const std::string& run_dir, const std::string& out_dir) {
    try {
        auto config = load_config_file(run_dir + "/resolved_config.json");
        config.output_root = out_dir.empty() ? run_dir : out_dir;
        // Cache-only pass over the persisted verdicts.
        return evaluate_impl(config, run_dir + "/cache", false);
    } catch (const std::exception& ex) {
        log_event("fatal", {{"error", ex.what()}});
        return 1;
    }
}

}  // namespace figkit
