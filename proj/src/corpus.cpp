#include "figkit/corpus.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "figkit/png_codec.hpp"
#include "figkit/textsim.hpp"

namespace figkit {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Chunking
// ---------------------------------------------------------------------------

std::vector<std::pair<int, int>> chunk_trajectory(int n_steps) {
    std::vector<std::pair<int, int>> chunks;
    if (n_steps <= 0) return chunks;
    if (n_steps == 1) {
        chunks.push_back({0, 1});
        return chunks;
    }
    int start = 0;
    int remaining = n_steps;
    while (remaining > 4) {
        int take = remaining == 5 ? 3 : 4;
        chunks.push_back({start, start + take});
        start += take;
        remaining -= take;
    }
    chunks.push_back({start, start + remaining});
    return chunks;
}

// ---------------------------------------------------------------------------
// Dedup
// ---------------------------------------------------------------------------

DedupResult dedup_records(const std::vector<std::string>& texts,
                          const std::vector<std::optional<uint64_t>>& hashes,
                          const DedupConfig& config) {
    DedupResult result;
    std::vector<std::unordered_set<uint64_t>> grams;
    grams.reserve(texts.size());
    for (const auto& t : texts) grams.push_back(ngram_set(t));

    auto close_hashes = [&](size_t i, size_t j) {
        if (!hashes[i] || !hashes[j]) return false;
        int dist = 0;
        uint64_t x = *hashes[i] ^ *hashes[j];
        while (x) {
            x &= x - 1;
            ++dist;
        }
        return dist <= config.hash_max_distance;
    };

    for (size_t i = 0; i < texts.size(); ++i) {
        bool duplicate = false;
        for (size_t k : result.kept) {
            if (!close_hashes(i, k)) continue;
            if (jaccard(grams[i], grams[k]) > config.text_threshold) {
                result.dropped.push_back(i);
                result.matches.push_back({i, k});
                duplicate = true;
                break;
            }
        }
        if (!duplicate) result.kept.push_back(i);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Decontamination
// ---------------------------------------------------------------------------

DecontaminationResult decontaminate(
    const std::vector<std::pair<std::string, std::string>>& train,
    const std::vector<std::pair<std::string, std::string>>& bench,
    double threshold, int jobs) {
    std::vector<std::unordered_set<uint64_t>> bench_grams;
    bench_grams.reserve(bench.size());
    for (const auto& [id, text] : bench) bench_grams.push_back(ngram_set(text));

    struct Verdict {
        bool remove = false;
        size_t bench_index = 0;
        double score = 0.0;
    };
    std::vector<Verdict> verdicts(train.size());

    auto score_one = [&](size_t i) {
        auto grams = ngram_set(train[i].second);
        Verdict v;
        for (size_t b = 0; b < bench.size(); ++b) {
            double s = jaccard(grams, bench_grams[b]);
            if (s > v.score || (s == v.score && !v.remove)) {
                v.score = s;
                v.bench_index = b;
            }
        }
        v.remove = v.score > threshold;
        verdicts[i] = v;
    };

    if (jobs <= 1 || train.size() < 2) {
        for (size_t i = 0; i < train.size(); ++i) score_one(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) {
            pool.emplace_back([&] {
                for (;;) {
                    size_t i = next.fetch_add(1);
                    if (i >= train.size()) return;
                    score_one(i);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    DecontaminationResult result;
    for (size_t i = 0; i < train.size(); ++i) {
        if (verdicts[i].remove) {
            result.removed.push_back({train[i].first,
                                      bench[verdicts[i].bench_index].first,
                                      verdicts[i].score});
        } else {
            result.kept.push_back(i);
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// JSONL
// ---------------------------------------------------------------------------

namespace {

void check_image(const std::string& record_id, const std::string& field,
                 const std::string& path, const std::string& root) {
    if (path.empty()) {
        throw SchemaViolation(record_id, field, "empty image path");
    }
    if (root.empty()) return;
    fs::path full = fs::path(root) / path;
    std::ifstream in(full, std::ios::binary);
    if (!in) {
        throw SchemaViolation(record_id, field, "image missing: " + full.string());
    }
    std::string head(64, '\0');
    in.read(head.data(), static_cast<std::streamsize>(head.size()));
    head.resize(static_cast<size_t>(in.gcount()));
    int w = 0, h = 0;
    if (!png_dimensions(head, &w, &h)) {
        throw SchemaViolation(record_id, field, "not a PNG: " + full.string());
    }
    if (w != 512 || h != 512) {
        throw SchemaViolation(record_id, field,
                              "expected 512x512, got " + std::to_string(w) + "x" +
                                  std::to_string(h));
    }
}

std::vector<json> parse_lines(const std::string& text) {
    std::vector<json> out;
    size_t pos = 0;
    int line_no = 0;
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw SchemaViolation("line " + std::to_string(line_no), "",
                                  "malformed JSON");
        }
        out.push_back(std::move(j));
    }
    return out;
}

}  // namespace

const std::vector<std::string>& knowledge_categories() {
    static const std::vector<std::string> cats = {
        "Algebra",        "Analytic Geometry", "Calc & Vector",
        "Plane Geometry", "Solid Geometry",    "Statistics",
        "Transformation Geometry", "Trigonometry"};
    return cats;
}

std::string edit_records_to_jsonl(const std::vector<EditTrajectoryRecord>& records,
                                  const std::string& dataset_root) {
    std::string out;
    for (const auto& r : records) {
        if (r.id.empty()) throw SchemaViolation(r.id, "id", "empty id");
        if (r.steps.empty()) throw SchemaViolation(r.id, "steps", "no steps");
        if (static_cast<int>(r.steps.size()) >= 2) {
            int covered = 0;
            for (auto [s, e] : r.chunk_bounds) {
                if (e - s < 2 || e - s > 4) {
                    throw SchemaViolation(r.id, "chunk_bounds",
                                          "chunk length outside [2,4]");
                }
                if (s != covered) {
                    throw SchemaViolation(r.id, "chunk_bounds", "chunks must partition");
                }
                covered = e;
            }
            if (covered != static_cast<int>(r.steps.size())) {
                throw SchemaViolation(r.id, "chunk_bounds", "chunks must cover steps");
            }
        }
        json steps = json::array();
        for (const auto& s : r.steps) {
            if (s.instruction.empty()) {
                throw SchemaViolation(r.id, "instruction", "empty instruction");
            }
            check_image(r.id, "image_before", s.image_before, dataset_root);
            check_image(r.id, "image_after", s.image_after, dataset_root);
            steps.push_back({{"instruction", s.instruction},
                             {"image_before", s.image_before},
                             {"image_after", s.image_after}});
        }
        json chunks = json::array();
        for (auto [s, e] : r.chunk_bounds) chunks.push_back({s, e});
        json j{{"id", r.id},
               {"program_id", r.program_id},
               {"render_seed", r.render_seed},
               {"steps", steps},
               {"chunk_bounds", chunks},
               {"below_min", r.below_min}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::string imagen_records_to_jsonl(const std::vector<CaptionPairRecord>& records,
                                    const std::string& dataset_root) {
    std::string out;
    for (const auto& r : records) {
        if (r.id.empty()) throw SchemaViolation(r.id, "id", "empty id");
        if (r.caption.empty()) throw SchemaViolation(r.id, "caption", "empty caption");
        check_image(r.id, "image", r.image, dataset_root);
        json j{{"id", r.id},
               {"caption", r.caption},
               {"image", r.image},
               {"source", r.source == CaptionSource::edit_step ? "edit_step"
                                                               : "synthesized"}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::string instruct_records_to_jsonl(const std::vector<InstructRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        if (r.id.empty()) throw SchemaViolation(r.id, "id", "empty id");
        if (r.question_text.empty()) {
            throw SchemaViolation(r.id, "question_text", "empty question");
        }
        bool known = false;
        for (const auto& c : knowledge_categories()) known |= (c == r.category);
        if (!known) {
            throw SchemaViolation(r.id, "category", "unknown category '" +
                                                        r.category + "'");
        }
        if (r.n_subquestions < 1) {
            throw SchemaViolation(r.id, "n_subquestions", "must be >= 1");
        }
        json j{{"id", r.id},
               {"question_text", r.question_text},
               {"question_images", r.question_images},
               {"ground_truth_answer", r.ground_truth_answer},
               {"category", r.category},
               {"n_subquestions", r.n_subquestions},
               {"is_multiple_choice", r.is_multiple_choice},
               {"solution_text", r.solution_text},
               {"solution_images", r.solution_images}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<EditTrajectoryRecord> edit_records_from_jsonl(const std::string& text) {
    std::vector<EditTrajectoryRecord> out;
    for (const auto& j : parse_lines(text)) {
        EditTrajectoryRecord r;
        r.id = j.at("id").get<std::string>();
        r.program_id = j.value("program_id", "");
        r.render_seed = j.value("render_seed", 0ull);
        for (const auto& s : j.at("steps")) {
            r.steps.push_back({s.at("instruction").get<std::string>(),
                               s.at("image_before").get<std::string>(),
                               s.at("image_after").get<std::string>()});
        }
        for (const auto& c : j.value("chunk_bounds", json::array())) {
            r.chunk_bounds.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
        }
        r.below_min = j.value("below_min", false);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<CaptionPairRecord> imagen_records_from_jsonl(const std::string& text) {
    std::vector<CaptionPairRecord> out;
    for (const auto& j : parse_lines(text)) {
        CaptionPairRecord r;
        r.id = j.at("id").get<std::string>();
        r.caption = j.at("caption").get<std::string>();
        r.image = j.at("image").get<std::string>();
        r.source = j.value("source", "edit_step") == "synthesized"
                       ? CaptionSource::synthesized
                       : CaptionSource::edit_step;
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<InstructRecord> instruct_records_from_jsonl(const std::string& text) {
    std::vector<InstructRecord> out;
    for (const auto& j : parse_lines(text)) {
        InstructRecord r;
        r.id = j.at("id").get<std::string>();
        r.question_text = j.at("question_text").get<std::string>();
        r.question_images =
            j.value("question_images", std::vector<std::string>{});
        r.ground_truth_answer = j.value("ground_truth_answer", "");
        r.category = j.value("category", "");
        r.n_subquestions = j.value("n_subquestions", 1);
        if (j.contains("is_multiple_choice")) {
            r.is_multiple_choice = j.at("is_multiple_choice").get<bool>();
        } else {
            // Fallback heuristic: three or more of the A. B. C. D. markers.
            const char* markers[] = {"A.", "B.", "C.", "D."};
            int found = 0;
            for (const char* m : markers) {
                size_t at = r.question_text.find(m);
                while (at != std::string::npos) {
                    if (at == 0 || r.question_text[at - 1] == ' ' ||
                        r.question_text[at - 1] == '\n' ||
                        r.question_text[at - 1] == '(') {
                        ++found;
                        break;
                    }
                    at = r.question_text.find(m, at + 1);
                }
            }
            r.is_multiple_choice = found >= 3;
        }
        r.solution_text = j.value("solution_text", "");
        r.solution_images = j.value("solution_images", std::vector<std::string>{});
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace figkit
