#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace figkit {

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------
struct EditStep {
    std::string instruction;
    std::string image_before;  // path relative to the dataset root
    std::string image_after;
};

struct EditTrajectoryRecord {
    std::string id;
    std::string program_id;
    uint64_t render_seed = 0;
    std::vector<EditStep> steps;
    std::vector<std::pair<int, int>> chunk_bounds;  // [start, end)
    bool below_min = false;  // single-step trajectory kept but flagged
};

enum class CaptionSource : uint8_t { edit_step, synthesized };

struct CaptionPairRecord {
    std::string id;
    std::string caption;
    std::string image;  // path relative to the dataset root
    CaptionSource source = CaptionSource::edit_step;
};

struct InstructRecord {
    std::string id;
    std::string question_text;
    std::vector<std::string> question_images;
    std::string ground_truth_answer;
    std::string category;
    int n_subquestions = 1;
    bool is_multiple_choice = false;
    std::string solution_text;  // interleaved text with image refs, optional
    std::vector<std::string> solution_images;
};

// ---------------------------------------------------------------------------
// Chunking
// ---------------------------------------------------------------------------
// Greedy chunks of four, never leaving a singleton tail: the final five
// steps split 3+2. n_steps == 1 yields one length-1 chunk (caller flags it).
std::vector<std::pair<int, int>> chunk_trajectory(int n_steps);

// ---------------------------------------------------------------------------
// Deduplication / decontamination
// ---------------------------------------------------------------------------
struct DedupConfig {
    double text_threshold = 0.85;   // drop above this similarity...
    int hash_max_distance = 6;      // ...when hashes are also this close
};

struct DedupResult {
    std::vector<size_t> kept;     // indices into the input, original order
    std::vector<size_t> dropped;  // indices of removed records
    std::vector<std::pair<size_t, size_t>> matches;  // (dropped, kept against)
};

// Stable first-wins pass over (text, image hash) pairs. A record is dropped
// when some kept record is closer than both thresholds at once.
DedupResult dedup_records(const std::vector<std::string>& texts,
                          const std::vector<std::optional<uint64_t>>& hashes,
                          const DedupConfig& config = {});

struct Removal {
    std::string train_id;
    std::string bench_id;
    double score = 0.0;
};

struct DecontaminationResult {
    std::vector<size_t> kept;  // indices into train, original order
    std::vector<Removal> removed;
};

// Removes train items whose best 5-gram Jaccard score against any bench
// item is strictly above the threshold.
DecontaminationResult decontaminate(
    const std::vector<std::pair<std::string, std::string>>& train,  // id, text
    const std::vector<std::pair<std::string, std::string>>& bench,
    double threshold = 0.4, int jobs = 1);

// ---------------------------------------------------------------------------
// JSONL
// ---------------------------------------------------------------------------
class SchemaViolation : public std::runtime_error {
public:
    SchemaViolation(std::string record_id, std::string field, const std::string& msg)
        : std::runtime_error("record '" + record_id + "' field '" + field +
                             "': " + msg),
          record_id(std::move(record_id)),
          field(std::move(field)) {}

    std::string record_id;
    std::string field;
};

// One compact JSON object per line, UTF-8, keys sorted. Validation throws
// SchemaViolation. `dataset_root` is consulted for image existence/size
// checks when non-empty.
std::string edit_records_to_jsonl(const std::vector<EditTrajectoryRecord>& records,
                                  const std::string& dataset_root = "");
std::string imagen_records_to_jsonl(const std::vector<CaptionPairRecord>& records,
                                    const std::string& dataset_root = "");
std::string instruct_records_to_jsonl(const std::vector<InstructRecord>& records);

std::vector<EditTrajectoryRecord> edit_records_from_jsonl(const std::string& text);
std::vector<CaptionPairRecord> imagen_records_from_jsonl(const std::string& text);
std::vector<InstructRecord> instruct_records_from_jsonl(const std::string& text);

// The eight knowledge categories a benchmark problem may carry.
const std::vector<std::string>& knowledge_categories();

}  // namespace figkit
