#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "figkit/corpus.hpp"

namespace figkit {

struct BenchProblem {
    std::string id;
    std::string question_text;
    std::vector<std::string> question_images;
    std::string ground_truth_answer;  // may carry <k>...</k> multi-part tags
    std::string category;
    int n_subquestions = 1;
    bool is_multiple_choice = false;
};

BenchProblem bench_problem_from(const InstructRecord& record);

// ---------------------------------------------------------------------------
// Ground-truth parsing
// ---------------------------------------------------------------------------
class MalformedTags : public std::runtime_error {
public:
    explicit MalformedTags(const std::string& msg) : std::runtime_error(msg) {}
};

// <k>...</k> tags, contiguous from 1, in index order. Tagless answers are a
// single element, unmodified.
std::vector<std::string> parse_gt_answer(const std::string& text);

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------
// w_i = 1.3^(i-1) / sum_j 1.3^(j-1); strictly increasing, sums to one.
std::vector<double> subquestion_weights(int n);

struct ProblemScore {
    int complete = 0;     // 1 iff every sub-answer is correct
    double weighted = 0;  // sum of the weights of correct sub-answers
};

class LengthMismatch : public std::runtime_error {
public:
    explicit LengthMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct JudgeVerdict {
    std::string analysis;
    std::vector<std::string> gt_answers;
    std::vector<std::optional<std::string>> pred_answers;
    std::vector<bool> correctness;
};

ProblemScore score_problem(const JudgeVerdict& verdict, int n_subquestions);

// ---------------------------------------------------------------------------
// Benchmark sampling
// ---------------------------------------------------------------------------
struct SamplingReport {
    std::map<std::string, int> quotas;           // after largest remainder
    std::map<std::string, int> shortfall_fill;   // re-spread from small cats
    std::vector<std::string> selected_ids;
};

// Per-category quotas proportional to p^0.7 (renormalized), rounded by
// largest remainder to sum to `target`; within-category sampling is a
// seeded uniform draw without replacement. MCQ items are excluded first.
SamplingReport sample_bench(const std::vector<BenchProblem>& pool, int target,
                            uint64_t seed);

// Quota computation alone, exposed for the fixture checks.
std::map<std::string, int> category_quotas(
    const std::map<std::string, int>& category_sizes, int target);

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------
struct ProblemResult {
    std::string id;
    std::string category;
    int n_subquestions = 1;
    ProblemScore score;
    bool flagged = false;  // judge failed; scored zero
    JudgeVerdict verdict;
};

struct JudgeStats {
    int calls = 0;
    int retries = 0;
    int parse_failures = 0;
    int cache_hits = 0;
};

struct Aggregate {
    int count = 0;
    double complete_mean = 0.0;
    double weighted_mean = 0.0;
};

struct EvalReport {
    std::vector<ProblemResult> per_problem;  // sorted by id
    Aggregate overall;
    std::map<std::string, Aggregate> by_category;
    JudgeStats judge_stats;
    std::vector<std::string> flagged_ids;
};

EvalReport aggregate_results(std::vector<ProblemResult> results,
                             const JudgeStats& stats);

// Machine-readable report.
std::string eval_report_to_json(const EvalReport& report);
EvalReport eval_report_from_json(const std::string& text);

// Human-readable table: Overall Complete | Weighted, then per category.
std::string eval_report_table(const EvalReport& report);

}  // namespace figkit
