#include "figkit/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "figkit/rng.hpp"

namespace figkit {

using nlohmann::json;

BenchProblem bench_problem_from(const InstructRecord& record) {
    BenchProblem p;
    p.id = record.id;
    p.question_text = record.question_text;
    p.question_images = record.question_images;
    p.ground_truth_answer = record.ground_truth_answer;
    p.category = record.category;
    p.is_multiple_choice = record.is_multiple_choice;
    p.n_subquestions =
        static_cast<int>(parse_gt_answer(record.ground_truth_answer).size());
    return p;
}

// ---------------------------------------------------------------------------
// Ground-truth parsing
// ---------------------------------------------------------------------------

std::vector<std::string> parse_gt_answer(const std::string& text) {
    // Collect <k>...</k> spans.
    std::vector<std::pair<int, std::string>> parts;
    size_t pos = 0;
    while (true) {
        size_t open = text.find('<', pos);
        if (open == std::string::npos) break;
        size_t close = text.find('>', open);
        if (close == std::string::npos) break;
        std::string tag = text.substr(open + 1, close - open - 1);
        bool numeric = !tag.empty();
        for (char c : tag) numeric &= (c >= '0' && c <= '9');
        if (!numeric) {
            pos = open + 1;
            continue;
        }
        std::string close_tag = "</" + tag + ">";
        size_t end = text.find(close_tag, close);
        if (end == std::string::npos) {
            throw MalformedTags("unterminated tag <" + tag + ">");
        }
        parts.push_back({std::stoi(tag), text.substr(close + 1, end - close - 1)});
        pos = end + close_tag.size();
    }
    if (parts.empty()) return {text};

    std::vector<std::string> out(parts.size());
    std::vector<bool> seen(parts.size(), false);
    for (auto& [index, content] : parts) {
        if (index < 1 || index > static_cast<int>(parts.size())) {
            throw MalformedTags("tag indices must be contiguous from 1");
        }
        if (seen[static_cast<size_t>(index) - 1]) {
            throw MalformedTags("duplicate tag <" + std::to_string(index) + ">");
        }
        seen[static_cast<size_t>(index) - 1] = true;
        out[static_cast<size_t>(index) - 1] = std::move(content);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

std::vector<double> subquestion_weights(int n) {
    std::vector<double> w(static_cast<size_t>(std::max(n, 0)));
    double sum = 0.0;
    double power = 1.0;
    for (int i = 0; i < n; ++i) {
        w[static_cast<size_t>(i)] = power;
        sum += power;
        power *= 1.3;
    }
    for (auto& v : w) v /= sum;
    return w;
}

ProblemScore score_problem(const JudgeVerdict& verdict, int n) {
    if (static_cast<int>(verdict.correctness.size()) != n) {
        throw LengthMismatch("correctness has " +
                             std::to_string(verdict.correctness.size()) +
                             " entries, expected " + std::to_string(n));
    }
    auto weights = subquestion_weights(n);
    ProblemScore score;
    score.complete = 1;
    for (int i = 0; i < n; ++i) {
        if (verdict.correctness[static_cast<size_t>(i)]) {
            score.weighted += weights[static_cast<size_t>(i)];
        } else {
            score.complete = 0;
        }
    }
    return score;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

std::map<std::string, int> category_quotas(
    const std::map<std::string, int>& category_sizes, int target) {
    double total = 0;
    for (const auto& [cat, n] : category_sizes) total += n;
    if (total <= 0 || target <= 0) return {};

    // Weights: p_c^0.7, renormalized.
    std::map<std::string, double> weight;
    double wsum = 0;
    for (const auto& [cat, n] : category_sizes) {
        double w = std::pow(static_cast<double>(n) / total, 0.7);
        weight[cat] = w;
        wsum += w;
    }

    std::map<std::string, int> quota;
    std::vector<std::pair<double, std::string>> remainders;
    int assigned = 0;
    for (const auto& [cat, w] : weight) {
        double raw = target * w / wsum;
        int base = static_cast<int>(std::floor(raw));
        quota[cat] = base;
        assigned += base;
        remainders.push_back({raw - base, cat});
    }
    // Largest remainder; ties break on category name for determinism.
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (int i = 0; assigned < target; ++i) {
        ++quota[remainders[static_cast<size_t>(i) % remainders.size()].second];
        ++assigned;
    }
    return quota;
}

SamplingReport sample_bench(const std::vector<BenchProblem>& pool, int target,
                            uint64_t seed) {
    SamplingReport report;

    std::map<std::string, std::vector<size_t>> by_category;
    for (size_t i = 0; i < pool.size(); ++i) {
        if (pool[i].is_multiple_choice) continue;
        by_category[pool[i].category].push_back(i);
    }
    std::map<std::string, int> sizes;
    for (const auto& [cat, idx] : by_category) {
        sizes[cat] = static_cast<int>(idx.size());
    }
    auto quota = category_quotas(sizes, target);

    // Quotas above a category's size spill over to categories with spare
    // capacity, largest-remainder style over the spare pool.
    int shortfall = 0;
    for (auto& [cat, q] : quota) {
        if (q > sizes[cat]) {
            shortfall += q - sizes[cat];
            report.shortfall_fill[cat] = sizes[cat] - q;  // negative: trimmed
            q = sizes[cat];
        }
    }
    while (shortfall > 0) {
        std::map<std::string, int> spare_sizes;
        for (const auto& [cat, q] : quota) {
            int spare = sizes[cat] - q;
            if (spare > 0) spare_sizes[cat] = spare;
        }
        if (spare_sizes.empty()) break;
        auto extra = category_quotas(spare_sizes, shortfall);
        bool progressed = false;
        for (const auto& [cat, add] : extra) {
            int real = std::min(add, spare_sizes[cat]);
            if (real > 0) {
                quota[cat] += real;
                report.shortfall_fill[cat] += real;
                shortfall -= real;
                progressed = true;
            }
        }
        if (!progressed) break;
    }
    report.quotas = quota;

    // Seeded Fisher-Yates per category, take the quota prefix.
    for (const auto& [cat, indices] : by_category) {
        auto order = indices;
        uint64_t h = hash_combine({seed, 0xca7u});
        for (char c : cat) h = mix64(h ^ static_cast<uint64_t>(c));
        Rng cat_rng(h);
        for (size_t i = order.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(cat_rng.below(i));
            std::swap(order[i - 1], order[j]);
        }
        int take = quota.count(cat) ? quota[cat] : 0;
        for (int i = 0; i < take && i < static_cast<int>(order.size()); ++i) {
            report.selected_ids.push_back(pool[order[static_cast<size_t>(i)]].id);
        }
    }
    std::sort(report.selected_ids.begin(), report.selected_ids.end());
    return report;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

EvalReport aggregate_results(std::vector<ProblemResult> results,
                             const JudgeStats& stats) {
    std::sort(results.begin(), results.end(),
              [](const ProblemResult& a, const ProblemResult& b) {
                  return a.id < b.id;
              });
    EvalReport report;
    report.judge_stats = stats;

    std::map<std::string, std::pair<double, double>> cat_sums;
    std::map<std::string, int> cat_counts;
    double complete_sum = 0, weighted_sum = 0;
    for (const auto& r : results) {
        complete_sum += r.score.complete;
        weighted_sum += r.score.weighted;
        cat_sums[r.category].first += r.score.complete;
        cat_sums[r.category].second += r.score.weighted;
        ++cat_counts[r.category];
        if (r.flagged) report.flagged_ids.push_back(r.id);
    }
    report.overall.count = static_cast<int>(results.size());
    if (!results.empty()) {
        report.overall.complete_mean = complete_sum / results.size();
        report.overall.weighted_mean = weighted_sum / results.size();
    }
    for (const auto& [cat, sums] : cat_sums) {
        Aggregate a;
        a.count = cat_counts[cat];
        a.complete_mean = sums.first / a.count;
        a.weighted_mean = sums.second / a.count;
        report.by_category[cat] = a;
    }
    report.per_problem = std::move(results);
    return report;
}

namespace {

json verdict_to_json(const JudgeVerdict& v) {
    json preds = json::array();
    for (const auto& p : v.pred_answers) {
        if (p) {
            preds.push_back(*p);
        } else {
            preds.push_back(nullptr);
        }
    }
    return json{{"analysis", v.analysis},
                {"gt_answers", v.gt_answers},
                {"pred_answers", preds},
                {"correctness", v.correctness}};
}

JudgeVerdict verdict_from_json(const json& j) {
    JudgeVerdict v;
    v.analysis = j.value("analysis", "");
    v.gt_answers = j.value("gt_answers", std::vector<std::string>{});
    for (const auto& p : j.value("pred_answers", json::array())) {
        if (p.is_null()) {
            v.pred_answers.push_back(std::nullopt);
        } else {
            v.pred_answers.push_back(p.get<std::string>());
        }
    }
    for (const auto& c : j.value("correctness", json::array())) {
        v.correctness.push_back(c.get<bool>());
    }
    return v;
}

}  // namespace

std::string eval_report_to_json(const EvalReport& report) {
    json per = json::array();
    for (const auto& r : report.per_problem) {
        per.push_back({{"id", r.id},
                       {"category", r.category},
                       {"n_subquestions", r.n_subquestions},
                       {"complete", r.score.complete},
                       {"weighted", r.score.weighted},
                       {"flagged", r.flagged},
                       {"verdict", verdict_to_json(r.verdict)}});
    }
    json cats = json::object();
    for (const auto& [cat, a] : report.by_category) {
        cats[cat] = {{"count", a.count},
                     {"complete_mean", a.complete_mean},
                     {"weighted_mean", a.weighted_mean}};
    }
    json j{{"per_problem", per},
           {"overall",
            {{"count", report.overall.count},
             {"complete_mean", report.overall.complete_mean},
             {"weighted_mean", report.overall.weighted_mean}}},
           {"by_category", cats},
           {"judge_stats",
            {{"calls", report.judge_stats.calls},
             {"retries", report.judge_stats.retries},
             {"parse_failures", report.judge_stats.parse_failures},
             {"cache_hits", report.judge_stats.cache_hits}}},
           {"flagged", report.flagged_ids}};
    return j.dump(2) + "\n";
}

EvalReport eval_report_from_json(const std::string& text) {
    json j = json::parse(text);
    std::vector<ProblemResult> results;
    for (const auto& r : j.at("per_problem")) {
        ProblemResult pr;
        pr.id = r.at("id").get<std::string>();
        pr.category = r.value("category", "");
        pr.n_subquestions = r.value("n_subquestions", 1);
        pr.score.complete = r.at("complete").get<int>();
        pr.score.weighted = r.at("weighted").get<double>();
        pr.flagged = r.value("flagged", false);
        pr.verdict = verdict_from_json(r.value("verdict", json::object()));
        results.push_back(std::move(pr));
    }
    JudgeStats stats;
    stats.calls = j.at("judge_stats").value("calls", 0);
    stats.retries = j.at("judge_stats").value("retries", 0);
    stats.parse_failures = j.at("judge_stats").value("parse_failures", 0);
    stats.cache_hits = j.at("judge_stats").value("cache_hits", 0);
    return aggregate_results(std::move(results), stats);
}

std::string eval_report_table(const EvalReport& report) {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-26s %6s %10s %10s\n", "Category", "N",
                  "Complete", "Weighted");
    out += buf;
    auto row = [&](const std::string& name, const Aggregate& a) {
        std::snprintf(buf, sizeof(buf), "%-26s %6d %10.2f %10.2f\n", name.c_str(),
                      a.count, 100.0 * a.complete_mean, 100.0 * a.weighted_mean);
        out += buf;
    };
    row("Overall", report.overall);
    for (const auto& [cat, a] : report.by_category) row(cat, a);
    if (!report.flagged_ids.empty()) {
        std::snprintf(buf, sizeof(buf), "flagged (judge failures): %zu\n",
                      report.flagged_ids.size());
        out += buf;
    }
    return out;
}

}  // namespace figkit
