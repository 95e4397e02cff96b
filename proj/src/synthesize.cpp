#include "figkit/synthesize.hpp"

#include <atomic>
#include <thread>

#include "figkit/rng.hpp"

namespace figkit {

namespace {

constexpr uint64_t kRealizeTag = 0x7265616c697a65ULL;  // stream separator tags
constexpr uint64_t kStepsTag = 0x7374657073ULL;
constexpr uint64_t kBaseTag = 0x62617365ULL;
constexpr uint64_t kGrowTag = 0x67726f77ULL;

const double kAngleMenu[] = {20, 30, 40, 45, 50, 60, 70, 75, 80,
                             90, 100, 110, 120, 135, 150, 160};

std::vector<double> build_weights(const SynthesisConfig& config) {
    std::vector<double> w(kRelationCount, 1.0);
    if (config.relation_weights) {
        if (static_cast<int>(config.relation_weights->size()) != kRelationCount) {
            throw SynthesisError("relation_weights must cover all 41 relations");
        }
        double sum = 0;
        for (const auto& [kind, weight] : *config.relation_weights) {
            if (weight < 0) throw SynthesisError("negative relation weight");
            w[static_cast<size_t>(kind)] = weight;
            sum += weight;
        }
        if (sum <= 0) throw SynthesisError("relation weights sum to zero");
    }
    return w;
}

// Weighted draw over relations whose input arity fits the bound point count.
std::optional<RelationKind> pick_relation(const std::vector<double>& weights,
                                          int bound_points, Rng& rng) {
    double total = 0;
    for (const auto& info : relation_table()) {
        if (info.input_arity <= bound_points) {
            total += weights[static_cast<size_t>(info.kind)];
        }
    }
    if (total <= 0) return std::nullopt;
    double ticket = rng.uniform() * total;
    for (const auto& info : relation_table()) {
        if (info.input_arity > bound_points) continue;
        ticket -= weights[static_cast<size_t>(info.kind)];
        if (ticket <= 0) return info.kind;
    }
    return relation_table().back().kind;
}

Statement propose_statement(const std::vector<double>& weights,
                            const std::vector<std::string>& bound, Rng& rng) {
    auto kind = pick_relation(weights, static_cast<int>(bound.size()), rng);
    if (!kind) throw SynthesisError("no relation is feasible under the weights");
    const auto& info = relation_info(*kind);

    Statement st;
    st.relation = *kind;
    // Inputs: ordered sample without replacement.
    std::vector<std::string> pool = bound;
    for (int i = 0; i < info.input_arity; ++i) {
        size_t j = static_cast<size_t>(rng.below(pool.size()));
        st.args.push_back(pool[j]);
        pool.erase(pool.begin() + j);
    }
    if (info.takes_literal) {
        st.literal = kAngleMenu[rng.below(std::size(kAngleMenu))];
    }
    std::vector<std::string> taken = bound;
    for (int i = 0; i < info.new_points; ++i) {
        st.introduced.push_back(fresh_point_name(taken));
        taken.push_back(st.introduced.back());
    }
    return st;
}

std::string first_reason(const DegeneracyReport& report) {
    if (report.reasons.empty()) return "Unknown";
    return std::string(to_string(report.reasons[0].reason));
}

void tally(std::map<std::string, int>* tallies, const std::string& reason) {
    if (tallies) ++(*tallies)[reason];
}

// Appends `steps` accepted statements to `program`, restarting the proposal
// loop with fresh streams per (round, step, attempt).
void extend(ConstructionProgram& program, int steps, int round,
            uint64_t stream_seed, uint64_t realize_seed,
            const SynthesisConfig& config,
            std::map<std::string, int>* reject_tally) {
    auto weights = build_weights(config);
    for (int step = 0; step < steps; ++step) {
        bool accepted = false;
        for (int attempt = 0; attempt < config.max_rejects_per_step; ++attempt) {
            Rng rng(hash_combine({stream_seed, static_cast<uint64_t>(round),
                                  static_cast<uint64_t>(program.statements.size()),
                                  static_cast<uint64_t>(attempt)}));
            Statement candidate;
            try {
                candidate = propose_statement(weights, program.point_names(), rng);
            } catch (const SynthesisError&) {
                throw;
            }
            program.statements.push_back(candidate);
            bool keep = false;
            try {
                auto fig = realize(program, realize_seed, config.realize_options);
                auto report = check_degeneracy(fig, program, config.realize_options);
                if (report.valid()) {
                    keep = true;
                } else {
                    tally(reject_tally, first_reason(report));
                }
            } catch (const RealizeError&) {
                tally(reject_tally, std::string(to_string(DegeneracyReason::solver_diverged)));
            }
            if (keep) {
                accepted = true;
                break;
            }
            program.statements.pop_back();
        }
        if (!accepted) {
            throw SynthesisError("exhausted rejects at step " +
                                 std::to_string(program.statements.size()));
        }
    }
}

}  // namespace

uint64_t SynthesisConfig::realize_seed(uint64_t index) const {
    return hash_combine({seed, index, kRealizeTag});
}

ConstructionProgram synthesize_one(const SynthesisConfig& config, uint64_t index,
                                   std::map<std::string, int>* reject_tally) {
    if (config.steps_min < 0 || config.steps_max < config.steps_min) {
        throw SynthesisError("invalid step range");
    }
    if (config.iteration_rounds < 1) {
        throw SynthesisError("iteration_rounds must be >= 1");
    }

    Rng steps_rng(hash_combine({config.seed, index, kStepsTag}));
    int total_steps =
        config.steps_min +
        static_cast<int>(steps_rng.below(
            static_cast<uint64_t>(config.steps_max - config.steps_min) + 1));

    Rng base_rng(hash_combine({config.seed, index, kBaseTag}));
    PrimitiveKind base =
        primitive_table()[base_rng.below(kPrimitiveCount)].kind;

    ConstructionProgram program;
    Statement st;
    st.primitive = base;
    std::vector<std::string> taken;
    for (int i = 0; i < primitive_info(base).arity; ++i) {
        st.introduced.push_back(fresh_point_name(taken));
        taken.push_back(st.introduced.back());
    }
    program.statements.push_back(st);

    const uint64_t realize_seed = config.realize_seed(index);
    // The base object must realize cleanly before any extension.
    {
        auto fig = realize(program, realize_seed, config.realize_options);
        auto report = check_degeneracy(fig, program, config.realize_options);
        if (!report.valid()) {
            tally(reject_tally, first_reason(report));
            throw SynthesisError("base object is degenerate");
        }
    }

    uint64_t stream_seed = hash_combine({config.seed, index});
    int rounds = config.iteration_rounds;
    for (int round = 0; round < rounds; ++round) {
        int share = total_steps / rounds + (round < total_steps % rounds ? 1 : 0);
        extend(program, share, round, stream_seed, realize_seed, config,
               reject_tally);
    }
    return program;
}

SynthesisBatchManifest synthesize_batch(const SynthesisConfig& config, int count,
                                        int jobs) {
    SynthesisBatchManifest manifest;
    manifest.seed = config.seed;
    manifest.attempts = count;

    struct Slot {
        bool ok = false;
        ProgramRecord record;
        std::map<std::string, int> rejects;
    };
    std::vector<Slot> slots(static_cast<size_t>(count));

    auto work = [&](int index) {
        Slot& slot = slots[static_cast<size_t>(index)];
        try {
            auto program = synthesize_one(config, static_cast<uint64_t>(index),
                                          &slot.rejects);
            slot.record.id = program.id();
            slot.record.realize_seed =
                config.realize_seed(static_cast<uint64_t>(index));
            slot.record.relation_steps =
                static_cast<int>(program.statements.size()) - 1;
            slot.record.program = std::move(program);
            slot.ok = true;
        } catch (const std::exception&) {
            slot.ok = false;
        }
    };

    if (jobs <= 1) {
        for (int i = 0; i < count; ++i) work(i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) {
            pool.emplace_back([&] {
                for (;;) {
                    int i = next.fetch_add(1);
                    if (i >= count) return;
                    work(i);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    for (auto& slot : slots) {
        for (const auto& [reason, n] : slot.rejects) {
            manifest.rejected_by_reason[reason] += n;
        }
        if (slot.ok) {
            ++manifest.produced;
            manifest.programs.push_back(std::move(slot.record));
        } else {
            ++manifest.failed;
        }
    }
    return manifest;
}

ConstructionProgram grow(const ConstructionProgram& program, int steps,
                         uint64_t seed, const SynthesisConfig& config) {
    if (steps < 0) throw SynthesisError("steps must be >= 0");
    ConstructionProgram grown = program;
    if (steps == 0) return grown;

    uint64_t realize_seed = hash_combine({seed, kGrowTag, kRealizeTag});
    {
        auto fig = realize(grown, realize_seed, config.realize_options);
        auto report = check_degeneracy(fig, grown, config.realize_options);
        if (!report.valid()) {
            throw SynthesisError("program is degenerate under the grow seed");
        }
    }
    extend(grown, steps, 0, hash_combine({seed, kGrowTag}), realize_seed, config,
           nullptr);
    return grown;
}

}  // namespace figkit
