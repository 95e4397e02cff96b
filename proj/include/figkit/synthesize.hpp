#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "figkit/lang.hpp"
#include "figkit/realize.hpp"

namespace figkit {

struct SynthesisConfig {
    uint64_t seed = 0;
    // Total relation steps per program, sampled uniformly from this range.
    int steps_min = 1;
    int steps_max = 6;
    // Growth rounds the extension loop re-enters; the sampled step total is
    // split across rounds.
    int iteration_rounds = 3;
    int max_rejects_per_step = 64;
    // When present must cover all 41 relations with a positive sum.
    std::optional<std::map<RelationKind, double>> relation_weights;
    RealizeOptions realize_options;

    // Seed for the realization of program `index` in a batch.
    uint64_t realize_seed(uint64_t index) const;
};

class SynthesisError : public std::runtime_error {
public:
    explicit SynthesisError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ProgramRecord {
    ConstructionProgram program;
    std::string id;
    uint64_t realize_seed = 0;
    int relation_steps = 0;
};

struct SynthesisBatchManifest {
    uint64_t seed = 0;
    int attempts = 0;
    int produced = 0;
    int failed = 0;  // terminal per-program failures
    std::map<std::string, int> rejected_by_reason;
    std::vector<ProgramRecord> programs;
};

// One program: a uniformly drawn base object extended by rejection-sampled
// relation statements; every prefix realizes without degeneracy under the
// program's derived seed. Deterministic in (config, index).
// Throws SynthesisError when some step exhausts max_rejects_per_step.
ConstructionProgram synthesize_one(const SynthesisConfig& config,
                                   uint64_t index = 0,
                                   std::map<std::string, int>* reject_tally = nullptr);

// `count` programs with per-program seeds derived from (config.seed, index).
// Per-program failures are recorded, never thrown. Output order is by index
// regardless of `jobs`.
SynthesisBatchManifest synthesize_batch(const SynthesisConfig& config, int count,
                                        int jobs = 1);

// Appends `steps` additional valid relation statements to an existing
// realizable program, using the same rejection loop. The original statements
// are untouched.
ConstructionProgram grow(const ConstructionProgram& program, int steps,
                         uint64_t seed, const SynthesisConfig& config = {});

}  // namespace figkit
