#pragma once

#include <string>

#include "figkit/lang.hpp"

namespace figkit {

// Deterministic English sentence for one statement, uppercase point labels.
std::string caption_for(const Statement& statement);

// Captions of statements 0..upto joined with single spaces; describes the
// whole figure at that step.
std::string cumulative_caption(const ConstructionProgram& program, int upto);

}  // namespace figkit
