#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

namespace figkit {

// Lowercase, punctuation stripped, whitespace collapsed.
std::string normalize_text(const std::string& text);

std::vector<std::string> tokenize_words(const std::string& text);

// Word-level 5-gram set after normalization. Texts shorter than five tokens
// contribute their whole token sequence as a single gram.
std::unordered_set<uint64_t> ngram_set(const std::string& text, int n = 5);

// |A intersect B| / |A union B|; both-empty pairs count as identical (1.0).
double jaccard(const std::unordered_set<uint64_t>& a,
               const std::unordered_set<uint64_t>& b);

double jaccard_5gram(const std::string& a, const std::string& b);

}  // namespace figkit
