#include "figkit/textsim.hpp"

namespace figkit {

namespace {

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

bool is_word_char(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80;
}

}  // namespace

std::string normalize_text(const std::string& text) {
    std::string out;
    bool pending_space = false;
    for (unsigned char c : text) {
        if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
        if (is_word_char(c)) {
            if (pending_space && !out.empty()) out += ' ';
            pending_space = false;
            out += static_cast<char>(c);
        } else {
            pending_space = true;
        }
    }
    return out;
}

std::vector<std::string> tokenize_words(const std::string& text) {
    std::vector<std::string> words;
    std::string norm = normalize_text(text);
    size_t i = 0;
    while (i < norm.size()) {
        size_t j = norm.find(' ', i);
        if (j == std::string::npos) j = norm.size();
        if (j > i) words.push_back(norm.substr(i, j - i));
        i = j + 1;
    }
    return words;
}

std::unordered_set<uint64_t> ngram_set(const std::string& text, int n) {
    std::unordered_set<uint64_t> grams;
    auto words = tokenize_words(text);
    if (words.empty()) return grams;
    if (static_cast<int>(words.size()) < n) {
        std::string whole;
        for (const auto& w : words) {
            if (!whole.empty()) whole += ' ';
            whole += w;
        }
        grams.insert(fnv1a(whole));
        return grams;
    }
    for (size_t i = 0; i + n <= words.size(); ++i) {
        std::string gram;
        for (int k = 0; k < n; ++k) {
            if (k) gram += ' ';
            gram += words[i + k];
        }
        grams.insert(fnv1a(gram));
    }
    return grams;
}

double jaccard(const std::unordered_set<uint64_t>& a,
               const std::unordered_set<uint64_t>& b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& big = a.size() <= b.size() ? b : a;
    size_t inter = 0;
    for (uint64_t g : small) {
        if (big.count(g)) ++inter;
    }
    size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double jaccard_5gram(const std::string& a, const std::string& b) {
    return jaccard(ngram_set(a), ngram_set(b));
}

}  // namespace figkit
