#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "journeys/concept_vector.hpp"
#include "journeys/error.hpp"

namespace journeys {

// Lowercases ASCII, splits on runs of non-alphanumeric bytes and drops
// tokens shorter than two bytes. Bytes >= 0x80 count as word characters so
// UTF-8 words stay intact.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.size() >= 2) tokens.push_back(current);
        current.clear();
    };
    for (char ch : text) {
        const auto byte = static_cast<unsigned char>(ch);
        if (byte >= 0x80 || std::isalnum(byte)) {
            current.push_back(static_cast<char>(std::tolower(byte)));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

/// Salience fallback: unigram + bigram TF-IDF with smoothed idf
/// ln(1 + N/df), max-normalized per document into (0, 1].
inline std::map<std::string, ConceptVector> tfidf_extract(
    const std::vector<std::pair<std::string, std::string>>& corpus) {
    if (corpus.empty()) throw InvalidArgument("tfidf_extract: empty corpus");

    std::vector<std::map<std::string, int>> counts;
    counts.reserve(corpus.size());
    std::map<std::string, int> doc_freq;
    for (const auto& [id, text] : corpus) {
        const auto tokens = tokenize(text);
        std::map<std::string, int> tf;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            ++tf[tokens[i]];
            if (i + 1 < tokens.size()) ++tf[tokens[i] + " " + tokens[i + 1]];
        }
        for (const auto& [term, c] : tf) ++doc_freq[term];
        counts.push_back(std::move(tf));
    }

    const double n_docs = static_cast<double>(corpus.size());
    std::map<std::string, ConceptVector> out;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        ConceptVector::Map weights;
        double max_w = 0.0;
        for (const auto& [term, c] : counts[d]) {
            const double w = c * std::log(1.0 + n_docs / doc_freq[term]);
            weights.emplace(term, w);
            max_w = std::max(max_w, w);
        }
        if (max_w > 0.0) {
            for (auto& [term, w] : weights) w /= max_w;
        }
        out.insert_or_assign(corpus[d].first, ConceptVector(std::move(weights)));
    }
    return out;
}

}  // namespace journeys
