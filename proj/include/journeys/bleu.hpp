#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace journeys {

inline std::vector<std::string> whitespace_tokens(std::string_view text) {
    std::string lowered(text);
    for (auto& ch : lowered) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    std::istringstream in(lowered);
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

namespace detail {

inline std::map<std::vector<std::string>, std::size_t> ngram_counts(
    const std::vector<std::string>& tokens, std::size_t n) {
    std::map<std::vector<std::string>, std::size_t> counts;
    if (tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                          tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
    }
    return counts;
}

}  // namespace detail

/// Sentence BLEU against a single reference, case-insensitive.
///
/// Geometric mean of clipped n-gram precisions for n = 1..min(max_n,
/// |candidate|), with add-one smoothing for n >= 2, times the brevity
/// penalty min(1, exp(1 - |ref| / |cand|)).
inline double bleu(std::string_view candidate, std::string_view reference, std::size_t max_n = 4) {
    const auto cand = whitespace_tokens(candidate);
    const auto ref = whitespace_tokens(reference);
    if (cand.empty() || max_n == 0) return 0.0;

    const std::size_t orders = std::min(max_n, cand.size());
    double log_sum = 0.0;
    for (std::size_t n = 1; n <= orders; ++n) {
        const auto c = detail::ngram_counts(cand, n);
        const auto r = detail::ngram_counts(ref, n);
        std::size_t matched = 0;
        std::size_t total = 0;
        for (const auto& [gram, count] : c) {
            total += count;
            auto it = r.find(gram);
            if (it != r.end()) matched += std::min(count, it->second);
        }
        const double smooth = n >= 2 ? 1.0 : 0.0;
        const double p = (static_cast<double>(matched) + smooth) / (static_cast<double>(total) + smooth);
        if (p <= 0.0) return 0.0;
        log_sum += std::log(p);
    }
    const double ratio = static_cast<double>(ref.size()) / static_cast<double>(cand.size());
    const double bp = std::min(1.0, std::exp(1.0 - ratio));
    return std::clamp(bp * std::exp(log_sum / static_cast<double>(orders)), 0.0, 1.0);
}

}  // namespace journeys
