#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "journeys/error.hpp"

namespace journeys {

/// Sparse vector over salient terms. Each distinct term is one dimension of
/// an unbounded space; weights are salience scores.
///
/// Stored canonically: weights are finite and non-negative, entries below
/// `kDropBelow` are not kept, and iteration is in ascending term order.
class ConceptVector {
public:
    using Map = std::map<std::string, double>;
    using const_iterator = Map::const_iterator;

    static constexpr double kDropBelow = 1e-12;

    ConceptVector() = default;

    ConceptVector(std::initializer_list<std::pair<const std::string, double>> entries)
        : ConceptVector(Map(entries)) {}

    explicit ConceptVector(Map entries) : terms_(std::move(entries)) {
        for (auto it = terms_.begin(); it != terms_.end();) {
            check_weight(it->first, it->second);
            if (it->second < kDropBelow) {
                it = terms_.erase(it);
            } else {
                ++it;
            }
        }
        recompute_norm();
    }

    bool empty() const noexcept { return terms_.empty(); }
    std::size_t size() const noexcept { return terms_.size(); }
    const_iterator begin() const noexcept { return terms_.begin(); }
    const_iterator end() const noexcept { return terms_.end(); }
    const Map& entries() const noexcept { return terms_; }

    double weight(const std::string& term) const {
        auto it = terms_.find(term);
        return it == terms_.end() ? 0.0 : it->second;
    }

    bool contains(const std::string& term) const { return terms_.count(term) != 0; }

    double squared_norm() const noexcept { return norm_sq_; }
    double norm() const noexcept { return std::sqrt(norm_sq_); }

    /// Largest single weight, 0 for the empty vector.
    double max_weight() const noexcept {
        double m = 0.0;
        for (const auto& [term, w] : terms_) m = std::max(m, w);
        return m;
    }

    double dot(const ConceptVector& other) const noexcept {
        const ConceptVector* small = this;
        const ConceptVector* large = &other;
        if (small->size() > large->size()) std::swap(small, large);
        double acc = 0.0;
        for (const auto& [term, w] : small->terms_) {
            auto it = large->terms_.find(term);
            if (it != large->terms_.end()) acc += w * it->second;
        }
        return acc;
    }

    /// In-place element-wise sum. Used while a single clustering run owns
    /// the vector.
    ConceptVector& accumulate(const ConceptVector& other) {
        for (const auto& [term, w] : other.terms_) {
            auto [it, inserted] = terms_.try_emplace(term, 0.0);
            it->second += w;
        }
        recompute_norm();
        return *this;
    }

    ConceptVector scaled(double factor) const {
        if (!std::isfinite(factor) || factor < 0.0) {
            throw InvalidVector("scale factor must be finite and non-negative");
        }
        Map out;
        for (const auto& [term, w] : terms_) out.emplace(term, w * factor);
        return ConceptVector(std::move(out));
    }

    friend bool operator==(const ConceptVector& a, const ConceptVector& b) {
        return a.terms_ == b.terms_;
    }

private:
    static void check_weight(const std::string& term, double w) {
        if (term.empty()) throw InvalidVector("empty term in concept vector");
        if (!std::isfinite(w)) throw InvalidVector("non-finite weight for term '" + term + "'");
        if (w < 0.0) throw InvalidVector("negative weight for term '" + term + "'");
    }

    void recompute_norm() noexcept {
        norm_sq_ = 0.0;
        for (const auto& [term, w] : terms_) norm_sq_ += w * w;
    }

    Map terms_;
    double norm_sq_ = 0.0;
};

/// Cosine similarity of two concept vectors; 0 when either has zero norm.
inline double cosine(const ConceptVector& a, const ConceptVector& b) {
    const double denom = a.norm() * b.norm();
    if (denom <= 0.0) return 0.0;
    const double sim = a.dot(b) / denom;
    return std::clamp(sim, 0.0, 1.0);
}

/// Element-wise sum of the inputs.
inline ConceptVector aggregate(std::span<const ConceptVector> vectors) {
    ConceptVector::Map sum;
    for (const auto& v : vectors) {
        for (const auto& [term, w] : v) sum[term] += w;
    }
    return ConceptVector(std::move(sum));
}

inline ConceptVector aggregate(std::initializer_list<ConceptVector> vectors) {
    return aggregate(std::span<const ConceptVector>(vectors.begin(), vectors.size()));
}

using WeightedTerm = std::pair<std::string, double>;

/// The `k` heaviest terms, descending by weight; equal weights come out in
/// term order.
inline std::vector<WeightedTerm> top_terms(const ConceptVector& v, std::size_t k) {
    if (k == 0) throw InvalidArgument("top_terms: k must be at least 1");
    std::vector<WeightedTerm> all(v.begin(), v.end());
    const auto by_weight = [](const WeightedTerm& a, const WeightedTerm& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    };
    const std::size_t n = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), by_weight);
    all.resize(n);
    return all;
}

}  // namespace journeys
