#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "journeys/config.hpp"
#include "journeys/cooccurrence.hpp"
#include "journeys/error.hpp"
#include "journeys/eval.hpp"
#include "journeys/factorize.hpp"
#include "journeys/icpc.hpp"
#include "journeys/item.hpp"
#include "journeys/kmeans.hpp"
#include "journeys/multimodal.hpp"
#include "journeys/synth.hpp"

namespace journeys {

enum class Method { icpc, cooc, multimodal };

inline Method parse_method(const std::string& s) {
    if (s == "icpc") return Method::icpc;
    if (s == "cooc") return Method::cooc;
    if (s == "multimodal") return Method::multimodal;
    throw InvalidArgument("unknown method '" + s + "' (expected icpc, cooc or multimodal)");
}

inline std::string to_string(Method m) {
    switch (m) {
        case Method::icpc: return "icpc";
        case Method::cooc: return "cooc";
        case Method::multimodal: return "multimodal";
    }
    return "unknown";
}

inline constexpr std::size_t kKMeansMaxIters = 100;

/// Co-occurrence topic clusters: count matrix, factorization, k-means.
inline GlobalAssignment train_cooc(const std::vector<std::vector<std::string>>& histories,
                                   const CoocConfig& cfg) {
    const auto m = build_cooccurrence(histories);
    const auto emb = factorize(m, cfg.dim, cfg.iters, cfg.seed);
    return kmeans(emb, cfg.k, kKMeansMaxIters, cfg.seed).assignment;
}

inline GlobalAssignment train_cooc(const std::vector<HistoryRecord>& histories, const CoocConfig& cfg) {
    std::vector<std::vector<std::string>> ids;
    ids.reserve(histories.size());
    for (const auto& h : histories) ids.push_back(h.item_ids);
    return train_cooc(ids, cfg);
}

/// Fits the multimodal clusterer over `items` in order. Without an explicit
/// eps_dist the median pairwise distance of a seeded pair sample is used.
inline OnlineAgglomerative fit_multimodal(const std::vector<Item>& items, const MultimodalConfig& cfg) {
    for (const auto& item : items) {
        if (!item.dense) {
            throw DataError("multimodal: item '" + item.id + "' has no dense embedding");
        }
    }
    const double eps = cfg.eps_dist ? *cfg.eps_dist
                                    : median_pairwise_distance(items, cfg.sample_pairs, cfg.sample_seed);
    OnlineAgglomerative model(eps, cfg.merge_conflicts);
    for (const auto& item : items) model.observe(item);
    return model;
}

/// Applies `fn` to every index in [0, n) on up to `workers` threads.
/// Results keep index order.
template <class Fn>
auto parallel_map(std::size_t n, std::size_t workers, Fn fn) {
    using R = decltype(fn(std::size_t{0}));
    std::vector<std::optional<R>> slots(n);
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) slots[i].emplace(fn(i));
    } else {
        std::vector<std::exception_ptr> failures(workers);
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < n; i += workers) slots[i].emplace(fn(i));
                } catch (...) {
                    failures[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& f : failures) {
            if (f) std::rethrow_exception(f);
        }
    }
    std::vector<R> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace journeys
