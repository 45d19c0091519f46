#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "journeys/cooccurrence.hpp"
#include "journeys/error.hpp"
#include "journeys/factorize.hpp"
#include "journeys/random.hpp"

namespace journeys {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

struct KMeansResult {
    GlobalAssignment assignment;
    std::vector<std::vector<double>> centroids;
    std::vector<std::size_t> labels;  // row-aligned with the input table
    std::vector<double> objective;    // sum of squared distances after each assignment step
};

namespace detail {

inline std::size_t nearest_centroid(std::span<const double> point,
                                    const std::vector<std::vector<double>>& centroids,
                                    double* dist_out = nullptr) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = squared_distance(point, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    if (dist_out != nullptr) *dist_out = best_d;
    return best;
}

// k-means++ seeding; when every remaining point coincides with a chosen
// center the lowest unchosen index is taken.
inline std::vector<std::vector<double>> seed_centroids(const EmbeddingTable& table, std::size_t k,
                                                       Rng& rng) {
    const std::size_t n = table.vectors.size();
    std::vector<bool> chosen(n, false);
    std::vector<std::vector<double>> centroids;
    centroids.reserve(k);

    const auto first = static_cast<std::size_t>(uniform_below(rng, n));
    chosen[first] = true;
    centroids.push_back(table.vectors[first]);

    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(table.vectors[i], centroids[0]);

    while (centroids.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!chosen[i]) total += d2[i];
        }
        std::size_t next = n;
        if (total > 0.0) {
            double target = uniform01(rng) * total;
            for (std::size_t i = 0; i < n; ++i) {
                if (chosen[i] || d2[i] <= 0.0) continue;
                next = i;
                target -= d2[i];
                if (target < 0.0) break;
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                if (!chosen[i]) {
                    next = i;
                    break;
                }
            }
        }
        chosen[next] = true;
        centroids.push_back(table.vectors[next]);
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], squared_distance(table.vectors[i], centroids.back()));
        }
    }
    return centroids;
}

}  // namespace detail

/// Lloyd's algorithm from k-means++ seeds. Stops when assignments stop
/// changing or after `max_iters` rounds. Equidistant points go to the
/// lower cluster id; empty clusters keep their previous centroid.
inline KMeansResult kmeans(const EmbeddingTable& table, std::size_t k, std::size_t max_iters,
                           std::uint64_t seed) {
    const std::size_t n = table.vectors.size();
    if (k == 0) throw InvalidArgument("kmeans: K must be >= 1");
    if (k > n) {
        throw InvalidArgument("kmeans: K " + std::to_string(k) + " exceeds point count " +
                              std::to_string(n));
    }
    if (max_iters == 0) throw InvalidArgument("kmeans: max_iters must be >= 1");
    const std::size_t dim = table.dim();
    for (const auto& v : table.vectors) {
        if (v.size() != dim) throw InvalidArgument("kmeans: mixed embedding lengths");
    }

    Rng rng(seed);
    KMeansResult out;
    out.centroids = detail::seed_centroids(table, k, rng);
    out.labels.assign(n, k);

    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        double objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = 0.0;
            const std::size_t c = detail::nearest_centroid(table.vectors[i], out.centroids, &d);
            objective += d;
            if (c != out.labels[i]) {
                out.labels[i] = c;
                changed = true;
            }
        }
        out.objective.push_back(objective);
        if (!changed) break;

        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = out.labels[i];
            ++counts[c];
            for (std::size_t d = 0; d < dim; ++d) sums[c][d] += table.vectors[i][d];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            for (std::size_t d = 0; d < dim; ++d) {
                out.centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
            }
        }
    }

    out.assignment.k = k;
    out.assignment.centroid_dim = dim;
    for (std::size_t i = 0; i < n; ++i) out.assignment.assignment[table.ids[i]] = out.labels[i];
    return out;
}

}  // namespace journeys
