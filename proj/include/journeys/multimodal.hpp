#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "journeys/error.hpp"
#include "journeys/icpc.hpp"
#include "journeys/item.hpp"
#include "journeys/kmeans.hpp"
#include "journeys/random.hpp"

namespace journeys {

struct MicroCluster {
    std::vector<double> centroid;  // running mean of members
    std::vector<std::string> members;
};

/// Two-level online agglomerative clustering over dense item embeddings.
/// Items join their nearest micro-cluster within `eps_dist`, or open a new
/// one. An item within range of several micro-clusters bumps a conflict
/// counter between its nearest micro-cluster and each other one in range;
/// once a counter reaches `merge_conflicts` the two macro-clusters merge.
class OnlineAgglomerative {
public:
    OnlineAgglomerative(double eps_dist, std::size_t merge_conflicts)
        : eps_dist_(eps_dist), merge_conflicts_(merge_conflicts) {
        if (!(eps_dist > 0.0)) throw InvalidArgument("multimodal: eps_dist must be positive");
        if (merge_conflicts == 0) throw InvalidArgument("multimodal: merge_conflicts must be >= 1");
    }

    /// Items already seen are ignored.
    void observe(const Item& item) {
        if (!item.dense) throw DataError("multimodal: item '" + item.id + "' has no dense embedding");
        const auto& x = *item.dense;
        if (dim_ == 0 && micro_.empty()) dim_ = x.size();
        if (x.size() != dim_) {
            throw DataError("multimodal: item '" + item.id + "' has embedding length " +
                            std::to_string(x.size()) + ", expected " + std::to_string(dim_));
        }
        if (micro_of_.count(item.id) != 0) return;

        const double eps_sq = eps_dist_ * eps_dist_;
        std::vector<std::size_t> in_range;
        std::size_t nearest = micro_.size();
        double nearest_d = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < micro_.size(); ++m) {
            const double d = squared_distance(x, micro_[m].centroid);
            if (d <= eps_sq) {
                in_range.push_back(m);
                if (d < nearest_d) {
                    nearest_d = d;
                    nearest = m;
                }
            }
        }

        if (in_range.empty()) {
            nearest = micro_.size();
            micro_.push_back(MicroCluster{x, {}});
            parent_.push_back(nearest);
        } else {
            auto& mc = micro_[nearest];
            const double n = static_cast<double>(mc.members.size() + 1);
            for (std::size_t d = 0; d < dim_; ++d) mc.centroid[d] += (x[d] - mc.centroid[d]) / n;
            for (std::size_t other : in_range) {
                if (other == nearest) continue;
                const auto key = std::minmax(nearest, other);
                if (++conflicts_[key] >= merge_conflicts_) unite(nearest, other);
            }
        }
        micro_[nearest].members.push_back(item.id);
        micro_of_.emplace(item.id, nearest);
    }

    std::optional<std::size_t> micro_of(const std::string& id) const {
        auto it = micro_of_.find(id);
        if (it == micro_of_.end()) return std::nullopt;
        return it->second;
    }

    /// Macro-cluster label: the smallest micro-cluster id in the macro.
    std::optional<std::size_t> macro_of(const std::string& id) const {
        auto m = micro_of(id);
        if (!m) return std::nullopt;
        return root(*m);
    }

    std::size_t micro_count() const noexcept { return micro_.size(); }
    const std::vector<MicroCluster>& micro_clusters() const noexcept { return micro_; }

    std::size_t macro_count() const {
        std::size_t n = 0;
        for (std::size_t m = 0; m < parent_.size(); ++m) n += root(m) == m ? 1 : 0;
        return n;
    }

    /// One user's journeys: their items grouped by macro-cluster. Unseen
    /// items are cold singletons.
    ExtractionResult extract(const UserHistory& history, std::size_t min_cluster_size) const {
        std::vector<JourneyCluster> groups;
        std::map<std::size_t, std::size_t> slot_of_macro;
        std::size_t cold = 0;
        for (const auto& item : history.items) {
            auto macro = macro_of(item.id);
            std::size_t slot;
            if (!macro) {
                ++cold;
                slot = groups.size();
                groups.push_back(JourneyCluster{groups.size(), {}, {}});
            } else {
                auto [it, inserted] = slot_of_macro.try_emplace(*macro, groups.size());
                if (inserted) groups.push_back(JourneyCluster{groups.size(), {}, {}});
                slot = it->second;
            }
            groups[slot].members.push_back(item.id);
            groups[slot].representation.accumulate(item.concepts);
        }
        auto result = prune_journeys(history, std::move(groups), min_cluster_size);
        result.cold_items = cold;
        return result;
    }

private:
    std::size_t root(std::size_t m) const {
        while (parent_[m] != m) m = parent_[m];
        return m;
    }

    void unite(std::size_t a, std::size_t b) {
        a = root(a);
        b = root(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
    }

    double eps_dist_;
    std::size_t merge_conflicts_;
    std::size_t dim_ = 0;
    std::vector<MicroCluster> micro_;
    std::vector<std::size_t> parent_;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> conflicts_;
    std::unordered_map<std::string, std::size_t> micro_of_;
};

/// Clusters `items` online in the given order and returns the macro-cluster
/// journeys over those same items.
inline ExtractionResult multimodal_extract(const std::vector<Item>& items, double eps_dist,
                                           std::size_t merge_conflicts,
                                           std::size_t min_cluster_size) {
    OnlineAgglomerative model(eps_dist, merge_conflicts);
    for (const auto& item : items) model.observe(item);
    UserHistory all{"", items};
    return model.extract(all, min_cluster_size);
}

/// Median Euclidean distance over `sample_pairs` seeded random pairs of
/// distinct items; every pair is used when there are fewer than that.
inline double median_pairwise_distance(const std::vector<Item>& items,
                                       std::size_t sample_pairs = 1000, std::uint64_t seed = 0) {
    const std::size_t n = items.size();
    if (n < 2) throw InvalidArgument("median_pairwise_distance: need at least two items");
    for (const auto& item : items) {
        if (!item.dense) throw DataError("item '" + item.id + "' has no dense embedding");
    }
    std::vector<double> dists;
    const std::size_t all_pairs = n * (n - 1) / 2;
    if (all_pairs <= sample_pairs) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                dists.push_back(std::sqrt(squared_distance(*items[i].dense, *items[j].dense)));
            }
        }
    } else {
        Rng rng(seed);
        while (dists.size() < sample_pairs) {
            const auto i = static_cast<std::size_t>(uniform_below(rng, n));
            const auto j = static_cast<std::size_t>(uniform_below(rng, n));
            if (i == j) continue;
            dists.push_back(std::sqrt(squared_distance(*items[i].dense, *items[j].dense)));
        }
    }
    std::sort(dists.begin(), dists.end());
    const std::size_t mid = dists.size() / 2;
    return dists.size() % 2 == 1 ? dists[mid] : 0.5 * (dists[mid - 1] + dists[mid]);
}

}  // namespace journeys
