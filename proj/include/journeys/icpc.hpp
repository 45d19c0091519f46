#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "journeys/concept_vector.hpp"
#include "journeys/error.hpp"
#include "journeys/item.hpp"

namespace journeys {

struct JourneyCluster {
    std::size_t creation_index = 0;
    std::vector<std::string> members;  // history order
    ConceptVector representation;      // sum of member concept vectors
};

// Output of any journey extractor for one user.
struct ExtractionResult {
    std::string user_id;
    std::vector<JourneyCluster> journeys;   // survivors, by creation_index
    std::vector<std::string> pruned_items;  // members of pruned clusters, history order
    std::size_t cold_items = 0;             // items the extractor had no model for
};

struct IcpcConfig {
    static constexpr double kDefaultEpsilon = 0.1;

    double epsilon = kDefaultEpsilon;
    std::size_t min_cluster_size = 1;

    void validate() const {
        if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
            throw InvalidArgument("icpc: epsilon must lie in [0, 1]");
        }
        if (min_cluster_size < 1) throw InvalidArgument("icpc: min_cluster_size must be >= 1");
    }
};

// Similarities closer than this count as tied (rounding noise).
inline constexpr double kTieTolerance = 1e-12;

// Singletons are never journeys, whatever the configured minimum.
inline std::size_t effective_prune_size(std::size_t min_cluster_size) {
    return std::max<std::size_t>(min_cluster_size, 2);
}

inline double item_journey_sim(const Item& item, const JourneyCluster& journey) {
    return cosine(item.concepts, journey.representation);
}

/// The online pass without pruning. Each item joins the most similar
/// existing journey (oldest wins ties) when that similarity reaches
/// `threshold`, otherwise it opens a new journey. Similarity is taken
/// against the representation before the item is added.
///
/// `threshold` is not range-checked, so callers may probe values outside
/// [0, 1]; `extract_journeys` is the validated entry point.
inline std::vector<JourneyCluster> cluster_history(const UserHistory& history, double threshold) {
    if (std::isnan(threshold)) throw InvalidArgument("icpc: threshold is NaN");
    std::vector<JourneyCluster> journeys;
    for (const auto& item : history.items) {
        std::size_t best = journeys.size();
        double best_sim = -1.0;
        for (std::size_t j = 0; j < journeys.size(); ++j) {
            const double sim = item_journey_sim(item, journeys[j]);
            if (sim > best_sim + kTieTolerance) {
                best_sim = sim;
                best = j;
            }
        }
        if (best == journeys.size() || best_sim < threshold) {
            journeys.push_back(JourneyCluster{journeys.size(), {}, {}});
            best = journeys.size() - 1;
        }
        journeys[best].members.push_back(item.id);
        journeys[best].representation.accumulate(item.concepts);
    }
    return journeys;
}

/// Moves clusters below `effective_prune_size(min_cluster_size)` into the
/// pruned list. Pruned ids keep their order in `history`.
inline ExtractionResult prune_journeys(const UserHistory& history,
                                       std::vector<JourneyCluster> journeys,
                                       std::size_t min_cluster_size) {
    const std::size_t keep_from = effective_prune_size(min_cluster_size);
    ExtractionResult result;
    result.user_id = history.user_id;
    std::vector<std::string> dropped;
    for (auto& j : journeys) {
        if (j.members.size() >= keep_from) {
            result.journeys.push_back(std::move(j));
        } else {
            dropped.insert(dropped.end(), j.members.begin(), j.members.end());
        }
    }
    std::sort(result.journeys.begin(), result.journeys.end(),
              [](const JourneyCluster& a, const JourneyCluster& b) {
                  return a.creation_index < b.creation_index;
              });
    if (!dropped.empty()) {
        std::map<std::string, std::size_t> pending;
        for (const auto& id : dropped) ++pending[id];
        for (const auto& item : history.items) {
            auto it = pending.find(item.id);
            if (it != pending.end() && it->second > 0) {
                --it->second;
                result.pruned_items.push_back(item.id);
            }
        }
    }
    return result;
}

/// Infinite-concept personalized clustering of one user's history.
inline ExtractionResult extract_journeys(const UserHistory& history, const IcpcConfig& cfg = {}) {
    cfg.validate();
    return prune_journeys(history, cluster_history(history, cfg.epsilon), cfg.min_cluster_size);
}

}  // namespace journeys
