#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "journeys/error.hpp"
#include "journeys/icpc.hpp"
#include "journeys/item.hpp"
#include "journeys/random.hpp"
#include "journeys/synth.hpp"

namespace journeys {

struct GoldenJourney {
    std::string journey_id;
    std::vector<std::string> item_ids;
};

// One synthetic E2 user: a few golden journeys riffled into one history.
struct GoldenInstance {
    std::string user_id;
    std::vector<GoldenJourney> golden;
    std::vector<std::string> mixed_history;
    std::uint64_t seed = 0;
};

/// Shuffles the playlists with `seed`, deals them `per_user` at a time to
/// synthetic users (leftovers are dropped) and riffles each user's lists.
inline std::vector<GoldenInstance> mix_playlists(const std::vector<Playlist>& playlists,
                                                 std::size_t per_user, std::uint64_t seed) {
    if (per_user < 2) throw InvalidArgument("mix_playlists: per_user must be >= 2");
    if (playlists.size() < per_user) {
        throw InvalidArgument("mix_playlists: need at least " + std::to_string(per_user) +
                              " playlists, got " + std::to_string(playlists.size()));
    }
    Rng rng(seed);
    std::vector<std::size_t> order(playlists.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle(order.begin(), order.end(), rng);

    std::vector<GoldenInstance> out;
    const std::size_t users = playlists.size() / per_user;
    for (std::size_t u = 0; u < users; ++u) {
        GoldenInstance inst;
        inst.user_id = detail::padded("e2u", u, 5);
        inst.seed = seed;
        std::vector<std::vector<std::string>> lists;
        for (std::size_t k = 0; k < per_user; ++k) {
            const auto& p = playlists[order[u * per_user + k]];
            inst.golden.push_back(GoldenJourney{p.playlist_id, p.item_ids});
            lists.push_back(p.item_ids);
        }
        inst.mixed_history = riffle(lists, rng);
        out.push_back(std::move(inst));
    }
    return out;
}

using Cluster = std::vector<std::string>;

inline std::vector<Cluster> clusters_of(const ExtractionResult& r) {
    std::vector<Cluster> out;
    out.reserve(r.journeys.size());
    for (const auto& j : r.journeys) out.push_back(j.members);
    return out;
}

struct JourneyMatch {
    std::vector<std::pair<std::size_t, std::size_t>> clusters;  // (cluster index, overlap)
    std::optional<std::size_t> best;                             // cluster index
    std::size_t best_overlap = 0;
};

struct MatchTable {
    std::vector<JourneyMatch> journeys;                  // aligned with golden
    std::vector<std::optional<std::size_t>> owner;       // golden index per cluster
    std::vector<std::size_t> owner_overlap;              // per cluster
    std::vector<std::size_t> cluster_size;               // per cluster
};

/// Attributes each cluster to the golden journey it overlaps most. Ties go
/// to the larger journey, then to the smaller journey id. Clusters sharing
/// no item with any journey stay unattributed. A journey's best cluster is
/// its attributed cluster with the largest overlap (earliest on ties).
inline MatchTable match_clusters(const std::vector<GoldenJourney>& golden,
                                 const std::vector<Cluster>& clusters) {
    std::vector<std::set<std::string>> sets;
    sets.reserve(golden.size());
    for (const auto& g : golden) sets.emplace_back(g.item_ids.begin(), g.item_ids.end());

    MatchTable t;
    t.journeys.resize(golden.size());
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        std::optional<std::size_t> owner;
        std::size_t owner_overlap = 0;
        for (std::size_t g = 0; g < golden.size(); ++g) {
            std::size_t overlap = 0;
            for (const auto& id : clusters[c]) overlap += sets[g].count(id);
            if (overlap == 0) continue;
            bool better = !owner || overlap > owner_overlap;
            if (owner && overlap == owner_overlap) {
                const auto& cur = golden[*owner];
                const auto& cand = golden[g];
                better = sets[g].size() > sets[*owner].size() ||
                         (sets[g].size() == sets[*owner].size() && cand.journey_id < cur.journey_id);
            }
            if (better) {
                owner = g;
                owner_overlap = overlap;
            }
        }
        t.owner.push_back(owner);
        t.owner_overlap.push_back(owner_overlap);
        t.cluster_size.push_back(clusters[c].size());
        if (owner) {
            auto& m = t.journeys[*owner];
            m.clusters.emplace_back(c, owner_overlap);
            if (!m.best || owner_overlap > m.best_overlap) {
                m.best = c;
                m.best_overlap = owner_overlap;
            }
        }
    }
    return t;
}

/// Mean over golden journeys of |best cluster ∩ journey| / |journey|.
inline double recall(const std::vector<GoldenJourney>& golden, const std::vector<Cluster>& clusters) {
    if (golden.empty()) throw InvalidArgument("recall: empty golden set");
    for (const auto& g : golden) {
        if (g.item_ids.empty()) throw InvalidArgument("recall: golden journey '" + g.journey_id + "' is empty");
    }
    const auto t = match_clusters(golden, clusters);
    double sum = 0.0;
    for (std::size_t g = 0; g < golden.size(); ++g) {
        sum += static_cast<double>(t.journeys[g].best_overlap) /
               static_cast<double>(std::set<std::string>(golden[g].item_ids.begin(), golden[g].item_ids.end()).size());
    }
    return sum / static_cast<double>(golden.size());
}

/// Item-weighted purity: items sharing their cluster's attributed journey
/// over all clustered items. 0 when there are no clusters.
inline double precision(const std::vector<GoldenJourney>& golden, const std::vector<Cluster>& clusters) {
    const auto t = match_clusters(golden, clusters);
    std::size_t correct = 0;
    std::size_t total = 0;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        correct += t.owner_overlap[c];
        total += t.cluster_size[c];
    }
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

/// Mean number of clusters attributed to each golden journey.
inline double clusters_per_journey(const std::vector<GoldenJourney>& golden,
                                   const std::vector<Cluster>& clusters) {
    if (golden.empty()) return 0.0;
    const auto t = match_clusters(golden, clusters);
    std::size_t attributed = 0;
    for (const auto& m : t.journeys) attributed += m.clusters.size();
    return static_cast<double>(attributed) / static_cast<double>(golden.size());
}

struct SizeSummary {
    std::size_t count = 0;
    double min = 0.0;
    double median = 0.0;
    double mean = 0.0;
    double max = 0.0;
};

inline SizeSummary summarize(std::vector<std::size_t> sizes) {
    SizeSummary s;
    s.count = sizes.size();
    if (sizes.empty()) return s;
    std::sort(sizes.begin(), sizes.end());
    const std::size_t mid = sizes.size() / 2;
    s.min = static_cast<double>(sizes.front());
    s.max = static_cast<double>(sizes.back());
    s.median = sizes.size() % 2 == 1 ? static_cast<double>(sizes[mid])
                                     : 0.5 * static_cast<double>(sizes[mid - 1] + sizes[mid]);
    double sum = 0.0;
    for (auto v : sizes) sum += static_cast<double>(v);
    s.mean = sum / static_cast<double>(sizes.size());
    return s;
}

struct GranularityStats {
    std::size_t users = 0;
    std::size_t total_items = 0;
    std::size_t total_journeys = 0;
    double singleton_fraction = 0.0;
    double journeys_per_user = 0.0;
    SizeSummary items_per_journey;
};

/// Granularity of extraction results produced with the default singleton
/// pruning, so every pruned item was a singleton. Journeys are counted at
/// `min_size`; users without items are left out of the singleton average.
inline GranularityStats granularity_stats(const std::vector<ExtractionResult>& results,
                                          std::size_t min_size) {
    if (results.empty()) throw InvalidArgument("granularity_stats: no results");
    const std::size_t keep_from = effective_prune_size(min_size);
    GranularityStats s;
    s.users = results.size();
    double fraction_sum = 0.0;
    std::size_t users_with_items = 0;
    std::vector<std::size_t> sizes;
    for (const auto& r : results) {
        std::size_t items = r.pruned_items.size();
        for (const auto& j : r.journeys) {
            items += j.members.size();
            if (j.members.size() >= keep_from) sizes.push_back(j.members.size());
        }
        s.total_items += items;
        if (items > 0) {
            fraction_sum += static_cast<double>(r.pruned_items.size()) / static_cast<double>(items);
            ++users_with_items;
        }
    }
    s.total_journeys = sizes.size();
    s.singleton_fraction = users_with_items == 0 ? 0.0 : fraction_sum / static_cast<double>(users_with_items);
    s.journeys_per_user = static_cast<double>(s.total_journeys) / static_cast<double>(s.users);
    s.items_per_journey = summarize(std::move(sizes));
    return s;
}

struct EvalReport {
    std::string method;
    std::size_t users = 0;
    std::size_t golden_journeys = 0;
    double mean_recall = 0.0;
    double mean_precision = 0.0;
    std::size_t total_journeys = 0;
    double clusters_per_journey = 0.0;
    double journeys_per_user = 0.0;
    double singleton_fraction = 0.0;
    SizeSummary items_per_journey;
    std::size_t cold_items = 0;
};

using Extractor = std::function<ExtractionResult(const UserHistory&)>;

/// Scores already-extracted results against their instances (aligned by
/// position). Per-user metrics are averaged over users.
inline EvalReport score_e2(std::string method, const std::vector<GoldenInstance>& instances,
                           const std::vector<ExtractionResult>& results) {
    if (instances.empty()) throw InvalidArgument("score_e2: no instances");
    if (instances.size() != results.size()) throw InvalidArgument("score_e2: size mismatch");
    EvalReport r;
    r.method = std::move(method);
    r.users = instances.size();
    double rec = 0.0, prec = 0.0, cpj_attributed = 0.0;
    for (std::size_t u = 0; u < instances.size(); ++u) {
        const auto clusters = clusters_of(results[u]);
        rec += recall(instances[u].golden, clusters);
        prec += precision(instances[u].golden, clusters);
        cpj_attributed += clusters_per_journey(instances[u].golden, clusters) *
                          static_cast<double>(instances[u].golden.size());
        r.golden_journeys += instances[u].golden.size();
        r.cold_items += results[u].cold_items;
    }
    const double n = static_cast<double>(instances.size());
    r.mean_recall = rec / n;
    r.mean_precision = prec / n;
    r.clusters_per_journey = cpj_attributed / static_cast<double>(r.golden_journeys);
    const auto g = granularity_stats(results, 2);
    r.total_journeys = g.total_journeys;
    r.journeys_per_user = g.journeys_per_user;
    r.singleton_fraction = g.singleton_fraction;
    r.items_per_journey = g.items_per_journey;
    return r;
}

inline EvalReport evaluate_e2(std::string method, const std::vector<GoldenInstance>& instances,
                              const ItemCorpus& corpus, const Extractor& extract) {
    std::vector<ExtractionResult> results;
    results.reserve(instances.size());
    for (const auto& inst : instances) {
        results.push_back(extract(corpus.history(inst.user_id, inst.mixed_history)));
    }
    return score_e2(std::move(method), instances, results);
}

}  // namespace journeys
