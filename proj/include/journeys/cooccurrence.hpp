#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "journeys/concept_vector.hpp"
#include "journeys/icpc.hpp"
#include "journeys/item.hpp"

namespace journeys {

/// Symmetric item-item count matrix over consecutive interactions.
/// Rows are indexed by first appearance of the item id.
class CoocMatrix {
public:
    std::size_t index_of(const std::string& id) {
        auto [it, inserted] = index_.try_emplace(id, ids_.size());
        if (inserted) {
            ids_.push_back(id);
            rows_.emplace_back();
        }
        return it->second;
    }

    std::optional<std::size_t> find(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    void add_pair(std::size_t i, std::size_t j, std::uint64_t n = 1) {
        if (i == j) return;
        rows_[i][j] += n;
        rows_[j][i] += n;
    }

    std::uint64_t count(std::size_t i, std::size_t j) const {
        const auto& row = rows_.at(i);
        auto it = row.find(j);
        return it == row.end() ? 0 : it->second;
    }

    std::uint64_t count(const std::string& a, const std::string& b) const {
        auto i = find(a);
        auto j = find(b);
        if (!i || !j) return 0;
        return count(*i, *j);
    }

    std::size_t size() const noexcept { return ids_.size(); }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    const std::map<std::size_t, std::uint64_t>& row(std::size_t i) const { return rows_.at(i); }

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::map<std::size_t, std::uint64_t>> rows_;
};

/// Counts each consecutive pair of distinct items once in both directions.
/// Every id that appears gets a row, even without pairs.
inline CoocMatrix build_cooccurrence(const std::vector<std::vector<std::string>>& histories) {
    CoocMatrix m;
    for (const auto& h : histories) {
        for (std::size_t t = 0; t < h.size(); ++t) {
            const std::size_t cur = m.index_of(h[t]);
            if (t > 0) m.add_pair(m.index_of(h[t - 1]), cur);
        }
    }
    return m;
}

inline CoocMatrix build_cooccurrence(const std::vector<UserHistory>& histories) {
    std::vector<std::vector<std::string>> ids;
    ids.reserve(histories.size());
    for (const auto& h : histories) {
        std::vector<std::string> row;
        row.reserve(h.items.size());
        for (const auto& item : h.items) row.push_back(item.id);
        ids.push_back(std::move(row));
    }
    return build_cooccurrence(ids);
}

// Item id -> global cluster id.
struct GlobalAssignment {
    std::size_t k = 0;
    std::size_t centroid_dim = 0;
    std::map<std::string, std::size_t> assignment;
};

/// Splits one user's items by global cluster; every cluster present becomes
/// a journey. Items missing from `g` become singleton groups and are
/// counted in `cold_items`.
inline ExtractionResult cooc_extract(const UserHistory& history, const GlobalAssignment& g,
                                     std::size_t min_cluster_size) {
    std::vector<JourneyCluster> groups;
    std::map<std::size_t, std::size_t> group_of_cluster;
    std::size_t cold = 0;
    for (const auto& item : history.items) {
        auto it = g.assignment.find(item.id);
        std::size_t slot;
        if (it == g.assignment.end()) {
            ++cold;
            slot = groups.size();
            groups.push_back(JourneyCluster{groups.size(), {}, {}});
        } else {
            auto [git, inserted] = group_of_cluster.try_emplace(it->second, groups.size());
            if (inserted) groups.push_back(JourneyCluster{groups.size(), {}, {}});
            slot = git->second;
        }
        groups[slot].members.push_back(item.id);
        groups[slot].representation.accumulate(item.concepts);
    }
    auto result = prune_journeys(history, std::move(groups), min_cluster_size);
    result.cold_items = cold;
    return result;
}

}  // namespace journeys
