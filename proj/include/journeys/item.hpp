#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "journeys/concept_vector.hpp"
#include "journeys/error.hpp"

namespace journeys {

// One interaction unit.
struct Item {
    std::string id;
    std::string title;
    std::int64_t timestamp = 0;
    ConceptVector concepts;
    std::optional<std::vector<double>> dense;
};

// Time-ordered items of one user. Callers sort; ties keep input order.
struct UserHistory {
    std::string user_id;
    std::vector<Item> items;
};

/// Item store keyed by id. Enforces unique ids and one dense length
/// corpus-wide.
class ItemCorpus {
public:
    ItemCorpus() = default;

    explicit ItemCorpus(std::vector<Item> items) {
        for (auto& item : items) add(std::move(item));
    }

    void add(Item item) {
        if (item.id.empty()) throw DataError("item with empty id");
        if (index_.count(item.id) != 0) throw DataError("duplicate item id '" + item.id + "'");
        if (item.dense) {
            if (dense_dim_ && *dense_dim_ != item.dense->size()) {
                throw DataError("item '" + item.id + "' has dense length " +
                                std::to_string(item.dense->size()) + ", corpus uses " +
                                std::to_string(*dense_dim_));
            }
            dense_dim_ = item.dense->size();
        }
        index_.emplace(item.id, items_.size());
        items_.push_back(std::move(item));
    }

    const Item* find(const std::string& id) const {
        auto it = index_.find(id);
        return it == index_.end() ? nullptr : &items_[it->second];
    }

    const Item& at(const std::string& id) const {
        const Item* item = find(id);
        if (item == nullptr) throw DataError("unknown item id '" + id + "'");
        return *item;
    }

    /// Resolves ids into a history, in the given order.
    UserHistory history(std::string user_id, const std::vector<std::string>& ids) const {
        UserHistory h{std::move(user_id), {}};
        h.items.reserve(ids.size());
        for (const auto& id : ids) h.items.push_back(at(id));
        return h;
    }

    bool all_dense() const {
        if (items_.empty()) return false;
        for (const auto& item : items_) {
            if (!item.dense) return false;
        }
        return true;
    }

    std::optional<std::size_t> dense_dim() const { return dense_dim_; }
    const std::vector<Item>& items() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }

private:
    std::vector<Item> items_;
    std::unordered_map<std::string, std::size_t> index_;
    std::optional<std::size_t> dense_dim_;
};

}  // namespace journeys
