#pragma once

#include <string>
#include <utility>
#include <vector>

#include "journeys/item.hpp"

namespace journeys::testing {

inline Item make_item(std::string id, ConceptVector concepts, std::string title = {}) {
    Item item;
    item.id = std::move(id);
    item.title = title.empty() ? item.id : std::move(title);
    item.concepts = std::move(concepts);
    return item;
}

inline Item dense_item(std::string id, std::vector<double> dense) {
    Item item;
    item.id = std::move(id);
    item.title = item.id;
    item.dense = std::move(dense);
    return item;
}

inline UserHistory make_history(std::string user, std::vector<Item> items) {
    return UserHistory{std::move(user), std::move(items)};
}

}  // namespace journeys::testing
