#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "journeys/error.hpp"
#include "journeys/icpc.hpp"
#include "journeys/naming.hpp"

namespace journeys {

struct CoocConfig {
    std::size_t dim = 16;
    std::size_t k = 50;
    std::size_t iters = 30;
    std::uint64_t seed = 7;
};

struct MultimodalConfig {
    std::optional<double> eps_dist;  // unset: median pairwise distance of a 1,000-pair sample
    std::size_t merge_conflicts = 3;
    std::size_t sample_pairs = 1000;
    std::uint64_t sample_seed = 11;
};

struct NamingConfig {
    std::string endpoint;
    PromptKind kind = PromptKind::natural_titles;
    std::optional<std::size_t> max_items;
    std::string exemplars;  // JSONL path, optional
    int timeout_seconds = 30;
};

// Run configuration. Every field has a default; JSON files may set any
// subset, and unknown keys are rejected.
struct Config {
    double epsilon = IcpcConfig::kDefaultEpsilon;
    std::size_t min_cluster_size = 1;
    CoocConfig cooc;
    MultimodalConfig multimodal;
    NamingConfig naming;
    std::size_t parallelism = 1;

    IcpcConfig icpc() const { return IcpcConfig{epsilon, min_cluster_size}; }
};

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known,
                           const std::string& where) {
    if (!j.is_object()) throw DataError("config: '" + where + "' must be an object");
    for (const auto& [key, v] : j.items()) {
        if (known.count(key) == 0) throw DataError("config: unknown key '" + where + key + "'");
    }
}

}  // namespace detail

inline Config config_from_json(const nlohmann::json& j) {
    detail::reject_unknown(j, {"epsilon", "min_cluster_size", "cooc", "multimodal", "naming", "parallelism"}, "");
    Config c;
    try {
        c.epsilon = j.value("epsilon", c.epsilon);
        c.min_cluster_size = j.value("min_cluster_size", c.min_cluster_size);
        c.parallelism = j.value("parallelism", c.parallelism);
        if (j.contains("cooc")) {
            const auto& s = j.at("cooc");
            detail::reject_unknown(s, {"dim", "K", "iters", "seed"}, "cooc.");
            c.cooc.dim = s.value("dim", c.cooc.dim);
            c.cooc.k = s.value("K", c.cooc.k);
            c.cooc.iters = s.value("iters", c.cooc.iters);
            c.cooc.seed = s.value("seed", c.cooc.seed);
        }
        if (j.contains("multimodal")) {
            const auto& s = j.at("multimodal");
            detail::reject_unknown(s, {"eps_dist", "merge_conflicts", "sample_pairs", "sample_seed"},
                                   "multimodal.");
            if (s.contains("eps_dist") && !s.at("eps_dist").is_null()) {
                c.multimodal.eps_dist = s.at("eps_dist").get<double>();
            }
            c.multimodal.merge_conflicts = s.value("merge_conflicts", c.multimodal.merge_conflicts);
            c.multimodal.sample_pairs = s.value("sample_pairs", c.multimodal.sample_pairs);
            c.multimodal.sample_seed = s.value("sample_seed", c.multimodal.sample_seed);
        }
        if (j.contains("naming")) {
            const auto& s = j.at("naming");
            detail::reject_unknown(s, {"endpoint", "template", "max_items", "exemplars", "timeout_seconds"},
                                   "naming.");
            c.naming.endpoint = s.value("endpoint", c.naming.endpoint);
            if (s.contains("template")) c.naming.kind = parse_prompt_kind(s.at("template").get<std::string>());
            if (s.contains("max_items") && !s.at("max_items").is_null()) {
                c.naming.max_items = s.at("max_items").get<std::size_t>();
            }
            c.naming.exemplars = s.value("exemplars", c.naming.exemplars);
            c.naming.timeout_seconds = s.value("timeout_seconds", c.naming.timeout_seconds);
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("config: ") + e.what());
    }
    return c;
}

}  // namespace journeys
