#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "journeys/cooccurrence.hpp"
#include "journeys/error.hpp"
#include "journeys/eval.hpp"
#include "journeys/icpc.hpp"
#include "journeys/item.hpp"
#include "journeys/naming.hpp"
#include "journeys/synth.hpp"

namespace journeys::io {

using json = nlohmann::json;

/// Calls `fn(record, line_number)` for every non-blank line. Parse and
/// schema errors surface as DataError prefixed with `path:line`.
inline void for_each_jsonl(const std::string& path,
                           const std::function<void(const json&, std::size_t)>& fn) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            fn(json::parse(line), line_no);
        } catch (const json::exception& e) {
            throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

class JsonlWriter {
public:
    explicit JsonlWriter(const std::string& path) : out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw DataError("cannot write '" + path + "'");
    }
    void write(const json& record) { out_ << record.dump() << '\n'; }

private:
    std::ofstream out_;
};

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

inline void write_json_file(const std::string& path, const json& doc) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << doc.dump(2) << '\n';
}

// ---- items ----------------------------------------------------------------

inline json to_json(const Item& item) {
    json concepts = json::object();
    for (const auto& [term, w] : item.concepts) concepts[term] = w;
    json j = {{"id", item.id}, {"title", item.title}, {"ts", item.timestamp}, {"concepts", concepts}};
    if (item.dense) j["dense"] = *item.dense;
    return j;
}

inline Item item_from_json(const json& j) {
    Item item;
    item.id = j.at("id").get<std::string>();
    item.title = j.value("title", std::string{});
    item.timestamp = j.value("ts", std::int64_t{0});
    ConceptVector::Map weights;
    if (j.contains("concepts")) {
        for (const auto& [term, w] : j.at("concepts").items()) {
            const double v = w.get<double>();
            if (v > 1.0) throw DataError("item '" + item.id + "': salience of '" + term + "' exceeds 1");
            weights.emplace(term, v);
        }
    }
    item.concepts = ConceptVector(std::move(weights));
    if (j.contains("dense") && !j.at("dense").is_null()) item.dense = j.at("dense").get<std::vector<double>>();
    return item;
}

inline ItemCorpus read_items(const std::string& path) {
    ItemCorpus corpus;
    for_each_jsonl(path, [&](const json& j, std::size_t) { corpus.add(item_from_json(j)); });
    return corpus;
}

inline void write_items(const std::string& path, const std::vector<Item>& items) {
    JsonlWriter w(path);
    for (const auto& item : items) w.write(to_json(item));
}

// ---- histories and playlists ---------------------------------------------

inline std::vector<HistoryRecord> read_histories(const std::string& path) {
    std::vector<HistoryRecord> out;
    for_each_jsonl(path, [&](const json& j, std::size_t) {
        out.push_back(HistoryRecord{j.at("user_id").get<std::string>(),
                                    j.at("item_ids").get<std::vector<std::string>>()});
    });
    return out;
}

inline void write_histories(const std::string& path, const std::vector<HistoryRecord>& histories) {
    JsonlWriter w(path);
    for (const auto& h : histories) w.write({{"user_id", h.user_id}, {"item_ids", h.item_ids}});
}

inline std::vector<Playlist> read_playlists(const std::string& path) {
    std::vector<Playlist> out;
    for_each_jsonl(path, [&](const json& j, std::size_t) {
        out.push_back(Playlist{j.at("playlist_id").get<std::string>(), j.value("name", std::string{}),
                               j.at("item_ids").get<std::vector<std::string>>()});
    });
    return out;
}

inline void write_playlists(const std::string& path, const std::vector<Playlist>& playlists) {
    JsonlWriter w(path);
    for (const auto& p : playlists) {
        w.write({{"playlist_id", p.playlist_id}, {"name", p.name}, {"item_ids", p.item_ids}});
    }
}

// ---- journeys ---------------------------------------------------------------

inline constexpr std::size_t kJourneyTopTerms = 10;

inline json to_json(const ExtractionResult& r) {
    json journeys = json::array();
    for (const auto& j : r.journeys) {
        json terms = json::array();
        for (const auto& [term, w] : top_terms(j.representation, kJourneyTopTerms)) {
            terms.push_back({{"term", term}, {"weight", w}});
        }
        journeys.push_back({{"idx", j.creation_index}, {"item_ids", j.members}, {"top_terms", terms}});
    }
    return {{"user_id", r.user_id}, {"journeys", journeys}, {"pruned", r.pruned_items}};
}

/// Reads journeys.jsonl; representations are rebuilt from the corpus.
inline std::vector<ExtractionResult> read_journeys(const std::string& path, const ItemCorpus& corpus) {
    std::vector<ExtractionResult> out;
    for_each_jsonl(path, [&](const json& rec, std::size_t) {
        ExtractionResult r;
        r.user_id = rec.at("user_id").get<std::string>();
        for (const auto& j : rec.at("journeys")) {
            JourneyCluster c;
            c.creation_index = j.at("idx").get<std::size_t>();
            c.members = j.at("item_ids").get<std::vector<std::string>>();
            if (c.members.empty()) throw DataError("journey with no items");
            for (const auto& id : c.members) c.representation.accumulate(corpus.at(id).concepts);
            r.journeys.push_back(std::move(c));
        }
        r.pruned_items = rec.value("pruned", std::vector<std::string>{});
        out.push_back(std::move(r));
    });
    return out;
}

// ---- global assignment ------------------------------------------------------

inline json to_json(const GlobalAssignment& g) {
    json a = json::object();
    for (const auto& [id, c] : g.assignment) a[id] = c;
    return {{"k", g.k}, {"centroid_dim", g.centroid_dim}, {"assignment", a}};
}

inline GlobalAssignment assignment_from_json(const json& j) {
    GlobalAssignment g;
    g.k = j.at("k").get<std::size_t>();
    g.centroid_dim = j.at("centroid_dim").get<std::size_t>();
    for (const auto& [id, c] : j.at("assignment").items()) {
        const auto cluster = c.get<std::size_t>();
        if (cluster >= g.k) throw DataError("assignment of '" + id + "' outside [0, k)");
        g.assignment.emplace(id, cluster);
    }
    return g;
}

// ---- exemplars --------------------------------------------------------------

inline std::vector<Exemplar> read_exemplars(const std::string& path) {
    std::vector<Exemplar> out;
    for_each_jsonl(path, [&](const json& j, std::size_t) {
        Exemplar ex;
        const auto& input = j.at("input");
        ex.titles = input.value("titles", std::vector<std::string>{});
        ex.keywords = input.value("keywords", std::vector<std::string>{});
        ex.target = j.at("target").get<std::string>();
        out.push_back(std::move(ex));
    });
    return out;
}

// ---- reports ----------------------------------------------------------------

inline json to_json(const SizeSummary& s) {
    return {{"count", s.count}, {"min", s.min}, {"median", s.median}, {"mean", s.mean}, {"max", s.max}};
}

inline json to_json(const EvalReport& r) {
    return {{"method", r.method},
            {"users", r.users},
            {"golden_journeys", r.golden_journeys},
            {"mean_recall", r.mean_recall},
            {"mean_precision", r.mean_precision},
            {"total_journeys", r.total_journeys},
            {"clusters_per_journey", r.clusters_per_journey},
            {"journeys_per_user", r.journeys_per_user},
            {"singleton_fraction", r.singleton_fraction},
            {"items_per_journey", to_json(r.items_per_journey)},
            {"cold_items", r.cold_items}};
}

inline json to_json(const GranularityStats& s) {
    return {{"users", s.users},
            {"total_items", s.total_items},
            {"total_journeys", s.total_journeys},
            {"singleton_fraction", s.singleton_fraction},
            {"journeys_per_user", s.journeys_per_user},
            {"items_per_journey", to_json(s.items_per_journey)}};
}

// ---- synth spec ---------------------------------------------------------------

inline SynthSpec synth_spec_from_json(const json& j) {
    static const std::vector<std::string> known = {
        "n_users", "journeys_per_user", "items_per_journey", "vocab_per_journey",
        "shared_vocab_fraction", "noise_terms_per_item", "seed", "noise_vocab",
        "subjourneys_per_journey", "sub_shared_fraction", "dense_dim", "jitter_fraction"};
    if (!j.is_object()) throw DataError("synth spec must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw DataError("synth spec: unknown key '" + key + "'");
        }
    }
    SynthSpec s;
    s.n_users = j.value("n_users", s.n_users);
    s.journeys_per_user = j.value("journeys_per_user", s.journeys_per_user);
    s.items_per_journey = j.value("items_per_journey", s.items_per_journey);
    s.vocab_per_journey = j.value("vocab_per_journey", s.vocab_per_journey);
    s.shared_vocab_fraction = j.value("shared_vocab_fraction", s.shared_vocab_fraction);
    s.noise_terms_per_item = j.value("noise_terms_per_item", s.noise_terms_per_item);
    s.seed = j.value("seed", s.seed);
    s.noise_vocab = j.value("noise_vocab", s.noise_vocab);
    s.subjourneys_per_journey = j.value("subjourneys_per_journey", s.subjourneys_per_journey);
    s.sub_shared_fraction = j.value("sub_shared_fraction", s.sub_shared_fraction);
    s.dense_dim = j.value("dense_dim", s.dense_dim);
    s.jitter_fraction = j.value("jitter_fraction", s.jitter_fraction);
    return s;
}

}  // namespace journeys::io
