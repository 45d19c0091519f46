#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "journeys/concept_vector.hpp"
#include "journeys/error.hpp"
#include "journeys/item.hpp"
#include "journeys/random.hpp"

namespace journeys {

struct SynthSpec {
    std::size_t n_users = 50;
    std::size_t journeys_per_user = 2;
    std::size_t items_per_journey = 10;
    std::size_t vocab_per_journey = 20;
    double shared_vocab_fraction = 0.0;
    std::size_t noise_terms_per_item = 0;
    std::uint64_t seed = 42;

    // Noise terms are drawn from one corpus-wide pool of this size.
    std::size_t noise_vocab = 500;
    // Two-level corpora: each journey is played as this many consecutive
    // sub-journeys. A sub-journey has its own head term, keeps
    // `sub_shared_fraction` of the parent's other specific terms and
    // replaces the rest with its own.
    std::size_t subjourneys_per_journey = 1;
    double sub_shared_fraction = 0.5;

    std::size_t dense_dim = 16;
    // RMS length of the per-item jitter, relative to the mean centroid spacing.
    double jitter_fraction = 0.05;

    void validate() const {
        if (n_users < 1 || journeys_per_user < 1 || items_per_journey < 1) {
            throw InvalidArgument("synth: user, journey and item counts must be >= 1");
        }
        if (!(shared_vocab_fraction >= 0.0 && shared_vocab_fraction <= 1.0)) {
            throw InvalidArgument("synth: shared_vocab_fraction must lie in [0, 1]");
        }
        if (!(sub_shared_fraction >= 0.0 && sub_shared_fraction <= 1.0)) {
            throw InvalidArgument("synth: sub_shared_fraction must lie in [0, 1]");
        }
        if (vocab_per_journey < 3) throw InvalidArgument("synth: vocab_per_journey must be >= 3");
        if (noise_terms_per_item > noise_vocab) {
            throw InvalidArgument("synth: noise_terms_per_item exceeds noise_vocab");
        }
        if (subjourneys_per_journey < 1) {
            throw InvalidArgument("synth: subjourneys_per_journey must be >= 1");
        }
        if (dense_dim < 1) throw InvalidArgument("synth: dense_dim must be >= 1");
        if (!(jitter_fraction >= 0.0) || !std::isfinite(jitter_fraction)) {
            throw InvalidArgument("synth: jitter_fraction must be finite and >= 0");
        }
        const std::size_t words = n_users * journeys_per_user * vocab_per_journey *
                                      subjourneys_per_journey +
                                  vocab_per_journey + noise_vocab;
        if (words > kWordSpace) throw InvalidArgument("synth: vocabulary exceeds the word space");
    }

    static constexpr std::size_t kWordSpace = 70 * 70 * 70;
};

struct Playlist {
    std::string playlist_id;
    std::string name;
    std::vector<std::string> item_ids;
};

struct HistoryRecord {
    std::string user_id;
    std::vector<std::string> item_ids;
};

struct SynthCorpus {
    std::vector<Item> items;
    std::vector<Playlist> playlists;     // one per golden journey
    std::vector<HistoryRecord> histories;
    std::vector<std::size_t> playlist_owner;  // user index per playlist
};

namespace detail {

// Distinct pronounceable word for every index below kWordSpace.
inline std::string synth_word(std::size_t index) {
    static constexpr char consonants[] = "bdfgklmnprstvz";
    static constexpr char vowels[] = "aeiou";
    // 7919 is coprime with 70^3, so this permutes the word space.
    std::size_t x = (index * 7919 + 1237) % SynthSpec::kWordSpace;
    std::string word;
    for (int s = 0; s < 3; ++s) {
        const std::size_t syl = x % 70;
        x /= 70;
        word.push_back(consonants[syl / 5]);
        word.push_back(vowels[syl % 5]);
    }
    return word;
}

inline std::string padded(const char* prefix, std::size_t n, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, n);
    return buf;
}

// Picks `count` distinct entries of `pool`, in draw order.
inline std::vector<std::string> sample_distinct(const std::vector<std::string>& pool,
                                                std::size_t count, Rng& rng) {
    std::vector<std::size_t> idx(pool.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::vector<std::string> out;
    for (std::size_t i = 0; i < count && i < idx.size(); ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_below(rng, idx.size() - i));
        std::swap(idx[i], idx[j]);
        out.push_back(pool[idx[i]]);
    }
    return out;
}

}  // namespace detail

/// Uniform riffle of several ordered lists: each step draws from a list
/// with probability proportional to its remaining length.
inline std::vector<std::string> riffle(const std::vector<std::vector<std::string>>& lists, Rng& rng) {
    std::vector<std::size_t> pos(lists.size(), 0);
    std::size_t remaining = 0;
    for (const auto& l : lists) remaining += l.size();
    std::vector<std::string> out;
    out.reserve(remaining);
    while (remaining > 0) {
        auto r = uniform_below(rng, remaining);
        for (std::size_t k = 0; k < lists.size(); ++k) {
            const std::size_t left = lists[k].size() - pos[k];
            if (r < left) {
                out.push_back(lists[k][pos[k]++]);
                break;
            }
            r -= left;
        }
        --remaining;
    }
    return out;
}

/// Planted-journey corpus. Each golden journey has its own terms plus a
/// corpus-wide shared pool; items draw 3-6 journey terms with weights in
/// (0, 1] and optional noise terms with weights in (0, 0.5]. The first
/// specific term of a (sub-)journey is its head term: every item carries it
/// at weight 1. Dense embeddings are the journey centroid plus isotropic
/// Gaussian jitter.
inline SynthCorpus generate(const SynthSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);

    const std::size_t V = spec.vocab_per_journey;
    const auto shared_n =
        static_cast<std::size_t>(std::llround(spec.shared_vocab_fraction * static_cast<double>(V)));
    const std::size_t specific_n = V - shared_n;
    const std::size_t non_head_n = specific_n > 0 ? specific_n - 1 : 0;
    const auto core_n = static_cast<std::size_t>(
        std::llround(spec.sub_shared_fraction * static_cast<double>(non_head_n)));

    std::size_t next_word = 0;
    auto fresh = [&] { return detail::synth_word(next_word++); };

    std::vector<std::string> shared_pool;
    for (std::size_t i = 0; i < shared_n; ++i) shared_pool.push_back(fresh());
    std::vector<std::string> noise_pool;
    for (std::size_t i = 0; i < spec.noise_vocab; ++i) noise_pool.push_back(fresh());

    // Centroid coordinates ~ N(0, 1/(2d)) give unit mean squared spacing.
    const double d = static_cast<double>(spec.dense_dim);
    const double centroid_sd = std::sqrt(1.0 / (2.0 * d));
    const double jitter_sd = spec.jitter_fraction / std::sqrt(d);

    SynthCorpus corpus;
    std::unordered_map<std::string, std::size_t> slot_of;
    std::size_t item_counter = 0;
    std::size_t journey_counter = 0;
    for (std::size_t u = 0; u < spec.n_users; ++u) {
        std::vector<std::vector<std::string>> user_journeys;
        for (std::size_t jn = 0; jn < spec.journeys_per_user; ++jn, ++journey_counter) {
            std::vector<std::string> specific;
            for (std::size_t i = 0; i < specific_n; ++i) specific.push_back(fresh());

            std::vector<std::vector<std::string>> sub_vocab;
            if (spec.subjourneys_per_journey == 1) {
                sub_vocab.push_back(specific);
            } else {
                // Own head term, then `core_n` of the parent's non-head terms.
                for (std::size_t s = 0; s < spec.subjourneys_per_journey; ++s) {
                    std::vector<std::string> v{fresh()};
                    for (std::size_t i = 1; i < specific_n; ++i) {
                        v.push_back(i <= core_n ? specific[i] : fresh());
                    }
                    sub_vocab.push_back(std::move(v));
                }
            }
            for (auto& v : sub_vocab) v.insert(v.end(), shared_pool.begin(), shared_pool.end());

            std::vector<double> centroid(spec.dense_dim);
            for (auto& c : centroid) c = centroid_sd * standard_normal(rng);

            Playlist playlist;
            playlist.playlist_id = detail::padded("p", journey_counter, 5);
            playlist.name = specific.empty() ? playlist.playlist_id
                                             : specific.front() +
                                                   (specific.size() > 1 ? " " + specific[1] : "");
            for (std::size_t k = 0; k < spec.items_per_journey; ++k) {
                const std::size_t sub = k * spec.subjourneys_per_journey / spec.items_per_journey;
                const auto& vocab = sub_vocab[sub];
                const std::size_t hi = std::min<std::size_t>(6, vocab.size());
                const std::size_t lo = std::min<std::size_t>(3, hi);
                const std::size_t n_terms = lo + static_cast<std::size_t>(uniform_below(rng, hi - lo + 1));

                Item item;
                item.id = detail::padded("i", item_counter++, 6);
                ConceptVector::Map weights;
                std::string title;
                std::vector<std::string> terms;
                std::vector<std::string> pool = vocab;
                if (specific_n > 0) {
                    terms.push_back(pool.front());
                    pool.erase(pool.begin());
                }
                for (auto& t : detail::sample_distinct(pool, n_terms - terms.size(), rng)) {
                    terms.push_back(std::move(t));
                }
                for (std::size_t t = 0; t < terms.size(); ++t) {
                    weights[terms[t]] = (t == 0 && specific_n > 0) ? 1.0 : uniform_open_closed(rng);
                    if (!title.empty()) title += ' ';
                    title += terms[t];
                }
                for (const auto& term :
                     detail::sample_distinct(noise_pool, spec.noise_terms_per_item, rng)) {
                    weights.try_emplace(term, 0.5 * uniform_open_closed(rng));
                }
                item.title = std::move(title);
                item.concepts = ConceptVector(std::move(weights));
                std::vector<double> dense(spec.dense_dim);
                for (std::size_t c = 0; c < spec.dense_dim; ++c) {
                    dense[c] = centroid[c] + jitter_sd * standard_normal(rng);
                }
                item.dense = std::move(dense);

                playlist.item_ids.push_back(item.id);
                slot_of.emplace(item.id, corpus.items.size());
                corpus.items.push_back(std::move(item));
            }
            user_journeys.push_back(playlist.item_ids);
            corpus.playlists.push_back(std::move(playlist));
            corpus.playlist_owner.push_back(u);
        }

        HistoryRecord history{detail::padded("u", u, 4), riffle(user_journeys, rng)};
        // Timestamps follow the user's history order.
        const std::int64_t base = 1'700'000'000 + static_cast<std::int64_t>(u) * 1'000'000;
        for (std::size_t p = 0; p < history.item_ids.size(); ++p) {
            corpus.items[slot_of.at(history.item_ids[p])].timestamp =
                base + static_cast<std::int64_t>(p) * 60;
        }
        corpus.histories.push_back(std::move(history));
    }
    return corpus;
}

}  // namespace journeys
