#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "journeys/bleu.hpp"
#include "journeys/eval.hpp"
#include "journeys/icpc.hpp"
#include "journeys/synth.hpp"

using namespace journeys;

namespace {

std::map<std::string, const Item*> index_items(const SynthCorpus& c) {
    std::map<std::string, const Item*> out;
    for (auto& item : c.items) out[item.id] = &item;
    return out;
}

}  // namespace

TEST(Synth, Arithmetic) {
    SynthSpec spec;
    spec.n_users = 50;
    spec.journeys_per_user = 2;
    spec.items_per_journey = 10;
    const auto c = generate(spec);
    EXPECT_EQ(c.items.size(), 1000u);
    EXPECT_EQ(c.playlists.size(), 100u);
    EXPECT_EQ(c.histories.size(), 50u);
    for (auto& h : c.histories) EXPECT_EQ(h.item_ids.size(), 20u);
}

TEST(Synth, SameSeedIdenticalCorpus) {
    SynthSpec spec;
    spec.n_users = 8;
    spec.noise_terms_per_item = 2;
    spec.shared_vocab_fraction = 0.2;
    const auto a = generate(spec), b = generate(spec);
    ASSERT_EQ(a.items.size(), b.items.size());
    for (std::size_t i = 0; i < a.items.size(); ++i) {
        EXPECT_EQ(a.items[i].id, b.items[i].id);
        EXPECT_EQ(a.items[i].title, b.items[i].title);
        EXPECT_EQ(a.items[i].timestamp, b.items[i].timestamp);
        EXPECT_EQ(a.items[i].concepts, b.items[i].concepts);
        EXPECT_EQ(a.items[i].dense, b.items[i].dense);
    }
    for (std::size_t u = 0; u < a.histories.size(); ++u) EXPECT_EQ(a.histories[u].item_ids, b.histories[u].item_ids);
    spec.seed = 43;
    const auto c = generate(spec);
    EXPECT_NE(a.histories[0].item_ids, c.histories[0].item_ids);
}

TEST(Synth, DisjointJourneysHaveZeroCosine) {
    SynthSpec spec;
    spec.n_users = 6;
    const auto c = generate(spec);
    const auto by_id = index_items(c);
    for (std::size_t p = 0; p < c.playlists.size(); ++p) {
        for (std::size_t q = p + 1; q < c.playlists.size(); ++q) {
            for (auto& a : c.playlists[p].item_ids) {
                for (auto& b : c.playlists[q].item_ids) {
                    EXPECT_EQ(cosine(by_id.at(a)->concepts, by_id.at(b)->concepts), 0.0);
                }
            }
        }
    }
}

TEST(Synth, ItemShape) {
    SynthSpec spec;
    spec.n_users = 10;
    spec.noise_terms_per_item = 3;
    spec.shared_vocab_fraction = 0.25;
    spec.dense_dim = 8;
    const auto c = generate(spec);
    for (auto& item : c.items) {
        std::size_t heavy = 0;
        for (auto& [t, w] : item.concepts) {
            EXPECT_GT(w, 0.0);
            EXPECT_LE(w, 1.0);
        }
        const auto title_terms = whitespace_tokens(item.title);
        EXPECT_GE(title_terms.size(), 3u);
        EXPECT_LE(title_terms.size(), 6u);
        for (auto& t : title_terms) heavy += item.concepts.contains(t) ? 1 : 0;
        EXPECT_EQ(heavy, title_terms.size());
        EXPECT_EQ(item.concepts.size(), title_terms.size() + 3);
        for (auto& [t, w] : item.concepts) {
            if (std::find(title_terms.begin(), title_terms.end(), t) == title_terms.end()) {
                EXPECT_LE(w, 0.5);
            }
        }
        ASSERT_TRUE(item.dense);
        EXPECT_EQ(item.dense->size(), 8u);
    }
}

TEST(Synth, PlaylistsPartitionHistories) {
    SynthSpec spec;
    spec.n_users = 12;
    spec.journeys_per_user = 3;
    const auto c = generate(spec);
    for (std::size_t u = 0; u < c.histories.size(); ++u) {
        std::multiset<std::string> from_playlists;
        for (std::size_t p = 0; p < c.playlists.size(); ++p) {
            if (c.playlist_owner[p] != u) continue;
            from_playlists.insert(c.playlists[p].item_ids.begin(), c.playlists[p].item_ids.end());
            std::vector<std::string> sub;
            for (auto& id : c.histories[u].item_ids) {
                const auto& ids = c.playlists[p].item_ids;
                if (std::find(ids.begin(), ids.end(), id) != ids.end()) sub.push_back(id);
            }
            EXPECT_EQ(sub, c.playlists[p].item_ids);
        }
        EXPECT_EQ(from_playlists,
                  std::multiset<std::string>(c.histories[u].item_ids.begin(), c.histories[u].item_ids.end()));
    }
}

TEST(Synth, TimestampsFollowHistoryOrder) {
    SynthSpec spec;
    spec.n_users = 4;
    const auto c = generate(spec);
    const auto by_id = index_items(c);
    for (auto& h : c.histories) {
        for (std::size_t i = 1; i < h.item_ids.size(); ++i) {
            EXPECT_LT(by_id.at(h.item_ids[i - 1])->timestamp, by_id.at(h.item_ids[i])->timestamp);
        }
    }
}

TEST(Synth, IcpcRecoversPlantedPartition) {
    SynthSpec spec;
    const auto c = generate(spec);
    ItemCorpus corpus(c.items);
    for (std::size_t u = 0; u < c.histories.size(); ++u) {
        const auto r = extract_journeys(corpus.history(c.histories[u].user_id, c.histories[u].item_ids));
        std::set<std::vector<std::string>> got, want;
        for (auto& j : r.journeys) got.insert(j.members);
        for (std::size_t p = 0; p < c.playlists.size(); ++p) {
            if (c.playlist_owner[p] == u) want.insert(c.playlists[p].item_ids);
        }
        EXPECT_EQ(got, want);
        EXPECT_TRUE(r.pruned_items.empty());
    }
}

TEST(Synth, SubJourneysShareCoreVocabulary) {
    SynthSpec spec;
    spec.n_users = 3;
    spec.subjourneys_per_journey = 2;
    spec.sub_shared_fraction = 0.5;
    const auto c = generate(spec);
    const auto by_id = index_items(c);
    // The two halves of one playlist share some terms but have distinct head terms.
    for (auto& p : c.playlists) {
        std::set<std::string> first, second;
        for (std::size_t k = 0; k < p.item_ids.size(); ++k) {
            for (auto& [t, w] : by_id.at(p.item_ids[k])->concepts) (k < p.item_ids.size() / 2 ? first : second).insert(t);
        }
        std::vector<std::string> common;
        std::set_intersection(first.begin(), first.end(), second.begin(), second.end(), std::back_inserter(common));
        EXPECT_FALSE(common.empty());
        const auto h0 = whitespace_tokens(by_id.at(p.item_ids.front())->title).front();
        const auto h1 = whitespace_tokens(by_id.at(p.item_ids.back())->title).front();
        EXPECT_NE(h0, h1);
    }
}

TEST(Synth, Validation) {
    SynthSpec spec;
    spec.n_users = 0;
    EXPECT_THROW(generate(spec), InvalidArgument);
    spec = SynthSpec{};
    spec.shared_vocab_fraction = 1.5;
    EXPECT_THROW(generate(spec), InvalidArgument);
    spec = SynthSpec{};
    spec.vocab_per_journey = 2;
    EXPECT_THROW(generate(spec), InvalidArgument);
    spec = SynthSpec{};
    spec.noise_terms_per_item = 600;
    EXPECT_THROW(generate(spec), InvalidArgument);
    spec = SynthSpec{};
    spec.n_users = 100000;
    EXPECT_THROW(generate(spec), InvalidArgument);
}

TEST(Riffle, PreservesEachListOrder) {
    Rng rng(3);
    const std::vector<std::vector<std::string>> lists = {{"a1", "a2", "a3"}, {"b1", "b2"}, {"c1"}};
    for (int trial = 0; trial < 100; ++trial) {
        const auto out = riffle(lists, rng);
        ASSERT_EQ(out.size(), 6u);
        for (auto& l : lists) {
            std::vector<std::string> sub;
            for (auto& id : out) {
                if (std::find(l.begin(), l.end(), id) != l.end()) sub.push_back(id);
            }
            EXPECT_EQ(sub, l);
        }
    }
}

TEST(SynthWord, DistinctWords) {
    std::set<std::string> words;
    for (std::size_t i = 0; i < 5000; ++i) words.insert(detail::synth_word(i));
    EXPECT_EQ(words.size(), 5000u);
}
