// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "journeys/journeys.hpp"
#include "journeys/pipeline.hpp"

using namespace journeys;
namespace fs = std::filesystem;

namespace {

// Tolerances and thresholds.
constexpr double kRecallFloor = 0.99;
constexpr double kPrecisionFloor = 0.99;
constexpr double kCpjCeiling = 1.05;
constexpr double kJpuLow = 1.9;
constexpr double kJpuHigh = 2.1;
constexpr double kRuntimeLimitSeconds = 5.0;
constexpr double kAboveMaxCosine = 1.0 + 1e-9;
constexpr double kMixedRecall = 5.0 / 6.0;
constexpr double kMixedRecallTol = 1e-9;
constexpr double kPinnedBleu = 0.6057068642773799;
constexpr double kPinnedBleuTol = 1e-15;
// Replay-oracle slack around the implementation's tie tolerance.
constexpr double kReplayEarlierSlack = 0.5e-12;
constexpr double kReplayLaterSlack = 1.5e-12;
constexpr double kReplayThresholdSlack = 1e-12;

int failures = 0;

void report(int id, const std::string& what, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << " [" << id << "] " << what << ": " << detail << std::endl;
    if (!ok) ++failures;
}

std::string num(double v) {
    std::ostringstream out;
    out.precision(6);
    out << v;
    return out.str();
}

ItemCorpus corpus_of(const SynthCorpus& c) { return ItemCorpus(c.items); }

std::vector<UserHistory> histories_of(const SynthCorpus& c, const ItemCorpus& corpus) {
    std::vector<UserHistory> out;
    for (const auto& h : c.histories) out.push_back(corpus.history(h.user_id, h.item_ids));
    return out;
}

// Golden instances straight from the planted labels: each synthetic user's
// own playlists, in the order they were generated.
std::vector<GoldenInstance> planted_instances(const SynthCorpus& c) {
    std::vector<GoldenInstance> out(c.histories.size());
    for (std::size_t u = 0; u < c.histories.size(); ++u) {
        out[u].user_id = c.histories[u].user_id;
        out[u].mixed_history = c.histories[u].item_ids;
    }
    for (std::size_t p = 0; p < c.playlists.size(); ++p) {
        out[c.playlist_owner[p]].golden.push_back({c.playlists[p].playlist_id, c.playlists[p].item_ids});
    }
    return out;
}

void criterion_1() {
    SynthSpec spec;
    spec.n_users = 50;
    spec.journeys_per_user = 2;
    spec.items_per_journey = 10;
    const auto c = generate(spec);
    const auto corpus = corpus_of(c);
    const auto instances = planted_instances(c);
    const auto start = std::chrono::steady_clock::now();
    const auto report_e2 = evaluate_e2("icpc", instances, corpus, [](const UserHistory& h) {
        return extract_journeys(h, IcpcConfig{0.1, 2});
    });
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool ok = report_e2.mean_recall >= kRecallFloor && report_e2.mean_precision >= kPrecisionFloor &&
                    report_e2.clusters_per_journey <= kCpjCeiling && report_e2.journeys_per_user >= kJpuLow &&
                    report_e2.journeys_per_user <= kJpuHigh && secs < kRuntimeLimitSeconds;
    report(1, "planted-partition oracle", ok,
           "recall=" + num(report_e2.mean_recall) + " precision=" + num(report_e2.mean_precision) +
               " cpj=" + num(report_e2.clusters_per_journey) + " jpu=" + num(report_e2.journeys_per_user) +
               " runtime=" + num(secs) + "s");
}

void criterion_2() {
    SynthSpec spec;
    spec.shared_vocab_fraction = 0.2;
    spec.noise_terms_per_item = 2;
    spec.seed = 42;
    const auto c = generate(spec);
    const auto corpus = corpus_of(c);
    const auto instances = mix_playlists(c.playlists, 2, 42);

    const IcpcConfig icpc{0.1, 1};
    const auto r_icpc =
        evaluate_e2("icpc", instances, corpus, [&](const UserHistory& h) { return extract_journeys(h, icpc); });

    CoocConfig cooc;
    cooc.dim = 16;
    cooc.k = 50;
    const auto g = train_cooc(c.histories, cooc);
    const auto r_cooc =
        evaluate_e2("cooc", instances, corpus, [&](const UserHistory& h) { return cooc_extract(h, g, 1); });

    const auto model = fit_multimodal(c.items, MultimodalConfig{});
    const auto r_mm =
        evaluate_e2("multimodal", instances, corpus, [&](const UserHistory& h) { return model.extract(h, 1); });

    const bool recall_ok = r_icpc.mean_recall > r_cooc.mean_recall && r_icpc.mean_recall > r_mm.mean_recall;
    const bool cpj_ok = r_icpc.clusters_per_journey < r_cooc.clusters_per_journey &&
                        r_icpc.clusters_per_journey < r_mm.clusters_per_journey;
    const std::string detail = "recall icpc=" + num(r_icpc.mean_recall) + " cooc=" + num(r_cooc.mean_recall) +
                               " multimodal=" + num(r_mm.mean_recall) + "; cpj icpc=" +
                               num(r_icpc.clusters_per_journey) + " cooc=" + num(r_cooc.clusters_per_journey) +
                               " multimodal=" + num(r_mm.clusters_per_journey);
    report(2, "method ordering (recall)", recall_ok, detail);
    report(2, "method ordering (clusters_per_journey smallest for icpc)", cpj_ok, detail);
}

void criterion_3() {
    bool ok = true;
    std::size_t users = 0;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        for (double shared : {0.0, 0.3}) {
            SynthSpec spec;
            spec.n_users = 20;
            spec.seed = seed;
            spec.shared_vocab_fraction = shared;
            spec.noise_terms_per_item = seed == 1 ? 0 : 3;
            spec.subjourneys_per_journey = seed == 3 ? 2 : 1;
            const auto c = generate(spec);
            const auto corpus = corpus_of(c);
            for (const auto& h : histories_of(c, corpus)) {
                ++users;
                ok = ok && cluster_history(h, 0.0).size() == 1;
                const auto raw = cluster_history(h, kAboveMaxCosine);
                ok = ok && raw.size() == h.items.size();
                for (const auto& j : raw) ok = ok && j.members.size() == 1;
                const auto pruned = prune_journeys(h, raw, 1);
                ok = ok && pruned.journeys.empty() && pruned.pruned_items.size() == h.items.size();
            }
        }
    }
    report(3, "boundary thresholds", ok,
           std::to_string(users) + " users: eps=0 one journey each; eps=1+1e-9 all singletons, none kept");
}

void criterion_4() {
    bool ok = true;
    std::string detail;
    for (std::size_t subs : {2u, 3u}) {
        for (double shared : {0.0, 0.5}) {
            SynthSpec spec;
            spec.subjourneys_per_journey = subs;
            spec.sub_shared_fraction = 0.5;
            spec.shared_vocab_fraction = shared;
            const auto c = generate(spec);
            const auto corpus = corpus_of(c);
            const auto hs = histories_of(c, corpus);
            const auto count = [&](double eps) {
                std::size_t n = 0;
                for (const auto& h : hs) n += extract_journeys(h, IcpcConfig{eps, 1}).journeys.size();
                return n;
            };
            const auto lo = count(0.05), hi = count(0.15);
            ok = ok && lo <= hi;
            detail += "subs=" + std::to_string(subs) + ",shared=" + num(shared) + ": " + std::to_string(lo) +
                      "<=" + std::to_string(hi) + "; ";
        }
    }
    report(4, "granularity monotonicity", ok, detail);
}

UserHistory random_history(std::mt19937_64& rng, std::size_t max_items, int vocab) {
    std::uniform_int_distribution<std::size_t> len(0, max_items);
    std::uniform_int_distribution<int> n_terms(0, 4);
    std::uniform_int_distribution<int> term(0, vocab - 1);
    std::uniform_real_distribution<double> weight(0.05, 1.0);
    UserHistory h{"u", {}};
    const std::size_t n = len(rng);
    for (std::size_t i = 0; i < n; ++i) {
        ConceptVector::Map m;
        const int k = n_terms(rng);
        for (int t = 0; t < k; ++t) {
            // Some weights snap to a coarse grid so exact ties occur.
            const double w = (t % 2 == 0) ? std::round(weight(rng) * 4) / 4 : weight(rng);
            if (w > 0) m["w" + std::to_string(term(rng))] = w;
        }
        Item item;
        item.id = "i" + std::to_string(i);
        item.title = item.id;
        item.concepts = ConceptVector(m);
        h.items.push_back(std::move(item));
    }
    return h;
}

void criterion_5() {
    std::mt19937_64 rng(20240601);
    std::size_t violations = 0, assignments = 0;
    const double eps = 0.1;
    for (int trial = 0; trial < 200; ++trial) {
        const auto h = random_history(rng, 100, 25);
        const auto raw = cluster_history(h, eps);
        std::map<std::string, std::size_t> owner;
        for (const auto& j : raw) {
            for (const auto& id : j.members) owner[id] = j.creation_index;
        }
        std::vector<std::map<std::string, double>> reps;
        for (const auto& item : h.items) {
            ++assignments;
            std::map<std::string, double> x(item.concepts.begin(), item.concepts.end());
            std::vector<double> sims;
            for (const auto& rep : reps) {
                double dot = 0, nx = 0, nr = 0;
                for (const auto& [t, w] : x) {
                    nx += w * w;
                    if (auto it = rep.find(t); it != rep.end()) dot += w * it->second;
                }
                for (const auto& [t, w] : rep) nr += w * w;
                sims.push_back(nx > 0 && nr > 0 ? dot / std::sqrt(nx * nr) : 0.0);
            }
            const std::size_t chosen = owner.at(item.id);
            if (chosen == reps.size()) {
                for (double s : sims) violations += s >= eps + kReplayThresholdSlack ? 1 : 0;
                reps.emplace_back();
            } else if (chosen > reps.size()) {
                ++violations;
                continue;
            } else {
                if (sims[chosen] < eps - kReplayThresholdSlack) ++violations;
                for (std::size_t j = 0; j < sims.size(); ++j) {
                    if (j < chosen && sims[j] >= sims[chosen] - kReplayEarlierSlack) ++violations;
                    if (j > chosen && sims[j] > sims[chosen] + kReplayLaterSlack) ++violations;
                }
            }
            for (const auto& [t, w] : x) reps[chosen][t] += w;
        }
    }
    report(5, "replay-argmax property", violations == 0,
           "200 histories, " + std::to_string(assignments) + " assignments, " + std::to_string(violations) +
               " violations");
}

void criterion_6() {
    const std::vector<GoldenJourney> golden = {{"A", {"1", "2", "3"}}, {"B", {"4", "5"}}};
    const std::vector<Cluster> perfect = {{"1", "2", "3"}, {"4", "5"}};
    const std::vector<Cluster> mixed = {{"1", "2"}, {"3"}, {"4", "5"}};
    const double pr = recall(golden, perfect), pp = precision(golden, perfect);
    const double pc = clusters_per_journey(golden, perfect);
    const double mr = recall(golden, mixed), mc = clusters_per_journey(golden, mixed);
    const bool ok = pr == 1.0 && pp == 1.0 && pc == 1.0 && std::abs(mr - kMixedRecall) <= kMixedRecallTol &&
                    mc == 1.5;
    report(6, "metric identities", ok,
           "perfect recall=" + num(pr) + " precision=" + num(pp) + " cpj=" + num(pc) + "; mixed recall=" +
               num(mr) + " cpj=" + num(mc));
}

void criterion_7() {
    const std::vector<std::vector<std::string>> blocks = {
        {"a1", "a2", "a3", "a4"}, {"b1", "b2", "b3", "b4"}, {"c1", "c2", "c3", "c4"}};
    std::vector<std::vector<std::string>> walks;
    std::mt19937_64 rng(5);
    for (int w = 0; w < 30; ++w) {
        const auto& b = blocks[static_cast<std::size_t>(w) % 3];
        std::vector<std::string> walk;
        std::uniform_int_distribution<std::size_t> pick(0, 3);
        for (int s = 0; s < 8; ++s) walk.push_back(b[pick(rng)]);
        walks.push_back(walk);
    }
    const auto g = train_cooc(walks, CoocConfig{3, 3, 30, 7});
    // Brute force: the assignment must induce exactly the block partition.
    bool ok = g.assignment.size() == 12;
    std::set<std::size_t> labels;
    for (std::size_t i = 0; ok && i < blocks.size(); ++i) {
        const auto label = g.assignment.at(blocks[i][0]);
        labels.insert(label);
        for (const auto& id : blocks[i]) ok = ok && g.assignment.at(id) == label;
    }
    ok = ok && labels.size() == 3;
    report(7, "co-occurrence block recovery", ok,
           std::to_string(g.assignment.size()) + " items, " + std::to_string(labels.size()) + " distinct block labels");
}

void criterion_8() {
    const JourneyView v{{"T1", "T2", "T3"}, ConceptVector({{"surf", 2.0}, {"wave", 0.9}, {"board", 0.4}})};
    const auto t = [](PromptKind k, std::optional<std::size_t> max_items = std::nullopt) {
        PromptTemplate p;
        p.kind = k;
        p.max_items = max_items;
        return p;
    };
    const std::vector<std::pair<std::string, std::string>> cases = {
        {build_prompt(v, t(PromptKind::natural_titles)),
         "I consumed content with titles: T1; T2; T3.\nI would describe one of my interests as:"},
        {build_prompt(v, t(PromptKind::structured_titles)), "titles: T1; T2; T3 interest_journey:"},
        {build_prompt(v, t(PromptKind::structured_keywords)), "keywords: surf, wave, board interest_journey:"},
        {build_prompt(v, t(PromptKind::structured_titles_keywords)),
         "titles: T1; T2; T3 keywords: surf, wave, board interest_journey:"},
        {build_prompt(v, t(PromptKind::structured_titles, 2)), "titles: T2; T3 interest_journey:"},
        {build_prompt(v, t(PromptKind::natural_titles, 1)),
         "I consumed content with titles: T3.\nI would describe one of my interests as:"},
    };
    std::size_t prompt_ok = 0;
    for (const auto& [got, want] : cases) prompt_ok += got == want ? 1 : 0;

    OfflineBackend a, b;
    const NamingRequest req{{v}, t(PromptKind::natural_titles)};
    const bool offline_ok = name_journey(req, a).name == name_journey(req, b).name &&
                            name_journey(req, a).name == "surf wave board";

    const double exact = bleu("the cat", "the cat");
    const double partial = bleu("olympiad geometry proofs", "olympiad geometry");
    const bool ok = prompt_ok == cases.size() && offline_ok && exact == 1.0 &&
                    std::abs(partial - kPinnedBleu) <= kPinnedBleuTol;
    report(8, "prompt goldens, offline namer, BLEU", ok,
           std::to_string(prompt_ok) + "/" + std::to_string(cases.size()) + " prompts match; offline " +
               (offline_ok ? "deterministic" : "MISMATCH") + "; bleu exact=" + num(exact) +
               " partial=" + std::to_string(partial));
}

void criterion_9() {
    const std::vector<std::string> surf = {"surf wave board", "wave riding tips", "board wax guide",
                                           "surf spot review"};
    const std::vector<std::string> bake = {"sourdough bread starter", "bread crust oven", "starter flour feeding",
                                           "oven bread baking"};
    UserHistory h{"u", {}};
    for (std::size_t i = 0; i < 4; ++i) {
        for (const auto* list : {&surf, &bake}) {
            Item item;
            item.id = (list == &surf ? "s" : "b") + std::to_string(i);
            item.title = (*list)[i];
            ConceptVector::Map m;
            for (const auto& w : whitespace_tokens(item.title)) m[w] = 1.0;
            item.concepts = ConceptVector(m);
            h.items.push_back(item);
        }
    }
    PromptTemplate tmpl;
    OfflineBackend backend;
    const auto c = compare_naming_modes(h, IcpcConfig{}, tmpl, backend);
    const bool ok = c.per_journey.calls == 2 && c.per_journey.score > c.whole_history.score;
    report(9, "per-journey naming beats whole-history", ok,
           "per_journey=" + num(c.per_journey.score) + " whole_history=" + num(c.whole_history.score) +
               " (" + std::to_string(c.per_journey.calls) + " journeys)");
}

// ---- determinism sweep over the CLI ----------------------------------------

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(JOURNEYS_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Runs every command into `dir`; returns the failing command or "".
std::string sweep(const fs::path& dir) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto f = [&](const std::string& name) { return (dir / name).string(); };
    {
        std::ofstream spec(f("spec.json"));
        spec << R"({"n_users": 12, "shared_vocab_fraction": 0.2, "noise_terms_per_item": 2, "seed": 42})";
    }
    const std::string items = " --items " + f("items.jsonl");
    const std::string hist = f("histories.jsonl");
    const std::vector<std::string> cmds = {
        "gen --spec " + f("spec.json") + " --out-dir " + dir.string(),
        "annotate --items " + f("items.jsonl") + " --out " + f("annotated.jsonl"),
        "train-cooc --histories " + hist + " --out " + f("assignment.json") + " --dim 8 --clusters 10",
        "extract --method icpc --jobs 4" + items + " --in " + hist + " --out " + f("icpc.jsonl"),
        "extract --method cooc --jobs 4 --assignment " + f("assignment.json") + items + " --in " + hist +
            " --out " + f("cooc.jsonl"),
        "extract --method multimodal --jobs 4" + items + " --in " + hist + " --out " + f("mm.jsonl"),
        "eval-e2 --method icpc --seed 7" + items + " --playlists " + f("playlists.jsonl") + " --out " +
            f("e2_icpc.json") + " --table " + f("e2_icpc.txt"),
        "eval-e2 --method cooc --seed 7 --histories " + hist + " --dim 8 --clusters 10" + items +
            " --playlists " + f("playlists.jsonl") + " --out " + f("e2_cooc.json") + " --table " + f("e2_cooc.txt"),
        "eval-e2 --method multimodal --seed 7" + items + " --playlists " + f("playlists.jsonl") + " --out " +
            f("e2_mm.json") + " --table " + f("e2_mm.txt"),
        "stats-e1 --min-size 2" + items + " --in " + hist + " --out " + f("stats2.json"),
        "stats-e1 --min-size 5" + items + " --in " + hist + " --out " + f("stats5.json"),
        "name --backend offline --template structured_titles_keywords" + items + " --in " + f("icpc.jsonl") +
            " --out " + f("names.jsonl"),
        "compare-naming --backend offline --jobs 3" + items + " --in " + hist + " --out " + f("compare.jsonl"),
    };
    for (const auto& cmd : cmds) {
        if (run_cli(cmd, dir / "log.txt") != 0) return cmd + " -> " + slurp(dir / "log.txt");
    }
    return "";
}

void criterion_10() {
    const auto base = fs::temp_directory_path() / "journeys_acceptance";
    const auto a = base / "run_a", b = base / "run_b";
    std::string err = sweep(a);
    if (err.empty()) err = sweep(b);
    std::size_t compared = 0, differing = 0;
    std::string diffs;
    if (err.empty()) {
        for (const auto& entry : fs::directory_iterator(a)) {
            const auto name = entry.path().filename().string();
            if (name == "log.txt" || name == "spec.json") continue;
            ++compared;
            if (slurp(entry.path()) != slurp(b / name)) {
                ++differing;
                diffs += " " + name;
            }
        }
    }
    const bool ok = err.empty() && compared >= 17 && differing == 0;
    report(10, "CLI determinism sweep", ok,
           err.empty() ? std::to_string(compared) + " output files compared, " + std::to_string(differing) +
                             " differ" + diffs
                       : "command failed: " + err);
    if (ok) fs::remove_all(base);
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> criteria = {criterion_1, criterion_2, criterion_3, criterion_4,
                                                         criterion_5, criterion_6, criterion_7, criterion_8,
                                                         criterion_9, criterion_10};
    for (const auto& c : criteria) {
        try {
            c();
        } catch (const std::exception& e) {
            std::cout << "FAIL exception: " << e.what() << std::endl;
            ++failures;
        }
    }
    std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
    return failures == 0 ? 0 : 1;
}
