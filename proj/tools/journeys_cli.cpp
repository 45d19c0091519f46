// journeys: command-line front end for journey extraction, evaluation and naming.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "journeys/config.hpp"
#include "journeys/io.hpp"
#include "journeys/journeys.hpp"
#include "journeys/pipeline.hpp"
#include "journeys/remote_backend.hpp"

namespace {

using journeys::io::json;
namespace jio = journeys::io;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitBackend = 3;

constexpr const char* kTokenEnv = "JOURNEYS_API_TOKEN";

// Flags shared by every command that reads a run configuration.
struct CommonOptions {
    std::string config_path;
    std::optional<double> epsilon;
    std::optional<std::size_t> min_cluster_size;
    std::optional<std::size_t> jobs;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
        cmd->add_option("--epsilon", epsilon, "ICPC similarity threshold");
        cmd->add_option("--min-cluster-size", min_cluster_size, "ICPC minimum journey size");
        cmd->add_option("--jobs", jobs, "worker threads for per-user work");
    }

    journeys::Config load() const {
        journeys::Config c;
        if (!config_path.empty()) c = journeys::config_from_json(jio::read_json_file(config_path));
        if (epsilon) c.epsilon = *epsilon;
        if (min_cluster_size) c.min_cluster_size = *min_cluster_size;
        if (jobs) c.parallelism = *jobs;
        c.icpc().validate();
        if (c.parallelism == 0) throw journeys::InvalidArgument("parallelism must be >= 1");
        return c;
    }
};

struct CoocOptions {
    std::optional<std::size_t> dim, k, iters;
    std::optional<std::uint64_t> seed;

    void attach(CLI::App* cmd) {
        cmd->add_option("--dim", dim, "factorization rank");
        cmd->add_option("--clusters", k, "number of global k-means clusters");
        cmd->add_option("--iters", iters, "factorization iterations");
        cmd->add_option("--cooc-seed", seed, "factorization and k-means seed");
    }

    void apply(journeys::CoocConfig& c) const {
        if (dim) c.dim = *dim;
        if (k) c.k = *k;
        if (iters) c.iters = *iters;
        if (seed) c.seed = *seed;
    }
};

struct MultimodalOptions {
    std::optional<double> eps_dist;
    std::optional<std::size_t> merge_conflicts;

    void attach(CLI::App* cmd) {
        cmd->add_option("--eps-dist", eps_dist, "multimodal micro-cluster radius");
        cmd->add_option("--merge-conflicts", merge_conflicts, "conflicts before two macro-clusters merge");
    }

    void apply(journeys::MultimodalConfig& c) const {
        if (eps_dist) c.eps_dist = *eps_dist;
        if (merge_conflicts) c.merge_conflicts = *merge_conflicts;
    }
};

struct NamingOptions {
    std::string backend = "offline";
    std::optional<std::string> endpoint, kind, exemplars;
    std::optional<std::size_t> max_items, max_in_flight;

    void attach(CLI::App* cmd) {
        cmd->add_option("--backend", backend, "offline or remote")->check(CLI::IsMember({"offline", "remote"}));
        cmd->add_option("--endpoint", endpoint, "completion endpoint (http://host:port/path)");
        cmd->add_option("--template", kind,
                        "natural_titles, structured_titles, structured_keywords or structured_titles_keywords");
        cmd->add_option("--max-items", max_items, "keep only the last N titles");
        cmd->add_option("--exemplars", exemplars, "few-shot exemplars (JSONL)");
    }

    void apply(journeys::NamingConfig& c) const {
        if (endpoint) c.endpoint = *endpoint;
        if (kind) c.kind = journeys::parse_prompt_kind(*kind);
        if (max_items) c.max_items = *max_items;
        if (exemplars) c.exemplars = *exemplars;
    }

    journeys::PromptTemplate prompt_template(const journeys::NamingConfig& c) const {
        journeys::PromptTemplate t;
        t.kind = c.kind;
        t.max_items = c.max_items;
        if (!c.exemplars.empty()) t.exemplars = jio::read_exemplars(c.exemplars);
        return t;
    }

    std::unique_ptr<journeys::NamingBackend> make_backend(const journeys::NamingConfig& c) const {
        if (backend == "offline") return std::make_unique<journeys::OfflineBackend>();
        if (c.endpoint.empty()) throw journeys::InvalidArgument("remote backend needs --endpoint or naming.endpoint");
        journeys::RemoteConfig rc;
        rc.endpoint = c.endpoint;
        if (const char* token = std::getenv(kTokenEnv)) rc.auth_token = token;
        rc.timeout_seconds = c.timeout_seconds;
        return std::make_unique<journeys::RemoteBackend>(rc);
    }
};

std::vector<journeys::UserHistory> resolve(const journeys::ItemCorpus& corpus,
                                           const std::vector<journeys::HistoryRecord>& records) {
    std::vector<journeys::UserHistory> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(corpus.history(r.user_id, r.item_ids));
    return out;
}

std::vector<std::vector<std::string>> id_lists(const std::vector<journeys::HistoryRecord>& records) {
    std::vector<std::vector<std::string>> out;
    for (const auto& r : records) out.push_back(r.item_ids);
    return out;
}

journeys::GlobalAssignment load_assignment(const std::string& path) {
    try {
        return jio::assignment_from_json(jio::read_json_file(path));
    } catch (const json::exception& e) {
        throw journeys::DataError(path + ": " + e.what());
    }
}

// Builds the per-user extractor for `method`. Model fitting happens here,
// once, before any user is processed.
journeys::Extractor make_extractor(journeys::Method method, const journeys::Config& cfg,
                                   const journeys::ItemCorpus& corpus, const std::string& assignment_path,
                                   const std::vector<journeys::HistoryRecord>* training) {
    using journeys::Method;
    switch (method) {
        case Method::icpc: {
            const auto icpc = cfg.icpc();
            return [icpc](const journeys::UserHistory& h) { return journeys::extract_journeys(h, icpc); };
        }
        case Method::cooc: {
            journeys::GlobalAssignment g;
            if (!assignment_path.empty()) {
                g = load_assignment(assignment_path);
            } else if (training != nullptr) {
                g = journeys::train_cooc(*training, cfg.cooc);
            } else {
                throw journeys::InvalidArgument(
                    "--method cooc needs a trained model: pass --assignment (from train-cooc)");
            }
            auto shared = std::make_shared<journeys::GlobalAssignment>(std::move(g));
            const auto min_size = cfg.min_cluster_size;
            return [shared, min_size](const journeys::UserHistory& h) {
                return journeys::cooc_extract(h, *shared, min_size);
            };
        }
        case Method::multimodal: {
            if (!corpus.all_dense()) {
                throw journeys::DataError("--method multimodal needs a dense embedding on every item");
            }
            auto model = std::make_shared<journeys::OnlineAgglomerative>(
                journeys::fit_multimodal(corpus.items(), cfg.multimodal));
            const auto min_size = cfg.min_cluster_size;
            return [model, min_size](const journeys::UserHistory& h) { return model->extract(h, min_size); };
        }
    }
    throw journeys::InvalidArgument("unknown method");
}

std::vector<journeys::ExtractionResult> run_extractor(const journeys::Extractor& extract,
                                                      const std::vector<journeys::UserHistory>& histories,
                                                      std::size_t jobs) {
    return journeys::parallel_map(histories.size(), jobs,
                                  [&](std::size_t i) { return extract(histories[i]); });
}

std::string fixed(double v, int digits = 4) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << v;
    return out.str();
}

std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    }
    std::ostringstream out;
    const auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c > 0) out << "  ";
            out << std::left << std::setw(static_cast<int>(width[c])) << cells[c];
        }
        out << '\n';
    };
    line(header);
    std::vector<std::string> rule;
    for (auto w : width) rule.emplace_back(w, '-');
    line(rule);
    for (const auto& r : rows) line(r);
    return out.str();
}

std::string report_table(const journeys::EvalReport& r) {
    return render_table({"method", "users", "recall", "precision", "journeys", "clusters/journey",
                         "journeys/user", "singleton_frac"},
                        {{r.method, std::to_string(r.users), fixed(r.mean_recall), fixed(r.mean_precision),
                          std::to_string(r.total_journeys), fixed(r.clusters_per_journey),
                          fixed(r.journeys_per_user), fixed(r.singleton_fraction)}});
}

std::string stats_table(const journeys::GranularityStats& s, std::size_t min_size) {
    return render_table({"users", "items", "min_size", "journeys", "journeys/user", "singleton_frac",
                         "items/journey (median)", "items/journey (mean)"},
                        {{std::to_string(s.users), std::to_string(s.total_items), std::to_string(min_size),
                          std::to_string(s.total_journeys), fixed(s.journeys_per_user), fixed(s.singleton_fraction),
                          fixed(s.items_per_journey.median, 1), fixed(s.items_per_journey.mean, 2)}});
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw journeys::DataError("cannot write '" + path + "'");
    out << text;
}

json outcome_json(const journeys::ModeOutcome& m) {
    return {{"names", m.names}, {"candidate", m.candidate}, {"score", m.score},
            {"calls", m.calls}, {"errors", m.errors},       {"partial", m.partial}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interest journey extraction, evaluation and naming"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "journeys 0.1.0");

    // gen
    std::string gen_spec, gen_out = ".";
    std::optional<std::uint64_t> gen_seed;
    auto* gen = app.add_subcommand("gen", "generate a synthetic corpus");
    gen->add_option("--spec", gen_spec, "synthetic corpus spec (JSON)")->check(CLI::ExistingFile);
    gen->add_option("--out-dir", gen_out, "output directory");
    gen->add_option("--seed", gen_seed, "override the spec seed");

    // annotate
    std::string ann_in, ann_out;
    auto* annotate = app.add_subcommand("annotate", "replace item concepts with title TF-IDF");
    annotate->add_option("--items", ann_in, "items.jsonl")->required()->check(CLI::ExistingFile);
    annotate->add_option("--out", ann_out, "output items.jsonl")->required();

    // train-cooc
    CommonOptions tc_common;
    CoocOptions tc_cooc;
    std::string tc_hist, tc_out;
    auto* train = app.add_subcommand("train-cooc", "fit the co-occurrence topic clusters");
    train->add_option("--histories", tc_hist, "histories.jsonl")->required()->check(CLI::ExistingFile);
    train->add_option("--out", tc_out, "assignment.json")->required();
    tc_common.attach(train);
    tc_cooc.attach(train);

    // extract
    CommonOptions ex_common;
    MultimodalOptions ex_mm;
    std::string ex_method = "icpc", ex_items, ex_in, ex_out, ex_assign;
    auto* extract = app.add_subcommand("extract", "extract journeys from user histories");
    extract->add_option("--method", ex_method, "icpc, cooc or multimodal")
        ->check(CLI::IsMember({"icpc", "cooc", "multimodal"}));
    extract->add_option("--items", ex_items, "items.jsonl")->required()->check(CLI::ExistingFile);
    extract->add_option("--in", ex_in, "histories.jsonl")->required()->check(CLI::ExistingFile);
    extract->add_option("--out", ex_out, "journeys.jsonl")->required();
    extract->add_option("--assignment", ex_assign, "trained co-occurrence model (cooc)")->check(CLI::ExistingFile);
    ex_common.attach(extract);
    ex_mm.attach(extract);

    // eval-e2
    CommonOptions ev_common;
    CoocOptions ev_cooc;
    MultimodalOptions ev_mm;
    std::string ev_method = "icpc", ev_items, ev_playlists, ev_hist, ev_assign, ev_out, ev_table;
    std::uint64_t ev_seed = 0;
    std::size_t ev_per_user = 2;
    auto* eval = app.add_subcommand("eval-e2", "mix golden playlists and score an extractor");
    eval->add_option("--method", ev_method, "icpc, cooc or multimodal")
        ->check(CLI::IsMember({"icpc", "cooc", "multimodal"}));
    eval->add_option("--items", ev_items, "items.jsonl")->required()->check(CLI::ExistingFile);
    eval->add_option("--playlists", ev_playlists, "playlists.jsonl")->required()->check(CLI::ExistingFile);
    eval->add_option("--seed", ev_seed, "mixing seed");
    eval->add_option("--per-user", ev_per_user, "playlists mixed per synthetic user");
    eval->add_option("--histories", ev_hist, "histories.jsonl used to train cooc")->check(CLI::ExistingFile);
    eval->add_option("--assignment", ev_assign, "trained co-occurrence model (cooc)")->check(CLI::ExistingFile);
    eval->add_option("--out", ev_out, "report JSON");
    eval->add_option("--table", ev_table, "also write the text table here");
    ev_common.attach(eval);
    ev_cooc.attach(eval);
    ev_mm.attach(eval);

    // stats-e1
    CommonOptions st_common;
    std::string st_items, st_in, st_out;
    std::size_t st_min = 2;
    auto* stats = app.add_subcommand("stats-e1", "granularity statistics of ICPC journeys");
    stats->add_option("--items", st_items, "items.jsonl")->required()->check(CLI::ExistingFile);
    stats->add_option("--in", st_in, "histories.jsonl")->required()->check(CLI::ExistingFile);
    stats->add_option("--min-size", st_min, "journey size counted")->check(CLI::IsMember({2, 5}));
    stats->add_option("--out", st_out, "stats JSON");
    st_common.attach(stats);

    // name
    CommonOptions nm_common;
    NamingOptions nm_naming;
    std::string nm_items, nm_in, nm_out;
    auto* name = app.add_subcommand("name", "name extracted journeys");
    name->add_option("--items", nm_items, "items.jsonl")->required()->check(CLI::ExistingFile);
    name->add_option("--in", nm_in, "journeys.jsonl")->required()->check(CLI::ExistingFile);
    name->add_option("--out", nm_out, "names.jsonl")->required();
    nm_common.attach(name);
    nm_naming.attach(name);

    // compare-naming
    CommonOptions cn_common;
    NamingOptions cn_naming;
    std::string cn_items, cn_in, cn_out;
    auto* compare = app.add_subcommand("compare-naming", "whole-history vs grouped vs per-journey naming");
    compare->add_option("--items", cn_items, "items.jsonl")->required()->check(CLI::ExistingFile);
    compare->add_option("--in", cn_in, "histories.jsonl")->required()->check(CLI::ExistingFile);
    compare->add_option("--out", cn_out, "comparison.jsonl")->required();
    cn_common.attach(compare);
    cn_naming.attach(compare);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*gen) {
            journeys::SynthSpec spec;
            if (!gen_spec.empty()) spec = jio::synth_spec_from_json(jio::read_json_file(gen_spec));
            if (gen_seed) spec.seed = *gen_seed;
            const auto corpus = journeys::generate(spec);
            fs::create_directories(gen_out);
            const fs::path dir(gen_out);
            jio::write_items((dir / "items.jsonl").string(), corpus.items);
            jio::write_histories((dir / "histories.jsonl").string(), corpus.histories);
            jio::write_playlists((dir / "playlists.jsonl").string(), corpus.playlists);
            std::cout << "wrote " << corpus.items.size() << " items, " << corpus.histories.size()
                      << " histories, " << corpus.playlists.size() << " playlists to " << gen_out << '\n';
        } else if (*annotate) {
            const auto corpus = jio::read_items(ann_in);
            if (corpus.size() == 0) throw journeys::DataError(ann_in + ": no items");
            std::vector<std::pair<std::string, std::string>> docs;
            for (const auto& item : corpus.items()) docs.emplace_back(item.id, item.title);
            const auto vectors = journeys::tfidf_extract(docs);
            auto items = corpus.items();
            for (auto& item : items) item.concepts = vectors.at(item.id);
            jio::write_items(ann_out, items);
        } else if (*train) {
            auto cfg = tc_common.load();
            tc_cooc.apply(cfg.cooc);
            const auto records = jio::read_histories(tc_hist);
            const auto g = journeys::train_cooc(id_lists(records), cfg.cooc);
            jio::write_json_file(tc_out, jio::to_json(g));
        } else if (*extract) {
            auto cfg = ex_common.load();
            ex_mm.apply(cfg.multimodal);
            const auto corpus = jio::read_items(ex_items);
            const auto records = jio::read_histories(ex_in);
            const auto histories = resolve(corpus, records);
            const auto method = journeys::parse_method(ex_method);
            std::vector<journeys::ExtractionResult> results;
            if (!histories.empty()) {
                const auto fn = make_extractor(method, cfg, corpus, ex_assign, nullptr);
                results = run_extractor(fn, histories, cfg.parallelism);
            } else if (method == journeys::Method::cooc && ex_assign.empty()) {
                throw journeys::InvalidArgument(
                    "--method cooc needs a trained model: pass --assignment (from train-cooc)");
            }
            jio::JsonlWriter out(ex_out);
            for (const auto& r : results) out.write(jio::to_json(r));
        } else if (*eval) {
            auto cfg = ev_common.load();
            ev_cooc.apply(cfg.cooc);
            ev_mm.apply(cfg.multimodal);
            const auto corpus = jio::read_items(ev_items);
            const auto playlists = jio::read_playlists(ev_playlists);
            if (playlists.size() < 2 || playlists.size() < ev_per_user) {
                throw journeys::DataError(ev_playlists + ": need at least " +
                                          std::to_string(std::max<std::size_t>(2, ev_per_user)) +
                                          " playlists, found " + std::to_string(playlists.size()));
            }
            const auto instances = journeys::mix_playlists(playlists, ev_per_user, ev_seed);
            std::optional<std::vector<journeys::HistoryRecord>> training;
            if (!ev_hist.empty()) training = jio::read_histories(ev_hist);
            const auto method = journeys::parse_method(ev_method);
            const auto fn = make_extractor(method, cfg, corpus, ev_assign, training ? &*training : nullptr);
            std::vector<journeys::UserHistory> histories;
            for (const auto& inst : instances) histories.push_back(corpus.history(inst.user_id, inst.mixed_history));
            const auto results = run_extractor(fn, histories, cfg.parallelism);
            const auto report = journeys::score_e2(ev_method, instances, results);
            auto doc = jio::to_json(report);
            doc["seed"] = ev_seed;
            const auto table = report_table(report);
            if (!ev_out.empty()) jio::write_json_file(ev_out, doc);
            if (!ev_table.empty()) write_text(ev_table, table);
            std::cout << table;
        } else if (*stats) {
            const auto cfg = st_common.load();
            const auto corpus = jio::read_items(st_items);
            const auto records = jio::read_histories(st_in);
            if (records.empty()) throw journeys::DataError(st_in + ": no histories");
            const auto histories = resolve(corpus, records);
            const auto fn = make_extractor(journeys::Method::icpc, cfg, corpus, "", nullptr);
            const auto results = run_extractor(fn, histories, cfg.parallelism);
            const auto s = journeys::granularity_stats(results, st_min);
            auto doc = jio::to_json(s);
            doc["min_size"] = st_min;
            doc["epsilon"] = cfg.epsilon;
            if (!st_out.empty()) jio::write_json_file(st_out, doc);
            std::cout << stats_table(s, st_min);
        } else if (*name) {
            auto cfg = nm_common.load();
            nm_naming.apply(cfg.naming);
            const auto corpus = jio::read_items(nm_items);
            const auto results = jio::read_journeys(nm_in, corpus);
            const auto tmpl = nm_naming.prompt_template(cfg.naming);
            auto backend = nm_naming.make_backend(cfg.naming);
            jio::JsonlWriter out(nm_out);
            std::size_t failures = 0;
            for (const auto& r : results) {
                for (const auto& j : r.journeys) {
                    json rec = {{"user_id", r.user_id}, {"idx", j.creation_index}};
                    const journeys::NamingRequest req{{journeys::view_of(j, corpus)}, tmpl};
                    try {
                        const auto named = journeys::name_journey(req, *backend);
                        rec["name"] = named.name;
                        rec["backend"] = named.backend;
                        rec["prompt"] = named.prompt;
                    } catch (const journeys::BackendError& e) {
                        ++failures;
                        rec["error"] = e.what();
                        rec["status"] = e.status();
                    }
                    out.write(rec);
                }
            }
            if (failures > 0) {
                std::cerr << "journeys: " << failures << " journey(s) could not be named\n";
                return kExitBackend;
            }
        } else if (*compare) {
            auto cfg = cn_common.load();
            cn_naming.apply(cfg.naming);
            const auto corpus = jio::read_items(cn_items);
            const auto histories = resolve(corpus, jio::read_histories(cn_in));
            const auto tmpl = cn_naming.prompt_template(cfg.naming);
            auto backend = cn_naming.make_backend(cfg.naming);
            jio::JsonlWriter out(cn_out);
            double whole = 0, grouped = 0, per = 0;
            bool partial = false;
            for (const auto& h : histories) {
                const auto c = journeys::compare_naming_modes(h, cfg.icpc(), tmpl, *backend, cfg.parallelism);
                whole += c.whole_history.score;
                grouped += c.grouped_single_call.score;
                per += c.per_journey.score;
                partial = partial || c.whole_history.partial || c.grouped_single_call.partial || c.per_journey.partial;
                out.write({{"user_id", h.user_id},
                           {"reference", c.reference},
                           {"whole_history", outcome_json(c.whole_history)},
                           {"grouped_single_call", outcome_json(c.grouped_single_call)},
                           {"per_journey", outcome_json(c.per_journey)}});
            }
            const double n = histories.empty() ? 1.0 : static_cast<double>(histories.size());
            std::cout << render_table({"mode", "mean_bleu"}, {{"whole_history", fixed(whole / n)},
                                                              {"grouped_single_call", fixed(grouped / n)},
                                                              {"per_journey", fixed(per / n)}});
            if (partial) {
                std::cerr << "journeys: some naming calls failed; see the errors fields\n";
                return kExitBackend;
            }
        }
    } catch (const journeys::BackendError& e) {
        std::cerr << "journeys: backend error: " << e.what() << '\n';
        return kExitBackend;
    } catch (const journeys::InvalidArgument& e) {
        std::cerr << "journeys: " << e.what() << '\n';
        return kExitUsage;
    } catch (const journeys::Error& e) {
        std::cerr << "journeys: " << e.what() << '\n';
        return kExitData;
    } catch (const json::exception& e) {
        std::cerr << "journeys: " << e.what() << '\n';
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "journeys: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}
