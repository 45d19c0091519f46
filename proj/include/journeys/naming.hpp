#pragma once

#include <algorithm>
#include <cstddef>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "journeys/bleu.hpp"
#include "journeys/concept_vector.hpp"
#include "journeys/error.hpp"
#include "journeys/icpc.hpp"
#include "journeys/item.hpp"

namespace journeys {

enum class PromptKind {
    natural_titles,
    structured_titles,
    structured_keywords,
    structured_titles_keywords,
};

inline std::string to_string(PromptKind kind) {
    switch (kind) {
        case PromptKind::natural_titles: return "natural_titles";
        case PromptKind::structured_titles: return "structured_titles";
        case PromptKind::structured_keywords: return "structured_keywords";
        case PromptKind::structured_titles_keywords: return "structured_titles_keywords";
    }
    return "unknown";
}

inline PromptKind parse_prompt_kind(const std::string& s) {
    for (auto k : {PromptKind::natural_titles, PromptKind::structured_titles,
                   PromptKind::structured_keywords, PromptKind::structured_titles_keywords}) {
        if (to_string(k) == s) return k;
    }
    throw InvalidArgument("unknown prompt template kind '" + s + "'");
}

inline bool uses_titles(PromptKind k) { return k != PromptKind::structured_keywords; }
inline bool uses_keywords(PromptKind k) {
    return k == PromptKind::structured_keywords || k == PromptKind::structured_titles_keywords;
}

// A worked example for few-shot prompts: the fields its kind renders and
// the name it should produce.
struct Exemplar {
    std::vector<std::string> titles;
    std::vector<std::string> keywords;
    std::string target;
};

struct PromptTemplate {
    static constexpr std::size_t kKeywordCount = 10;

    PromptKind kind = PromptKind::natural_titles;
    std::optional<std::size_t> max_items;  // keep only the last N titles
    std::vector<Exemplar> exemplars;
};

// What a prompt needs from one journey.
struct JourneyView {
    std::vector<std::string> titles;  // history order
    ConceptVector representation;
};

inline JourneyView view_of(const JourneyCluster& journey, const ItemCorpus& corpus) {
    JourneyView v;
    for (const auto& id : journey.members) v.titles.push_back(corpus.at(id).title);
    v.representation = journey.representation;
    return v;
}

inline JourneyView view_of(const UserHistory& history) {
    JourneyView v;
    for (const auto& item : history.items) {
        v.titles.push_back(item.title);
        v.representation.accumulate(item.concepts);
    }
    return v;
}

namespace detail {

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

inline std::string render_fields(PromptKind kind, const std::vector<std::string>& titles,
                                 const std::vector<std::string>& keywords) {
    switch (kind) {
        case PromptKind::natural_titles:
            return "I consumed content with titles: " + join(titles, "; ") + ".";
        case PromptKind::structured_titles:
            return "titles: " + join(titles, "; ");
        case PromptKind::structured_keywords:
            return "keywords: " + join(keywords, ", ");
        case PromptKind::structured_titles_keywords:
            return "titles: " + join(titles, "; ") + " keywords: " + join(keywords, ", ");
    }
    return {};
}

inline std::string closing(PromptKind kind) {
    return kind == PromptKind::natural_titles ? "\nI would describe one of my interests as:"
                                              : " interest_journey:";
}

inline std::vector<std::string> keywords_of(const ConceptVector& rep) {
    std::vector<std::string> out;
    for (auto& [term, w] : top_terms(rep, PromptTemplate::kKeywordCount)) out.push_back(term);
    return out;
}

}  // namespace detail

inline constexpr std::string_view kGroupSeparator = "\n---\n";

/// Renders one or more journeys as a completion prompt. Exemplars come
/// first as completed blocks separated by blank lines; several journeys
/// share one query block, separated by a `---` line.
inline std::string build_prompt(const std::vector<JourneyView>& groups, const PromptTemplate& tmpl) {
    if (groups.empty()) throw InvalidArgument("build_prompt: no journey to name");
    for (const auto& g : groups) {
        if (g.titles.empty()) throw InvalidArgument("build_prompt: empty journey");
    }
    if (tmpl.max_items && *tmpl.max_items == 0) throw InvalidArgument("build_prompt: max_items must be >= 1");

    std::string out;
    for (const auto& ex : tmpl.exemplars) {
        if (uses_titles(tmpl.kind) && ex.titles.empty()) {
            throw InvalidArgument("build_prompt: exemplar lacks titles for " + to_string(tmpl.kind));
        }
        if (uses_keywords(tmpl.kind) && ex.keywords.empty()) {
            throw InvalidArgument("build_prompt: exemplar lacks keywords for " + to_string(tmpl.kind));
        }
        out += detail::render_fields(tmpl.kind, ex.titles, ex.keywords);
        out += detail::closing(tmpl.kind);
        out += " " + ex.target + "\n\n";
    }

    std::vector<std::string> blocks;
    for (const auto& g : groups) {
        std::vector<std::string> titles = g.titles;
        if (tmpl.max_items && titles.size() > *tmpl.max_items) {
            titles.erase(titles.begin(), titles.end() - static_cast<std::ptrdiff_t>(*tmpl.max_items));
        }
        std::vector<std::string> keywords;
        if (uses_keywords(tmpl.kind)) keywords = detail::keywords_of(g.representation);
        blocks.push_back(detail::render_fields(tmpl.kind, titles, keywords));
    }
    out += detail::join(blocks, kGroupSeparator);
    out += detail::closing(tmpl.kind);
    return out;
}

inline std::string build_prompt(const JourneyView& journey, const PromptTemplate& tmpl) {
    return build_prompt(std::vector<JourneyView>{journey}, tmpl);
}

struct NamingRequest {
    std::vector<JourneyView> groups;  // one for ordinary naming
    PromptTemplate tmpl;
};

struct NamingResult {
    std::string name;
    std::string prompt;
    std::string backend;
};

class NamingBackend {
public:
    virtual ~NamingBackend() = default;
    virtual std::string tag() const = 0;
    /// Produces the raw name for a request whose prompt is already built.
    virtual std::string generate(const NamingRequest& request, const std::string& prompt) = 0;
};

/// Deterministic stand-in for a language model: the top three terms of each
/// group's representation, groups separated by "; ".
class OfflineBackend : public NamingBackend {
public:
    static constexpr std::size_t kTermsPerName = 3;

    std::string tag() const override { return "offline"; }

    std::string generate(const NamingRequest& request, const std::string&) override {
        std::vector<std::string> names;
        for (const auto& g : request.groups) {
            std::vector<std::string> terms;
            for (auto& [term, w] : top_terms(g.representation, kTermsPerName)) terms.push_back(term);
            names.push_back(detail::join(terms, " "));
        }
        return detail::join(names, "; ");
    }
};

inline NamingResult name_journey(const NamingRequest& request, NamingBackend& backend) {
    NamingResult r;
    r.prompt = build_prompt(request.groups, request.tmpl);
    r.name = backend.generate(request, r.prompt);
    r.backend = backend.tag();
    return r;
}

struct ModeOutcome {
    std::vector<std::string> names;
    std::string candidate;  // names joined by spaces
    double score = 0.0;
    std::size_t calls = 0;
    std::vector<std::string> errors;
    bool partial = false;
};

struct NamingComparison {
    std::string reference;  // every history title joined by spaces
    ModeOutcome whole_history;
    ModeOutcome grouped_single_call;
    ModeOutcome per_journey;
};

/// Names one user's interests three ways: (1) one prompt over the whole
/// history, (2) one prompt over the extracted journeys, (3) one prompt per
/// extracted journey. Each is scored by BLEU of the joined names against
/// the joined history titles. Backend failures are recorded per call.
/// Per-journey calls run up to `max_in_flight` at a time; names keep
/// journey order.
inline NamingComparison compare_naming_modes(const UserHistory& history, const IcpcConfig& cfg,
                                             const PromptTemplate& tmpl, NamingBackend& backend,
                                             std::size_t max_in_flight = 1) {
    NamingComparison out;
    std::vector<std::string> titles;
    for (const auto& item : history.items) titles.push_back(item.title);
    out.reference = detail::join(titles, " ");

    const auto extraction = extract_journeys(history, cfg);
    std::unordered_map<std::string, const Item*> by_id;
    for (const auto& item : history.items) by_id.emplace(item.id, &item);
    std::vector<JourneyView> groups;
    for (const auto& j : extraction.journeys) {
        JourneyView v;
        for (const auto& id : j.members) v.titles.push_back(by_id.at(id)->title);
        v.representation = j.representation;
        groups.push_back(std::move(v));
    }

    const auto run = [&](ModeOutcome& mode, NamingRequest req) {
        ++mode.calls;
        try {
            mode.names.push_back(name_journey(req, backend).name);
        } catch (const BackendError& e) {
            mode.errors.push_back(e.what());
            mode.partial = true;
        }
    };
    const auto finish = [&](ModeOutcome& mode) {
        mode.candidate = detail::join(mode.names, " ");
        mode.score = bleu(mode.candidate, out.reference);
    };

    if (!history.items.empty()) run(out.whole_history, NamingRequest{{view_of(history)}, tmpl});
    finish(out.whole_history);

    if (!groups.empty()) run(out.grouped_single_call, NamingRequest{groups, tmpl});
    finish(out.grouped_single_call);

    auto& per = out.per_journey;
    const std::size_t cap = std::max<std::size_t>(1, max_in_flight);
    std::vector<std::optional<std::string>> names(groups.size());
    std::vector<std::optional<std::string>> errors(groups.size());
    for (std::size_t start = 0; start < groups.size(); start += cap) {
        const std::size_t stop = std::min(groups.size(), start + cap);
        std::vector<std::future<void>> pending;
        for (std::size_t g = start; g < stop; ++g) {
            auto task = [&, g] {
                try {
                    names[g] = name_journey(NamingRequest{{groups[g]}, tmpl}, backend).name;
                } catch (const BackendError& e) {
                    errors[g] = e.what();
                }
            };
            if (cap == 1) {
                task();
            } else {
                pending.push_back(std::async(std::launch::async, task));
            }
        }
        for (auto& f : pending) f.get();
    }
    per.calls = groups.size();
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (names[g]) per.names.push_back(*names[g]);
        if (errors[g]) {
            per.errors.push_back(*errors[g]);
            per.partial = true;
        }
    }
    finish(per);
    return out;
}

}  // namespace journeys
