#include "fixture.hpp"

#include "verifai/error.hpp"
#include "verifai/json_io.hpp"

#include <json.hpp>

#include <array>
#include <fstream>
#include <random>
#include <set>

namespace verifai::fixture {

namespace {

constexpr const char* kBackground[] = {
    "patients",   "cohort",     "clinical",    "trial",      "outcomes",   "treatment",  "therapy",
    "disease",    "risk",       "analysis",    "samples",    "protein",    "expression", "levels",
    "cells",      "tissue",     "response",    "dose",       "signal",     "pathway",    "gene",
    "variant",    "mutation",   "receptor",    "binding",    "activity",   "model",      "mice",
    "rats",       "human",      "adult",       "children",   "women",      "men",        "elderly",
    "hospital",   "survey",     "registry",    "baseline",   "followup",   "months",     "years",
    "week",       "median",     "mean",        "ratio",      "interval",   "confidence", "significant",
    "increase",   "decrease",   "reduced",     "elevated",   "higher",     "lower",      "associated",
    "correlated", "predicted",  "measured",    "observed",   "detected",   "assessed",   "compared",
    "randomized", "controlled", "placebo",     "group",      "arm",        "subjects",   "participants",
    "serum",      "plasma",     "urine",       "blood",      "liver",      "kidney",     "heart",
    "lung",       "brain",      "muscle",      "bone",       "skin",       "tumor",      "cancer",
    "infection",  "virus",      "bacteria",    "antibody",   "vaccine",    "immune",     "inflammation",
    "cytokine",   "marker",     "biomarker",   "imaging",    "scan",       "surgery",    "procedure",
    "device",     "drug",       "compound",    "inhibitor",  "agonist",    "enzyme",     "metabolism",
    "glucose",    "insulin",    "lipid",       "cholesterol","pressure",   "rate",       "volume",
    "mortality",  "morbidity",  "incidence",   "prevalence", "screening",  "diagnosis",  "prognosis",
    "recurrence", "remission",  "adverse",     "events",     "safety",     "efficacy",   "tolerability",
    "quality",    "life",       "score",       "scale",      "index",      "questionnaire", "interview",
    "population", "national",   "regional",    "urban",      "rural",      "primary",    "secondary",
    "care",       "nurses",     "physicians",  "guideline",  "protocol",   "review",     "evidence",
    "data",       "method",     "approach",    "framework",  "network",    "sequencing", "genome",
    "cellular",   "molecular",  "structural",  "functional", "chronic",    "acute",      "severe",
    "mild",       "moderate",   "early",       "late",       "novel",      "standard",
};

constexpr std::array<const char*, 24> kSyllables = {
    "zor", "vex", "quel", "brin", "tam", "ulo", "dax", "mir", "pol", "gen", "thra", "kiv",
    "nop", "sel", "fur", "bex", "lom", "ract", "yun", "cor", "vad", "isk", "plo", "meth",
};

/// (form used in documents, form used in the query)
constexpr std::array<std::pair<const char*, const char*>, 5> kInflections = {{
    {"ase", "ases"},
    {"ic", "ics"},
    {"in", "ins"},
    {"ol", "ols"},
    {"ide", "ides"},
}};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }
    const char* word() { return kBackground[below(std::size(kBackground))]; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::mt19937_64 gen_;
};

std::string invented_word(Rng& rng, std::set<std::string>& used) {
    for (;;) {
        std::string w;
        const auto n = 2 + rng.below(2);
        for (std::size_t i = 0; i < n; ++i) {
            w += kSyllables[rng.below(kSyllables.size())];
        }
        if (used.insert(w).second) {
            return w;
        }
    }
}

std::string capitalize(std::string s) {
    if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') {
        s[0] = static_cast<char>(s[0] - 'a' + 'A');
    }
    return s;
}

/// A sentence of background words with `inserts` placed at random positions.
std::string sentence(Rng& rng, std::size_t length, const std::vector<std::string>& inserts) {
    std::vector<std::string> words;
    for (std::size_t i = 0; i < length; ++i) {
        words.emplace_back(rng.word());
    }
    for (const auto& w : inserts) {
        words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng.below(words.size() + 1)), w);
    }
    std::string out;
    for (const auto& w : words) {
        out += (out.empty() ? "" : " ") + w;
    }
    return capitalize(out) + ".";
}

std::string title(Rng& rng, const std::vector<std::string>& inserts) {
    auto s = sentence(rng, 4 + rng.below(3), inserts);
    s.pop_back();
    return s;
}

Document make_doc(Rng& rng, std::string id, const std::vector<std::string>& title_terms,
                  const std::vector<std::vector<std::string>>& sentence_terms) {
    Document d;
    d.doc_id = std::move(id);
    d.title = title(rng, title_terms);
    const auto sentences = std::max<std::size_t>(3 + rng.below(2), sentence_terms.size());
    for (std::size_t i = 0; i < sentences; ++i) {
        static const std::vector<std::string> none;
        const auto& inserts = i < sentence_terms.size() ? sentence_terms[i] : none;
        d.abstract += (d.abstract.empty() ? "" : " ") + sentence(rng, 7 + rng.below(5), inserts);
    }
    d.authors = {capitalize(std::string(rng.word())) + " A", capitalize(std::string(rng.word())) + " B"};
    if (rng.below(2) == 0) {
        d.journal = "Journal of " + capitalize(std::string(rng.word()));
    }
    d.pub_date = std::to_string(2000 + rng.below(24));
    return d;
}

} // namespace

Fixture make_fixture(const FixtureOptions& options) {
    Rng rng(options.seed);
    Fixture f;
    std::set<std::string> used(std::begin(kBackground), std::end(kBackground));
    std::size_t next_id = 0;
    const auto new_id = [&] { return std::to_string(21000000 + 4099 * next_id++); };

    for (std::size_t q = 0; q < options.keyword_queries; ++q) {
        const auto rare = invented_word(rng, used);
        QueryEntry entry;
        entry.query_id = "kw-" + std::to_string(q + 1);
        entry.body = "What is known about " + rare + " in " + rng.word() + " " + rng.word() + "?";
        entry.type = "factoid";
        for (std::size_t r = 0; r < options.relevant_per_query; ++r) {
            auto doc = make_doc(rng, new_id(), {}, {{}, {rare}});
            entry.relevant_ids.insert(doc.doc_id);
            f.docs.push_back(std::move(doc));
        }
        entry.ideal_answer = capitalize(rare) + " is reported in the " + std::to_string(options.relevant_per_query) +
                             " studies that name it.";
        f.queries.push_back(std::move(entry));
    }

    for (std::size_t q = 0; q < options.paraphrase_queries; ++q) {
        std::vector<std::string> doc_forms;
        std::vector<std::string> query_forms;
        for (std::size_t t = 0; t < 3; ++t) {
            const auto stem = invented_word(rng, used);
            const auto& [doc_suffix, query_suffix] = kInflections[rng.below(kInflections.size())];
            doc_forms.push_back(stem + doc_suffix);
            query_forms.push_back(stem + query_suffix);
            used.insert(doc_forms.back());
            used.insert(query_forms.back());
        }
        QueryEntry entry;
        entry.query_id = "pp-" + std::to_string(q + 1);
        entry.body = "What about " + query_forms[0] + " and " + query_forms[1] + " with " + query_forms[2] + "?";
        entry.type = "summary";
        for (std::size_t r = 0; r < options.relevant_per_query; ++r) {
            auto doc = make_doc(rng, new_id(), {doc_forms[0]},
                                {{doc_forms[1], doc_forms[2]}, {doc_forms[0], doc_forms[2]}, {doc_forms[1]}});
            entry.relevant_ids.insert(doc.doc_id);
            f.docs.push_back(std::move(doc));
        }
        entry.ideal_answer = capitalize(doc_forms[0]) + " occurs together with " + doc_forms[1] + " and " +
                             doc_forms[2] + ".";
        f.queries.push_back(std::move(entry));
    }

    for (std::size_t i = 0; i < options.distractors; ++i) {
        f.docs.push_back(make_doc(rng, new_id(), {}, {}));
    }
    rng.shuffle(f.docs);
    return f;
}

void write_fixture(const Fixture& fixture, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream corpus(dir / "corpus.jsonl");
    for (const auto& d : fixture.docs) {
        corpus << document_to_json(d).dump() << '\n';
    }
    std::ofstream queries(dir / "queries.jsonl");
    for (const auto& q : fixture.queries) {
        nlohmann::json j{{"query_id", q.query_id}, {"body", q.body}, {"relevant_ids", q.relevant_ids}};
        if (q.type) {
            j["type"] = *q.type;
        }
        if (q.ideal_answer) {
            j["ideal_answer"] = *q.ideal_answer;
        }
        queries << j.dump() << '\n';
    }
    if (!corpus || !queries) {
        throw Error(ErrorKind::internal, "cannot write fixture into " + dir.string());
    }
}

BundleOptions fixture_bundle_options() {
    BundleOptions o;
    o.embedder.dimension = kFixtureDimension;
    return o;
}

IndexBundle build_fixture_index(const Fixture& fixture) {
    const auto options = fixture_bundle_options();
    auto embedder = make_embedder(options.embedder, options.analyzer);
    return IndexBundle::build(fixture.docs, options, *embedder);
}

} // namespace verifai::fixture
