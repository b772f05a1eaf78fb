#include "verifai/verification.hpp"

#include "verifai/analyzer.hpp"
#include "verifai/error.hpp"
#include "verifai/simd/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <set>
#include <thread>
#include <unordered_set>

namespace verifai {

const std::string_view kNliInstruction =
    "Critically asses whether the statement is supported, contradicted or there is no evidence for the "
    "statement in the given abstract. Output SUPPORT if the statement is supported by the abstract. Output "
    "CONTRADICT if statement is in contradiction with the abstract and output NO_EVIDENCE if there is no "
    "evidence for the statement in the abstract.";

namespace {

constexpr int kNliMaxTokens = 350;

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_word_byte(char c) noexcept {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

/// Replaces citation markers with spaces so they do not leak into term matching.
std::string strip_citations(std::string_view text) {
    std::string out(text);
    for (const auto& c : extract_citations(text)) {
        std::fill(out.begin() + static_cast<std::ptrdiff_t>(c.span.begin),
                  out.begin() + static_cast<std::ptrdiff_t>(c.span.end), ' ');
    }
    return out;
}

std::string crude_stem(std::string term) {
    for (std::string_view suffix : {"ing", "ed", "es", "s"}) {
        if (term.size() >= suffix.size() + 3 && term.ends_with(suffix)) {
            term.erase(term.size() - suffix.size());
            break;
        }
    }
    if (term.size() > 3 && term.back() == 'e') {
        term.pop_back();
    }
    return term;
}

std::set<std::string> content_terms(std::string_view text) {
    static const AnalyzerConfig config;
    std::set<std::string> out;
    for (auto& t : analyze(text, config)) {
        out.insert(crude_stem(std::move(t)));
    }
    return out;
}

bool has_negation(std::string_view text) {
    static const std::set<std::string, std::less<>> cues = {
        "not", "no", "never", "without", "neither", "nor", "cannot", "none", "fails", "failed", "lack", "lacks",
    };
    auto low = lower_ascii(text);
    std::size_t i = 0;
    while (i < low.size()) {
        while (i < low.size() && !std::isalpha(static_cast<unsigned char>(low[i]))) {
            ++i;
        }
        std::size_t j = i;
        while (j < low.size() && (std::isalpha(static_cast<unsigned char>(low[j])) || low[j] == '\'')) {
            ++j;
        }
        if (j > i) {
            std::string_view word(low.data() + i, j - i);
            if (cues.count(word) != 0 || word.ends_with("n't")) {
                return true;
            }
        }
        i = j;
    }
    return false;
}

bool has_word(std::string_view lower_text, std::string_view lower_word) {
    for (std::size_t pos = lower_text.find(lower_word); pos != std::string_view::npos;
         pos = lower_text.find(lower_word, pos + 1)) {
        bool left_ok = pos == 0 || !is_word_byte(lower_text[pos - 1]);
        std::size_t end = pos + lower_word.size();
        bool right_ok = end >= lower_text.size() || !is_word_byte(lower_text[end]);
        if (left_ok && right_ok) {
            return true;
        }
    }
    return false;
}

} // namespace

const char* to_string(NliLabel label) noexcept {
    switch (label) {
    case NliLabel::support: return "SUPPORT";
    case NliLabel::contradict: return "CONTRADICT";
    case NliLabel::no_evidence: return "NO_EVIDENCE";
    }
    return "NO_EVIDENCE";
}

std::optional<NliLabel> parse_nli_label(std::string_view text) {
    auto low = lower_ascii(trim(text));
    if (low == "support" || low == "supports") {
        return NliLabel::support;
    }
    if (low == "contradict" || low == "contradicts" || low == "contradiction") {
        return NliLabel::contradict;
    }
    if (low == "no_evidence" || low == "no evidence" || low == "noevidence" || low == "neutral") {
        return NliLabel::no_evidence;
    }
    return std::nullopt;
}

const char* to_string(ClaimStatus status) noexcept {
    switch (status) {
    case ClaimStatus::supported: return "Supported";
    case ClaimStatus::partially_supported: return "PartiallySupported";
    case ClaimStatus::contradicted: return "Contradicted";
    case ClaimStatus::unreferenced: return "Unreferenced";
    case ClaimStatus::unverified: return "Unverified";
    }
    return "Unverified";
}

NliResult parse_nli_completion(std::string_view completion) {
    auto t = trim(completion);
    while (!t.empty() && !is_word_byte(t.front())) {
        t.remove_prefix(1);
    }
    while (!t.empty() && !is_word_byte(t.back())) {
        t.remove_suffix(1);
    }
    if (auto exact = parse_nli_label(t)) {
        return {*exact, 1.0, false};
    }
    const auto low = lower_ascii(completion);
    std::set<NliLabel> found;
    if (has_word(low, "no_evidence") || has_word(low, "no evidence")) {
        found.insert(NliLabel::no_evidence);
    }
    if (has_word(low, "contradict")) {
        found.insert(NliLabel::contradict);
    }
    if (has_word(low, "support")) {
        found.insert(NliLabel::support);
    }
    if (found.size() == 1) {
        return {*found.begin(), 1.0, false};
    }
    return {NliLabel::no_evidence, 0.0, true};
}

NliResult StubNliBackend::classify(std::string_view claim, std::string_view evidence) const {
    const auto claim_terms = content_terms(strip_citations(claim));
    if (claim_terms.empty()) {
        return {NliLabel::no_evidence, 1.0, false};
    }
    double best = 0.0;
    std::string_view best_sentence;
    for (const auto& s : split_sentences(evidence)) {
        const auto sentence = s.of(evidence);
        const auto terms = content_terms(sentence);
        std::size_t shared = 0;
        for (const auto& t : claim_terms) {
            shared += terms.count(t);
        }
        const double coverage = static_cast<double>(shared) / static_cast<double>(claim_terms.size());
        if (coverage > best) {
            best = coverage;
            best_sentence = sentence;
        }
    }
    if (best < min_coverage_) {
        return {NliLabel::no_evidence, 1.0 - best, false};
    }
    if (has_negation(best_sentence) != has_negation(claim)) {
        return {NliLabel::contradict, best, false};
    }
    return {NliLabel::support, best, false};
}

HttpClassifierNliBackend::HttpClassifierNliBackend(HttpBackendConfig config) : config_(std::move(config)) {
    parse_url(config_.url);
}

NliResult HttpClassifierNliBackend::classify(std::string_view claim, std::string_view evidence) const {
    nlohmann::json body{{"claim", claim}, {"evidence", evidence}};
    if (!config_.model.empty()) {
        body["model"] = config_.model;
    }
    auto response = post_json("nli", config_, body);
    NliResult out;
    try {
        auto label = parse_nli_label(response.at("label").get<std::string>());
        if (!label) {
            return {NliLabel::no_evidence, 0.0, true};
        }
        out.label = *label;
        out.confidence = response.value("confidence", 1.0);
    } catch (const nlohmann::json::exception&) {
        return {NliLabel::no_evidence, 0.0, true};
    }
    return out;
}

ChatNliBackend::ChatNliBackend(const GenerationBackend& chat, std::string instruction)
    : chat_(&chat), instruction_(std::move(instruction)) {}

ChatRequest ChatNliBackend::request_for(std::string_view claim, std::string_view evidence) const {
    ChatRequest req;
    req.messages.push_back({"system", instruction_});
    std::string user = "Statement: ";
    user.append(claim).append("\nAbstract: ").append(evidence);
    req.messages.push_back({"user", std::move(user)});
    req.max_tokens = kNliMaxTokens;
    req.temperature = 0.0;
    req.repetition_penalty = 1.0;
    return req;
}

NliResult ChatNliBackend::classify(std::string_view claim, std::string_view evidence) const {
    return parse_nli_completion(chat_->complete(request_for(claim, evidence)));
}

std::vector<Claim> segment_claims(std::string_view text) {
    std::vector<Claim> claims;
    const auto citations = extract_citations(text);
    for (const auto& s : split_sentences(text)) {
        std::vector<std::string> ids;
        std::string residue(s.of(text));
        for (const auto& c : citations) {
            if (c.span.begin >= s.begin && c.span.begin < s.end) {
                if (std::find(ids.begin(), ids.end(), c.doc_id) == ids.end()) {
                    ids.push_back(c.doc_id);
                }
                const auto b = c.span.begin - s.begin;
                const auto e = std::min(c.span.end, s.end) - s.begin;
                std::fill(residue.begin() + static_cast<std::ptrdiff_t>(b),
                          residue.begin() + static_cast<std::ptrdiff_t>(e), ' ');
            }
        }
        const bool citation_only =
            !ids.empty() && std::none_of(residue.begin(), residue.end(),
                                         [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; });
        if (citation_only && !claims.empty()) {
            auto& prev = claims.back();
            prev.span.end = s.end;
            prev.text = std::string(prev.span.of(text));
            for (auto& id : ids) {
                if (std::find(prev.cited_ids.begin(), prev.cited_ids.end(), id) == prev.cited_ids.end()) {
                    prev.cited_ids.push_back(std::move(id));
                }
            }
            continue;
        }
        claims.push_back(Claim{std::string(s.of(text)), s, std::move(ids)});
    }
    return claims;
}

std::vector<Claim> segment_claims(const GeneratedAnswer& answer) {
    return segment_claims(answer.text);
}

Pairing pair_claims(std::span<const Claim> claims, const DocumentStore& store) {
    Pairing out;
    for (std::size_t i = 0; i < claims.size(); ++i) {
        for (const auto& id : claims[i].cited_ids) {
            if (const auto* doc = store.find(id)) {
                out.pairs.push_back(EvidencePair{i, id, merge_title_abstract(*doc)});
            } else if (std::find(out.unresolved_ids.begin(), out.unresolved_ids.end(), id) == out.unresolved_ids.end()) {
                out.unresolved_ids.push_back(id);
            }
        }
    }
    return out;
}

NliResult classify(const EvidencePair& pair, std::string_view claim_text, const NliBackend& backend) {
    if (is_blank(claim_text) || is_blank(pair.evidence)) {
        throw_invalid("nli needs a non-empty claim and evidence");
    }
    return backend.classify(claim_text, pair.evidence);
}

Aggregate aggregate(std::span<const NliLabel> labels) {
    const auto count = [&](NliLabel l) { return std::count(labels.begin(), labels.end(), l); };
    const auto n = static_cast<std::ptrdiff_t>(labels.size());
    if (n > 0 && count(NliLabel::support) == n) {
        return {ClaimStatus::supported, false};
    }
    if (count(NliLabel::contradict) > 0) {
        return {ClaimStatus::contradicted, false};
    }
    if (count(NliLabel::support) > 0) {
        return {ClaimStatus::partially_supported, false};
    }
    return {ClaimStatus::partially_supported, true};
}

std::pair<std::string, double> closest_sentence(std::string_view claim, std::string_view evidence,
                                                const Embedder& embedder) {
    const auto sentences = split_sentences(evidence);
    if (sentences.empty()) {
        throw_invalid("closest_sentence needs non-empty evidence");
    }
    const auto q = embedder.embed(claim);
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        const auto v = embedder.embed(sentences[i].of(evidence));
        const double s = simd::dot(std::span<const float>(q), std::span<const float>(v));
        if (i == 0 || s > best_score) {
            best = i;
            best_score = s;
        }
    }
    return {std::string(sentences[best].of(evidence)), best_score};
}

std::vector<std::string> detect_hallucinated_ids(const GeneratedAnswer& answer) {
    const std::unordered_set<std::string> context(answer.context_ids.begin(), answer.context_ids.end());
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& c : answer.citations) {
        if (context.count(c.doc_id) == 0 && seen.insert(c.doc_id).second) {
            out.push_back(c.doc_id);
        }
    }
    return out;
}

VerificationReport verify_answer(const GeneratedAnswer& answer, const DocumentStore& store, const NliBackend& nli,
                                 const Embedder& embedder, const VerifyOptions& options) {
    VerificationReport report;
    auto claims = segment_claims(answer);
    auto pairing = pair_claims(claims, store);

    report.hallucinated_ids = detect_hallucinated_ids(answer);
    for (const auto& id : pairing.unresolved_ids) {
        if (std::find(report.hallucinated_ids.begin(), report.hallucinated_ids.end(), id) ==
            report.hallucinated_ids.end()) {
            report.hallucinated_ids.push_back(id);
        }
    }

    std::vector<std::string> claim_texts;
    claim_texts.reserve(claims.size());
    for (const auto& c : claims) {
        claim_texts.push_back(std::string(trim(strip_citations(c.text))));
    }

    std::vector<PairLabel> labels(pairing.pairs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < pairing.pairs.size(); i = next.fetch_add(1)) {
            const auto& pair = pairing.pairs[i];
            auto& out = labels[i];
            out.doc_id = pair.doc_id;
            try {
                auto r = classify(pair, claim_texts[pair.claim_index], nli);
                out.label = r.label;
                out.confidence = r.confidence;
                out.parse_warning = r.parse_warning;
            } catch (const std::exception& e) {
                out.label = NliLabel::no_evidence;
                out.error = e.what();
            }
        }
    };
    const std::size_t threads = std::min(std::max<std::size_t>(options.max_in_flight, 1), pairing.pairs.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }

    const std::unordered_set<std::string> hallucinated(report.hallucinated_ids.begin(), report.hallucinated_ids.end());
    report.claims.reserve(claims.size());
    for (std::size_t ci = 0; ci < claims.size(); ++ci) {
        ClaimVerdict v;
        v.claim = std::move(claims[ci]);
        std::vector<NliLabel> claim_labels;
        bool parse_warning = false;
        bool backend_error = false;
        for (std::size_t pi = 0; pi < pairing.pairs.size(); ++pi) {
            if (pairing.pairs[pi].claim_index != ci) {
                continue;
            }
            v.pair_labels.push_back(labels[pi]);
            claim_labels.push_back(labels[pi].label);
            parse_warning = parse_warning || labels[pi].parse_warning;
            backend_error = backend_error || labels[pi].error.has_value();
        }
        if (v.claim.cited_ids.empty()) {
            v.status = ClaimStatus::unreferenced;
        } else {
            auto agg = aggregate(claim_labels);
            v.status = agg.status;
            if (agg.no_evidence) {
                v.flags.emplace_back("no_evidence");
            }
        }
        if (parse_warning) {
            v.flags.emplace_back("parse_warning");
        }
        if (backend_error) {
            v.flags.emplace_back("backend_error");
        }
        if (std::any_of(v.claim.cited_ids.begin(), v.claim.cited_ids.end(),
                        [&](const std::string& id) { return hallucinated.count(id) != 0; })) {
            v.flags.emplace_back("hallucinated_citation");
        }
        if (options.find_closest && !is_blank(claim_texts[ci])) {
            for (const auto& pair : pairing.pairs) {
                if (pair.claim_index != ci || is_blank(pair.evidence)) {
                    continue;
                }
                auto [sentence, sim] = closest_sentence(claim_texts[ci], pair.evidence, embedder);
                if (!v.closest || sim > v.closest->similarity) {
                    v.closest = ClosestSentence{pair.doc_id, std::move(sentence), sim};
                }
            }
        }
        report.claims.push_back(std::move(v));
    }
    return report;
}

VerificationReport unverified_report(const GeneratedAnswer& answer) {
    VerificationReport report;
    for (auto& c : segment_claims(answer)) {
        ClaimVerdict v;
        v.claim = std::move(c);
        v.status = ClaimStatus::unverified;
        report.claims.push_back(std::move(v));
    }
    report.hallucinated_ids = detect_hallucinated_ids(answer);
    return report;
}

} // namespace verifai
