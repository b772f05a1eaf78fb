#include "verifai/evaluation.hpp"

#include "verifai/analyzer.hpp"
#include "verifai/error.hpp"
#include "verifai/json_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_set>

namespace verifai {

namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string pad_right(std::string s, std::size_t width) {
    if (s.size() < width) {
        s.append(width - s.size(), ' ');
    }
    return s;
}

std::string pad_left(std::string s, std::size_t width) {
    if (s.size() < width) {
        s.insert(0, width - s.size(), ' ');
    }
    return s;
}

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::not_found, "cannot open " + path.string());
    }
    return in;
}

std::size_t depth(std::size_t k, std::size_t size) {
    return std::min(k, size);
}

double safe_div(double a, double b) {
    return b == 0.0 ? 0.0 : a / b;
}

} // namespace

QuerySet load_queryset(std::istream& in) {
    QuerySet out;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) {
            continue;
        }
        QueryEntry q;
        try {
            auto j = nlohmann::json::parse(line);
            const auto& id = j.at("query_id");
            q.query_id = id.is_string() ? id.get<std::string>() : id.dump();
            q.body = j.at("body").get<std::string>();
            for (const auto& r : j.at("relevant_ids")) {
                q.relevant_ids.insert(r.is_string() ? r.get<std::string>() : r.dump());
            }
            if (auto t = j.find("type"); t != j.end() && t->is_string()) {
                q.type = t->get<std::string>();
            }
            if (auto a = j.find("ideal_answer"); a != j.end() && a->is_string()) {
                q.ideal_answer = a->get<std::string>();
            }
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::invalid_input,
                        "query set line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!seen.insert(q.query_id).second) {
            throw Error(ErrorKind::invalid_input,
                        "duplicate query_id " + q.query_id + " on line " + std::to_string(line_no));
        }
        out.push_back(std::move(q));
    }
    return out;
}

QuerySet load_queryset(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    return load_queryset(in);
}

double precision_rel_norm(std::span<const std::string> retrieved, const std::set<std::string>& relevant,
                          std::size_t k, std::vector<std::string>* warnings) {
    if (relevant.empty()) {
        if (warnings != nullptr) {
            warnings->emplace_back("query without relevant documents scores 0");
        }
        return 0.0;
    }
    std::size_t hits = 0;
    const auto n = depth(k, retrieved.size());
    for (std::size_t i = 0; i < n; ++i) {
        hits += relevant.count(retrieved[i]);
    }
    return static_cast<double>(hits) / static_cast<double>(depth(k, relevant.size()));
}

double average_precision(std::span<const std::string> retrieved, const std::set<std::string>& relevant,
                         std::size_t k) {
    if (relevant.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    std::size_t hits = 0;
    const auto n = depth(k, retrieved.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (relevant.count(retrieved[i]) != 0) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(depth(k, relevant.size()));
}

double map_rel_norm(std::span<const Run> runs, std::size_t k) {
    if (runs.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (const auto& r : runs) {
        sum += average_precision(r.retrieved, r.relevant, k);
    }
    return sum / static_cast<double>(runs.size());
}

std::size_t report_index(NliLabel label) noexcept {
    switch (label) {
    case NliLabel::no_evidence: return 0;
    case NliLabel::support: return 1;
    case NliLabel::contradict: return 2;
    }
    return 0;
}

ClassReport report_from_confusion(const std::array<std::array<std::size_t, 3>, 3>& confusion) {
    ClassReport r;
    r.confusion = confusion;
    std::size_t trace = 0;
    for (std::size_t g = 0; g < 3; ++g) {
        for (std::size_t p = 0; p < 3; ++p) {
            r.total += confusion[g][p];
        }
        trace += confusion[g][g];
    }
    if (r.total == 0) {
        throw_invalid("classification report needs at least one pair");
    }
    for (std::size_t c = 0; c < 3; ++c) {
        std::size_t predicted = 0;
        std::size_t gold = 0;
        for (std::size_t i = 0; i < 3; ++i) {
            predicted += confusion[i][c];
            gold += confusion[c][i];
        }
        auto& m = r.per_class[c];
        m.support = gold;
        m.precision = safe_div(static_cast<double>(confusion[c][c]), static_cast<double>(predicted));
        m.recall = safe_div(static_cast<double>(confusion[c][c]), static_cast<double>(gold));
        m.f1 = safe_div(2.0 * m.precision * m.recall, m.precision + m.recall);
        const double w = static_cast<double>(gold) / static_cast<double>(r.total);
        r.weighted.precision += w * m.precision;
        r.weighted.recall += w * m.recall;
        r.weighted.f1 += w * m.f1;
    }
    r.weighted.support = r.total;
    r.accuracy = static_cast<double>(trace) / static_cast<double>(r.total);
    return r;
}

ClassReport nli_report(std::span<const NliLabel> predictions, std::span<const NliLabel> gold) {
    if (predictions.size() != gold.size()) {
        throw_invalid("nli_report: " + std::to_string(predictions.size()) + " predictions but " +
                      std::to_string(gold.size()) + " gold labels");
    }
    if (gold.empty()) {
        throw_invalid("nli_report needs at least one pair");
    }
    std::array<std::array<std::size_t, 3>, 3> confusion{};
    for (std::size_t i = 0; i < gold.size(); ++i) {
        ++confusion[report_index(gold[i])][report_index(predictions[i])];
    }
    return report_from_confusion(confusion);
}

std::string format_report(const ClassReport& report) {
    std::ostringstream out;
    out << pad_right("label", 12) << pad_left("precision", 10) << pad_left("recall", 10) << pad_left("f1", 10)
        << pad_left("support", 9) << '\n';
    const auto row = [&](const std::string& name, const ClassMetrics& m) {
        out << pad_right(name, 12) << pad_left(fixed(m.precision, 4), 10) << pad_left(fixed(m.recall, 4), 10)
            << pad_left(fixed(m.f1, 4), 10) << pad_left(std::to_string(m.support), 9) << '\n';
    };
    for (std::size_t c = 0; c < 3; ++c) {
        row(to_string(kReportLabels[c]), report.per_class[c]);
    }
    row("wa", report.weighted);
    out << "accuracy " << fixed(report.accuracy, 4) << " (" << report.total << " pairs)\n";
    out << "confusion (rows gold, columns predicted: NE S C)\n";
    for (std::size_t g = 0; g < 3; ++g) {
        out << pad_right(to_string(kReportLabels[g]), 12);
        for (std::size_t p = 0; p < 3; ++p) {
            out << pad_left(std::to_string(report.confusion[g][p]), 6);
        }
        out << '\n';
    }
    return out.str();
}

std::vector<AnswerRecord> load_answers(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    std::vector<AnswerRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) {
            continue;
        }
        try {
            auto j = nlohmann::json::parse(line);
            AnswerRecord rec;
            if (auto id = j.find("query_id"); id != j.end()) {
                rec.query_id = id->is_string() ? id->get<std::string>() : id->dump();
            }
            rec.answer = answer_from_json(j);
            out.push_back(std::move(rec));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::invalid_input, path.string() + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

RefStats reference_stats(std::span<const AnswerRecord> answers, const std::map<std::string, std::string>* most_relevant) {
    RefStats s;
    s.answers_total = answers.size();
    std::map<std::size_t, std::size_t> per_count;
    for (const auto& rec : answers) {
        const auto ids = rec.answer.cited_ids();
        const std::unordered_set<std::string> distinct(ids.begin(), ids.end());
        if (distinct.empty()) {
            ++s.answers_no_references;
        }
        ++per_count[distinct.size()];
        s.hallucinated_id_count += detect_hallucinated_ids(rec.answer).size();
        if (most_relevant != nullptr) {
            if (auto it = most_relevant->find(rec.query_id); it != most_relevant->end()) {
                if (distinct.count(it->second) == 0) {
                    ++s.missed_most_relevant_count;
                }
            }
        }
    }
    for (const auto& [count, freq] : per_count) {
        if (freq > s.modal_reference_frequency) {
            s.modal_reference_count = count;
            s.modal_reference_frequency = freq;
        }
    }
    return s;
}

std::string format_ref_stats(const RefStats& s) {
    std::ostringstream out;
    out << "answers_total              " << s.answers_total << '\n'
        << "answers_no_references      " << s.answers_no_references << '\n'
        << "hallucinated_id_count      " << s.hallucinated_id_count << '\n'
        << "modal_reference_count      " << s.modal_reference_count << '\n'
        << "modal_reference_frequency  " << s.modal_reference_frequency << '\n'
        << "missed_most_relevant_count " << s.missed_most_relevant_count << '\n';
    return out.str();
}

const std::string_view kJudgeInstruction =
    "Compare the sample answer to the ideal answer. The sample answer can be more detailed as long as it "
    "contains all the information from the ideal answer. Include this information in your comparison: 1. Do "
    "the answers come to the same general conclusion? Answer with YES or NO, under the variable "
    "SAME_CONCLUSION. 2. Does the sample answer contain all the information covered by the ideal answer? "
    "Answer with YES or NO under the variable ALL_INFO. If the answer is NO to any of these questions, say what "
    "exactly is missing in the sample answer. Ignore the PMIDs in the sample answer. Calculate the percentage of "
    "crucial information from the ideal answer that is covered in the sample answer (with max of 100%) and "
    "state it under the variable PERC_IDEAL. Explain your calculation.";

namespace {

/// Text after the first occurrence of `name` in the line, with separators
/// and emphasis stripped; falls through to the next non-blank line when the
/// rest of the line is empty.
std::optional<std::string> judge_value(const std::vector<std::string>& lines, std::string_view name) {
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto low = lower_ascii(lines[i]);
        const auto pos = low.find(name);
        if (pos == std::string::npos) {
            continue;
        }
        auto rest = std::string_view(lines[i]).substr(pos + name.size());
        const auto skip = [](std::string_view s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == ':' || s.front() == '=' ||
                                  s.front() == '*' || s.front() == '_' || s.front() == '`' || s.front() == '"')) {
                s.remove_prefix(1);
            }
            return s;
        };
        rest = skip(rest);
        if (rest.empty()) {
            for (std::size_t j = i + 1; j < lines.size(); ++j) {
                auto next = skip(trim(lines[j]));
                if (!next.empty()) {
                    return std::string(next);
                }
            }
            return std::nullopt;
        }
        return std::string(rest);
    }
    return std::nullopt;
}

std::optional<bool> parse_yes_no(const std::optional<std::string>& value) {
    if (!value) {
        return std::nullopt;
    }
    const auto low = lower_ascii(*value);
    if (low.starts_with("yes")) {
        return true;
    }
    if (low.starts_with("no")) {
        return false;
    }
    return std::nullopt;
}

std::optional<double> parse_percentage(const std::optional<std::string>& value) {
    if (!value || value->empty()) {
        return std::nullopt;
    }
    const char* begin = value->c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

std::set<std::string> judge_terms(std::string_view text) {
    std::string cleaned(text);
    for (const auto& c : extract_citations(text)) {
        std::fill(cleaned.begin() + static_cast<std::ptrdiff_t>(c.span.begin),
                  cleaned.begin() + static_cast<std::ptrdiff_t>(c.span.end), ' ');
    }
    static const AnalyzerConfig config;
    auto terms = analyze(cleaned, config);
    return {terms.begin(), terms.end()};
}

} // namespace

JudgeVerdict parse_judge_completion(std::string_view completion) {
    JudgeVerdict v;
    v.raw_completion = std::string(completion);
    std::vector<std::string> lines;
    std::istringstream in{std::string(completion)};
    for (std::string line; std::getline(in, line);) {
        lines.push_back(std::move(line));
    }
    v.same_conclusion = parse_yes_no(judge_value(lines, "same_conclusion"));
    v.all_info = parse_yes_no(judge_value(lines, "all_info"));
    v.perc_ideal = parse_percentage(judge_value(lines, "perc_ideal"));
    if (!v.same_conclusion) {
        v.problems.emplace_back("SAME_CONCLUSION missing or not YES/NO");
    }
    if (!v.all_info) {
        v.problems.emplace_back("ALL_INFO missing or not YES/NO");
    }
    if (!v.perc_ideal) {
        v.problems.emplace_back("PERC_IDEAL missing or not a number");
    } else if (*v.perc_ideal < 0.0 || *v.perc_ideal > 100.0) {
        v.problems.emplace_back("PERC_IDEAL outside [0, 100]: " + fixed(*v.perc_ideal, 2));
    }
    v.parsed = v.problems.empty();
    return v;
}

ChatRequest judge_request(std::string_view sample_answer, std::string_view ideal_answer) {
    ChatRequest req;
    req.messages.push_back({"system", std::string(kJudgeInstruction)});
    std::string user = "Sample answer:\n";
    user.append(trim(sample_answer)).append("\n\nIdeal answer:\n").append(trim(ideal_answer));
    req.messages.push_back({"user", std::move(user)});
    req.temperature = 0.0;
    req.max_tokens = 1024;
    return req;
}

JudgeVerdict judge_compare(std::string_view sample_answer, std::string_view ideal_answer,
                           const GenerationBackend& backend) {
    if (is_blank(ideal_answer)) {
        throw_invalid("judge needs a non-empty ideal answer");
    }
    return parse_judge_completion(backend.complete(judge_request(sample_answer, ideal_answer)));
}

std::string StubJudgeBackend::complete(const ChatRequest& request) const {
    std::string_view user;
    for (const auto& m : request.messages) {
        if (m.role == "user") {
            user = m.content;
        }
    }
    constexpr std::string_view sample_tag = "Sample answer:\n";
    constexpr std::string_view ideal_tag = "\n\nIdeal answer:\n";
    const auto s = user.find(sample_tag);
    const auto i = user.rfind(ideal_tag);
    if (s == std::string_view::npos || i == std::string_view::npos || i < s) {
        return "Unable to locate both answers.";
    }
    const auto sample = judge_terms(user.substr(s + sample_tag.size(), i - s - sample_tag.size()));
    const auto ideal = judge_terms(user.substr(i + ideal_tag.size()));
    std::size_t covered = 0;
    for (const auto& t : ideal) {
        covered += sample.count(t);
    }
    const double perc = ideal.empty() ? 100.0 : 100.0 * static_cast<double>(covered) / static_cast<double>(ideal.size());
    std::string out = "SAME_CONCLUSION: ";
    out.append(perc >= 50.0 ? "YES" : "NO");
    out.append("\nALL_INFO: ").append(covered == ideal.size() ? "YES" : "NO");
    out.append("\nPERC_IDEAL: ").append(fixed(perc, 1)).append("%\n");
    out.append(std::to_string(covered) + " of " + std::to_string(ideal.size()) +
               " content terms of the ideal answer appear in the sample answer.");
    return out;
}

const char* to_string(RetrievalMode mode) noexcept {
    switch (mode) {
    case RetrievalMode::lexical: return "lexical";
    case RetrievalMode::semantic: return "semantic";
    case RetrievalMode::hybrid: return "hybrid";
    }
    return "hybrid";
}

RetrievalMode parse_retrieval_mode(std::string_view text) {
    if (text == "lexical") {
        return RetrievalMode::lexical;
    }
    if (text == "semantic") {
        return RetrievalMode::semantic;
    }
    if (text == "hybrid") {
        return RetrievalMode::hybrid;
    }
    throw_invalid("unknown retrieval mode '" + std::string(text) + "' (lexical, semantic, hybrid)");
}

std::vector<std::string> retrieve_ids(const HybridRetriever& retriever, const IrConfiguration& config,
                                      std::string_view query, std::size_t k) {
    SearchOutcome outcome;
    switch (config.mode) {
    case RetrievalMode::lexical:
        outcome = retriever.lexical(query, k, config.options.remove_query_stopwords);
        break;
    case RetrievalMode::semantic:
        outcome = retriever.semantic(query, k, config.options.rescore);
        break;
    case RetrievalMode::hybrid: {
        auto opts = config.options;
        opts.k = k;
        outcome = retriever.hybrid(query, opts);
        break;
    }
    }
    std::vector<std::string> ids;
    ids.reserve(outcome.hits.size());
    for (auto& h : outcome.hits) {
        ids.push_back(std::move(h.doc_id));
    }
    return ids;
}

IrReport evaluate_ir(const QuerySet& queries, const HybridRetriever& retriever,
                     std::span<const IrConfiguration> configurations, const IrEvalOptions& options) {
    if (options.k == 0) {
        throw_invalid("k must be >= 1");
    }
    IrReport report;
    report.k = options.k;
    for (const auto& q : queries) {
        if (q.relevant_ids.empty()) {
            report.warnings.push_back("query " + q.query_id + " has no relevant documents and scores 0");
        }
    }
    for (const auto& config : configurations) {
        IrRow row;
        row.name = config.name;
        row.mode = config.mode;
        switch (config.mode) {
        case RetrievalMode::lexical: row.weight_lex = 1.0; break;
        case RetrievalMode::semantic: row.weight_sem = 1.0; break;
        case RetrievalMode::hybrid:
            row.weight_lex = config.options.weights.alpha;
            row.weight_sem = config.options.weights.beta;
            break;
        }
        row.retrieved.resize(queries.size());
        std::vector<double> latency(queries.size(), 0.0);
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < queries.size(); i = next.fetch_add(1)) {
                const auto start = std::chrono::steady_clock::now();
                row.retrieved[i] = retrieve_ids(retriever, config, queries[i].body, options.k);
                latency[i] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            }
        };
        const auto threads = std::min(std::max<std::size_t>(options.threads, 1), std::max<std::size_t>(queries.size(), 1));
        if (threads == 1) {
            worker();
        } else {
            std::vector<std::jthread> pool;
            for (std::size_t t = 0; t < threads; ++t) {
                pool.emplace_back(worker);
            }
        }
        double p_sum = 0.0;
        double ap_sum = 0.0;
        double latency_sum = 0.0;
        for (std::size_t i = 0; i < queries.size(); ++i) {
            const auto& got = row.retrieved[i];
            const auto& rel = queries[i].relevant_ids;
            p_sum += precision_rel_norm(got, rel, options.k);
            ap_sum += average_precision(got, rel, options.k);
            latency_sum += latency[i];
            std::size_t matches = 0;
            for (std::size_t r = 0; r < std::min(options.k, got.size()); ++r) {
                matches += rel.count(got[r]);
            }
            ++row.match_histogram[matches];
        }
        if (!queries.empty()) {
            const auto n = static_cast<double>(queries.size());
            row.p_rel_norm = p_sum / n;
            row.map_rel_norm = ap_sum / n;
            row.latency_ms = latency_sum / n;
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

IrReport weight_sweep(const QuerySet& queries, const HybridRetriever& retriever, std::span<const FusionWeights> grid,
                      const HybridOptions& base, const IrEvalOptions& options) {
    std::vector<IrConfiguration> configs;
    for (const auto& w : grid) {
        w.validate();
        IrConfiguration c{"hybrid", RetrievalMode::hybrid, base};
        c.options.weights = w;
        configs.push_back(std::move(c));
    }
    configs.push_back({"lexical", RetrievalMode::lexical, base});
    configs.push_back({"semantic", RetrievalMode::semantic, base});
    return evaluate_ir(queries, retriever, configs, options);
}

std::string format_ir_text(const IrReport& report) {
    std::ostringstream out;
    const auto k = std::to_string(report.k);
    out << pad_right("configuration", 14) << pad_left("w_lex", 7) << pad_left("w_sem", 7)
        << pad_left("P@" + k + "(RN)", 11) << pad_left("MAP@" + k + "(RN)", 13) << pad_left("ms/query", 10) << '\n';
    for (const auto& r : report.rows) {
        out << pad_right(r.name, 14) << pad_left(fixed(r.weight_lex, 2), 7) << pad_left(fixed(r.weight_sem, 2), 7)
            << pad_left(fixed(r.p_rel_norm, 4), 11) << pad_left(fixed(r.map_rel_norm, 4), 13)
            << pad_left(fixed(r.latency_ms, 3), 10) << '\n';
    }
    return out.str();
}

std::string format_ir_rows(const IrReport& report) {
    std::ostringstream out;
    out << "name\tmode\tweight_lex\tweight_sem\tp_rel_norm\tmap_rel_norm\tlatency_ms\n";
    for (const auto& r : report.rows) {
        out << r.name << '\t' << to_string(r.mode) << '\t' << fixed(r.weight_lex, 6) << '\t' << fixed(r.weight_sem, 6)
            << '\t' << fixed(r.p_rel_norm, 6) << '\t' << fixed(r.map_rel_norm, 6) << '\t' << fixed(r.latency_ms, 3)
            << '\n';
    }
    return out.str();
}

std::string format_histogram(const IrRow& row) {
    std::ostringstream out;
    out << "matching_relevant\tqueries\n";
    for (const auto& [matches, count] : row.match_histogram) {
        out << matches << '\t' << count << '\n';
    }
    return out.str();
}

} // namespace verifai
