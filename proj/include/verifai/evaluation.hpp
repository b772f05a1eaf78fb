#pragma once

#include "verifai/fusion.hpp"
#include "verifai/generation.hpp"
#include "verifai/verification.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace verifai {

struct QueryEntry {
    std::string query_id;
    std::string body;
    std::set<std::string> relevant_ids;
    std::optional<std::string> type;  // yesno | factoid | list | summary
    std::optional<std::string> ideal_answer;
};

using QuerySet = std::vector<QueryEntry>;

/// Line-delimited {query_id, body, relevant_ids, type?, ideal_answer?}. Throws on duplicate ids.
QuerySet load_queryset(std::istream& in);
QuerySet load_queryset(const std::filesystem::path& path);

/// |top-k ∩ relevant| / min(k, |relevant|). An empty relevant set scores 0
/// and appends a warning when `warnings` is given.
double precision_rel_norm(std::span<const std::string> retrieved, const std::set<std::string>& relevant,
                          std::size_t k, std::vector<std::string>* warnings = nullptr);

/// Sum of precision@r over relevant ranks r <= k, divided by min(k, |relevant|).
double average_precision(std::span<const std::string> retrieved, const std::set<std::string>& relevant,
                         std::size_t k);

struct Run {
    std::vector<std::string> retrieved;
    std::set<std::string> relevant;
};

/// Mean of average_precision over runs; 0 for no runs.
double map_rel_norm(std::span<const Run> runs, std::size_t k);

// -- NLI classification report --------------------------------------------

/// Row/column order of ClassReport: NO_EVIDENCE, SUPPORT, CONTRADICT.
inline constexpr std::array<NliLabel, 3> kReportLabels{NliLabel::no_evidence, NliLabel::support,
                                                        NliLabel::contradict};
std::size_t report_index(NliLabel label) noexcept;

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct ClassReport {
    std::array<ClassMetrics, 3> per_class{};
    /// Support-weighted averages.
    ClassMetrics weighted;
    double accuracy = 0.0;
    /// confusion[gold][predicted]
    std::array<std::array<std::size_t, 3>, 3> confusion{};
    std::size_t total = 0;
};

/// Throws invalid_input on empty input or length mismatch.
ClassReport nli_report(std::span<const NliLabel> predictions, std::span<const NliLabel> gold);
ClassReport report_from_confusion(const std::array<std::array<std::size_t, 3>, 3>& confusion);
std::string format_report(const ClassReport& report);

// -- citation statistics -----------------------------------------------------

struct AnswerRecord {
    std::string query_id;
    GeneratedAnswer answer;
};

/// Line-delimited {query_id, answer, context_ids?, backend?}.
std::vector<AnswerRecord> load_answers(const std::filesystem::path& path);

struct RefStats {
    std::size_t answers_total = 0;
    std::size_t answers_no_references = 0;
    /// Per answer, distinct cited ids outside its context; summed over answers.
    std::size_t hallucinated_id_count = 0;
    /// Most frequent per-answer count of distinct cited ids (ties -> smallest).
    std::size_t modal_reference_count = 0;
    std::size_t modal_reference_frequency = 0;
    /// Answers whose query has a most-relevant id that the answer does not cite.
    std::size_t missed_most_relevant_count = 0;

    friend bool operator==(const RefStats&, const RefStats&) = default;
};

RefStats reference_stats(std::span<const AnswerRecord> answers,
                         const std::map<std::string, std::string>* most_relevant = nullptr);
std::string format_ref_stats(const RefStats& stats);

// -- judge -------------------------------------------------------------------------

extern const std::string_view kJudgeInstruction;

struct JudgeVerdict {
    std::optional<bool> same_conclusion;
    std::optional<bool> all_info;
    std::optional<double> perc_ideal;
    /// False when any of the three fields is missing or out of range.
    bool parsed = false;
    std::vector<std::string> problems;
    std::string raw_completion;
};

/// Line-oriented and case-insensitive on the variable names; accepts
/// "NAME: value", "NAME = value" and markdown emphasis around either part.
JudgeVerdict parse_judge_completion(std::string_view completion);

/// system = the comparison prompt, user = "Sample answer:\n...\n\nIdeal answer:\n...".
ChatRequest judge_request(std::string_view sample_answer, std::string_view ideal_answer);

JudgeVerdict judge_compare(std::string_view sample_answer, std::string_view ideal_answer,
                           const GenerationBackend& backend);

/// Term-overlap judge for offline runs: PERC_IDEAL is the share of the
/// ideal answer's content terms found in the sample.
class StubJudgeBackend final : public GenerationBackend {
public:
    std::string name() const override { return "stub-judge"; }
    std::string complete(const ChatRequest& request) const override;
};

// -- retrieval evaluation ---------------------------------------------------------

enum class RetrievalMode { lexical, semantic, hybrid };

const char* to_string(RetrievalMode mode) noexcept;
RetrievalMode parse_retrieval_mode(std::string_view text);

struct IrConfiguration {
    std::string name;
    RetrievalMode mode = RetrievalMode::hybrid;
    HybridOptions options;
};

struct IrRow {
    std::string name;
    RetrievalMode mode = RetrievalMode::hybrid;
    double weight_lex = 0.0;
    double weight_sem = 0.0;
    double p_rel_norm = 0.0;
    double map_rel_norm = 0.0;
    double latency_ms = 0.0;
    /// Queries grouped by the number of relevant documents found in the top k.
    std::map<std::size_t, std::size_t> match_histogram;
    /// Top-k ids per query, in query-set order.
    std::vector<std::vector<std::string>> retrieved;
};

struct IrReport {
    std::size_t k = 10;
    std::vector<IrRow> rows;
    std::vector<std::string> warnings;
};

struct IrEvalOptions {
    std::size_t k = 10;
    /// Worker threads over queries; latencies are measured per query either way.
    std::size_t threads = 1;
};

std::vector<std::string> retrieve_ids(const HybridRetriever& retriever, const IrConfiguration& config,
                                      std::string_view query, std::size_t k);

IrReport evaluate_ir(const QuerySet& queries, const HybridRetriever& retriever,
                     std::span<const IrConfiguration> configurations, const IrEvalOptions& options = {});

/// One hybrid row per grid point plus pure lexical and pure semantic rows.
IrReport weight_sweep(const QuerySet& queries, const HybridRetriever& retriever, std::span<const FusionWeights> grid,
                      const HybridOptions& base, const IrEvalOptions& options = {});

/// Aligned, human-readable table.
std::string format_ir_text(const IrReport& report);
/// Tab-separated rows with a header: name, mode, weight_lex, weight_sem, p_rel_norm, map_rel_norm, latency_ms.
std::string format_ir_rows(const IrReport& report);
std::string format_histogram(const IrRow& row);

} // namespace verifai
