#include "verifai/cli.hpp"

#include "verifai/config.hpp"
#include "verifai/error.hpp"
#include "verifai/evaluation.hpp"
#include "verifai/index_bundle.hpp"
#include "verifai/json_io.hpp"
#include "verifai/pipeline.hpp"
#include "verifai/service.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace verifai {

namespace {

std::atomic<bool> g_stop_requested{false};

extern "C" void on_stop_signal(int) {
    g_stop_requested.store(true);
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::vector<nlohmann::json> read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::not_found, "cannot open " + path);
    }
    std::vector<nlohmann::json> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) {
            continue;
        }
        try {
            out.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::invalid_input, path + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::string id_string(const nlohmann::json& j) {
    return j.is_string() ? j.get<std::string>() : j.dump();
}

NliLabel label_or_throw(const nlohmann::json& j, const char* field) {
    auto label = parse_nli_label(j.at(field).get<std::string>());
    if (!label) {
        throw_invalid(std::string("unknown label in field '") + field + "': " + j.at(field).dump());
    }
    return *label;
}

/// Service-level settings shared by the commands that load an index.
struct CommonFlags {
    std::string config_file;
    std::string index_dir;
    std::string generation;
    std::string nli;

    ConfigOverrides overrides() const {
        ConfigOverrides o;
        if (!config_file.empty()) o.config_file = config_file;
        if (!index_dir.empty()) o.index_dir = index_dir;
        if (!generation.empty()) o.generation = generation;
        if (!nli.empty()) o.nli = nli;
        return o;
    }
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_backends) {
    cmd->add_option("--index", f.index_dir, "Index directory");
    cmd->add_option("--config", f.config_file, "JSON config file");
    if (with_backends) {
        cmd->add_option("--generation", f.generation, "Generation backend: stub, openai, none");
        cmd->add_option("--nli", f.nli, "NLI backend: stub, classifier, chat, none");
    }
}

struct Loaded {
    ServiceConfig config;
    std::shared_ptr<const IndexBundle> index;
    Backends backends;
};

Loaded load_all(const ConfigOverrides& overrides) {
    Loaded l;
    l.config = resolve_config(overrides);
    validate_config(l.config);
    l.index = std::make_shared<const IndexBundle>(IndexBundle::load(l.config.index_dir));
    l.backends = make_backends(l.config, l.index.get());
    return l;
}

void print_hits(std::ostream& out, const RankedList& hits, const DocumentStore& store) {
    std::size_t rank = 0;
    for (const auto& h : hits) {
        const auto* doc = store.find(h.doc_id);
        out << ++rank << '\t' << h.doc_id << '\t' << fixed(h.normalized_score, 6) << '\t'
            << fixed(h.lexical_score, 6) << '\t' << fixed(h.semantic_score, 6) << '\t'
            << (doc != nullptr ? doc->title : std::string()) << '\n';
    }
}

void print_report(std::ostream& out, const VerificationReport& report) {
    for (const auto& c : report.claims) {
        out << '[' << to_string(c.status) << "] " << c.claim.text;
        if (!c.flags.empty()) {
            out << "  {";
            for (std::size_t i = 0; i < c.flags.size(); ++i) {
                out << (i ? "," : "") << c.flags[i];
            }
            out << '}';
        }
        out << '\n';
        if (c.closest) {
            out << "    closest (" << c.closest->doc_id << ", " << fixed(c.closest->similarity, 3)
                << "): " << c.closest->sentence << '\n';
        }
    }
    if (!report.hallucinated_ids.empty()) {
        out << "hallucinated ids:";
        for (const auto& id : report.hallucinated_ids) {
            out << ' ' << id;
        }
        out << '\n';
    }
}

std::map<std::string, std::string> load_most_relevant(const std::string& path) {
    std::map<std::string, std::string> out;
    for (const auto& j : read_jsonl(path)) {
        out[id_string(j.at("query_id"))] = id_string(j.at("doc_id"));
    }
    return out;
}

int classify_error(const Error& e) {
    return e.kind() == ErrorKind::invalid_input || e.kind() == ErrorKind::not_found ? kExitUserError
                                                                                      : kExitInternalError;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Verifiable retrieval-augmented question answering", "verifai"};
    app.require_subcommand(1);

    // index
    struct {
        std::string corpus, out_dir, stopwords;
        std::size_t dim = 64, token_limit = kDefaultTokenLimit, m = 16, ef_construction = 200, ef_search = 128;
        std::uint64_t seed = 0;
        bool skip_malformed = false, keep_empty = false;
    } idx;
    auto* index_cmd = app.add_subcommand("index", "Ingest a JSONL corpus and build an index directory");
    index_cmd->add_option("--corpus", idx.corpus, "Line-delimited document records")->required();
    index_cmd->add_option("--out", idx.out_dir, "Output index directory")->required();
    index_cmd->add_option("--dim", idx.dim, "Embedding dimension")->check(CLI::Range(8, 4096));
    index_cmd->add_option("--seed", idx.seed, "Hash embedder seed");
    index_cmd->add_option("--token-limit", idx.token_limit, "Chunk token limit")->check(CLI::PositiveNumber);
    index_cmd->add_option("--m", idx.m, "HNSW links per node")->check(CLI::Range(2, 256));
    index_cmd->add_option("--ef-construction", idx.ef_construction, "HNSW build beam width")->check(CLI::PositiveNumber);
    index_cmd->add_option("--ef-search", idx.ef_search, "HNSW search beam width")->check(CLI::PositiveNumber);
    index_cmd->add_option("--stopwords", idx.stopwords, "Stopword file replacing the built-in list");
    index_cmd->add_flag("--skip-malformed", idx.skip_malformed, "Skip malformed records instead of aborting");
    index_cmd->add_flag("--keep-empty", idx.keep_empty, "Keep records with an empty abstract");

    // search
    CommonFlags search_common;
    struct {
        std::string q, mode = "hybrid";
        std::size_t k = 10, pool = 100;
        double alpha = 0.7;
        bool no_rescore = false, json = false;
    } srch;
    auto* search_cmd = app.add_subcommand("search", "Retrieve documents for a query");
    add_common(search_cmd, search_common, false);
    search_cmd->add_option("--q", srch.q, "Query text")->required();
    search_cmd->add_option("--k", srch.k, "Results to return")->check(CLI::PositiveNumber);
    search_cmd->add_option("--mode", srch.mode, "lexical, semantic or hybrid")
        ->check(CLI::IsMember({"lexical", "semantic", "hybrid"}));
    search_cmd->add_option("--alpha", srch.alpha, "Lexical weight")->check(CLI::Range(0.0, 1.0));
    search_cmd->add_option("--pool", srch.pool, "Per-retriever depth before fusion")->check(CLI::PositiveNumber);
    search_cmd->add_flag("--no-rescore", srch.no_rescore, "Skip full-precision rescoring");
    search_cmd->add_flag("--json", srch.json, "Print JSON");

    // answer
    CommonFlags answer_common;
    struct {
        std::string q;
        std::size_t k = 10;
        double alpha = 0.7;
        bool no_verify = false, json = false;
    } ans;
    auto* answer_cmd = app.add_subcommand("answer", "Retrieve, generate and verify an answer");
    add_common(answer_cmd, answer_common, true);
    answer_cmd->add_option("--q", ans.q, "Question")->required();
    answer_cmd->add_option("--k", ans.k, "Documents retrieved")->check(CLI::PositiveNumber);
    answer_cmd->add_option("--alpha", ans.alpha, "Lexical weight")->check(CLI::Range(0.0, 1.0));
    answer_cmd->add_flag("--no-verify", ans.no_verify, "Skip claim verification");
    answer_cmd->add_flag("--json", ans.json, "Print the full JSON response");

    // verify
    CommonFlags verify_common;
    struct {
        std::string answer, answer_file, context;
        bool json = false;
    } ver;
    auto* verify_cmd = app.add_subcommand("verify", "Verify a given answer against the indexed documents");
    add_common(verify_cmd, verify_common, true);
    auto* ans_opt = verify_cmd->add_option("--answer", ver.answer, "Answer text");
    verify_cmd->add_option("--answer-file", ver.answer_file, "File holding the answer text")->excludes(ans_opt);
    verify_cmd->add_option("--context", ver.context,
                           "Comma-separated context ids (default: every cited id found in the index)");
    verify_cmd->add_flag("--json", ver.json, "Print JSON");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Evaluation harnesses");
    eval_cmd->require_subcommand(1);
    CommonFlags eval_common;
    struct {
        std::string qrels, pairs, answers, most_relevant, ideals, judge = "stub";
        std::size_t k = 10, pool = 100, threads = 1;
        double alpha = 0.7;
    } ev;
    auto* eval_ir = eval_cmd->add_subcommand("ir", "P@k and MAP@k with relevance-count normalization");
    add_common(eval_ir, eval_common, false);
    eval_ir->add_option("--qrels", ev.qrels, "Query set with relevant ids")->required();
    eval_ir->add_option("--k", ev.k, "Cutoff")->check(CLI::PositiveNumber);
    eval_ir->add_option("--alpha", ev.alpha, "Hybrid lexical weight")->check(CLI::Range(0.0, 1.0));
    eval_ir->add_option("--pool", ev.pool, "Per-retriever depth before fusion")->check(CLI::PositiveNumber);
    eval_ir->add_option("--threads", ev.threads, "Worker threads over queries")->check(CLI::PositiveNumber);
    auto* eval_nli = eval_cmd->add_subcommand("nli", "Classification report over labelled pairs");
    add_common(eval_nli, eval_common, true);
    eval_nli->add_option("--pairs", ev.pairs, "JSONL {gold, predicted} or {claim, evidence, gold}")->required();
    auto* eval_refs = eval_cmd->add_subcommand("refs", "Citation statistics over generated answers");
    eval_refs->add_option("--answers", ev.answers, "JSONL {query_id, answer, context_ids}")->required();
    eval_refs->add_option("--most-relevant", ev.most_relevant, "JSONL {query_id, doc_id}");
    auto* eval_judge = eval_cmd->add_subcommand("judge", "Compare answers with ideal answers");
    add_common(eval_judge, eval_common, false);
    eval_judge->add_option("--answers", ev.answers, "JSONL {query_id, answer}")->required();
    eval_judge->add_option("--ideals", ev.ideals, "JSONL {query_id, ideal_answer}")->required();
    eval_judge->add_option("--judge", ev.judge, "stub, or openai to use the configured generation endpoint")
        ->check(CLI::IsMember({"stub", "openai"}));

    // sweep
    CommonFlags sweep_common;
    struct {
        std::string qrels, grid = "0:1:0.1";
        std::size_t k = 10, pool = 100;
        bool rows = false;
    } sw;
    auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate a grid of fusion weights");
    add_common(sweep_cmd, sweep_common, false);
    sweep_cmd->add_option("--qrels", sw.qrels, "Query set with relevant ids")->required();
    sweep_cmd->add_option("--grid", sw.grid, "start:stop:step over the lexical weight");
    sweep_cmd->add_option("--k", sw.k, "Cutoff")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--pool", sw.pool, "Per-retriever depth before fusion")->check(CLI::PositiveNumber);
    sweep_cmd->add_flag("--rows", sw.rows, "Machine-readable rows only");

    // serve
    CommonFlags serve_common;
    std::string serve_host;
    std::optional<int> serve_port;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
    add_common(serve_cmd, serve_common, true);
    serve_cmd->add_option("--host", serve_host, "Bind address");
    serve_cmd->add_option("--port", serve_port, "Port in [1, 65535]");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const CLI::App* failing = &app;
        for (auto* sub : app.get_subcommands()) {
            failing = sub;
            for (auto* inner : sub->get_subcommands()) {
                failing = inner;
            }
        }
        err << failing->help();
        return kExitUserError;
    }

    try {
        if (index_cmd->parsed()) {
            IngestOptions io;
            io.filter_empty = !idx.keep_empty;
            io.on_malformed = idx.skip_malformed ? MalformedPolicy::skip : MalformedPolicy::abort;
            auto ingested = ingest(std::filesystem::path(idx.corpus), io);
            for (const auto& w : ingested.warnings) {
                err << "warning: " << w << '\n';
            }
            BundleOptions bo;
            bo.token_limit = idx.token_limit;
            bo.embedder.dimension = idx.dim;
            bo.embedder.seed = idx.seed;
            bo.hnsw = {idx.m, idx.ef_construction, idx.ef_search, 42};
            if (!idx.stopwords.empty()) {
                bo.analyzer.stopwords = load_stopwords(idx.stopwords);
            }
            auto embedder = make_embedder(bo.embedder, bo.analyzer);
            auto bundle = IndexBundle::build(std::move(ingested.documents), bo, *embedder);
            bundle.save(idx.out_dir);
            const auto& s = ingested.stats;
            out << "read " << s.read << " kept " << s.kept << " dropped " << s.dropped << " malformed " << s.malformed
                << '\n'
                << "indexed " << bundle.store().size() << " documents, " << bundle.chunk_count() << " chunks into "
                << idx.out_dir << '\n';
            return kExitOk;
        }

        if (search_cmd->parsed()) {
            auto l = load_all(search_common.overrides());
            HybridRetriever retriever(l.index->lexical(), l.index->vectors(), *l.backends.embedder);
            SearchOutcome outcome;
            const auto mode = parse_retrieval_mode(srch.mode);
            if (is_blank(srch.q)) {
                throw_invalid("query is empty");
            }
            if (mode == RetrievalMode::lexical) {
                outcome = retriever.lexical(srch.q, srch.k);
                outcome.hits = normalize(std::move(outcome.hits));
            } else if (mode == RetrievalMode::semantic) {
                outcome = retriever.semantic(srch.q, srch.k, !srch.no_rescore);
                outcome.hits = normalize(std::move(outcome.hits));
            } else {
                HybridOptions ho;
                ho.k = srch.k;
                ho.pool = std::max(srch.pool, srch.k);
                ho.weights = FusionWeights::lexical_share(srch.alpha);
                ho.rescore = !srch.no_rescore;
                outcome = retriever.hybrid(srch.q, ho);
            }
            for (const auto& n : outcome.notices) {
                err << "notice: " << n << '\n';
            }
            if (srch.json) {
                out << nlohmann::json{{"hits", hits_to_json(outcome.hits, l.index->store())}}.dump(2) << '\n';
            } else {
                print_hits(out, outcome.hits, l.index->store());
            }
            return kExitOk;
        }

        if (answer_cmd->parsed()) {
            auto l = load_all(answer_common.overrides());
            Pipeline pipeline(*l.index, *l.backends.embedder, l.backends.generation.get(), l.backends.nli.get());
            AnswerOptions ao;
            ao.retrieval.k = ans.k;
            ao.retrieval.pool = std::max(l.config.pool, ans.k);
            ao.retrieval.weights = FusionWeights::lexical_share(ans.alpha);
            ao.verify = !ans.no_verify;
            ao.verification.max_in_flight = l.config.nli_in_flight;
            auto response = pipeline.answer(ans.q, ao);
            for (const auto& n : response.notices) {
                err << "notice: " << n << '\n';
            }
            if (ans.json) {
                out << to_json(response, l.index->store()).dump(2) << '\n';
            } else {
                out << "Sources:\n";
                print_hits(out, response.sources, l.index->store());
                out << "\nAnswer:\n" << response.answer.text << "\n\n";
                print_report(out, response.report);
            }
            return kExitOk;
        }

        if (verify_cmd->parsed()) {
            auto l = load_all(verify_common.overrides());
            std::string text = ver.answer;
            if (!ver.answer_file.empty()) {
                std::ifstream in(ver.answer_file);
                if (!in) {
                    throw Error(ErrorKind::not_found, "cannot open " + ver.answer_file);
                }
                std::ostringstream ss;
                ss << in.rdbuf();
                text = ss.str();
            }
            if (is_blank(text)) {
                throw_invalid("verify needs --answer or --answer-file");
            }
            GeneratedAnswer answer;
            answer.text = text;
            answer.citations = extract_citations(text);
            if (!ver.context.empty()) {
                std::stringstream ss(ver.context);
                for (std::string id; std::getline(ss, id, ',');) {
                    if (!is_blank(id)) {
                        answer.context_ids.emplace_back(trim(id));
                    }
                }
            } else {
                for (const auto& id : answer.cited_ids()) {
                    if (l.index->store().find(id) != nullptr &&
                        std::find(answer.context_ids.begin(), answer.context_ids.end(), id) == answer.context_ids.end()) {
                        answer.context_ids.push_back(id);
                    }
                }
            }
            Pipeline pipeline(*l.index, *l.backends.embedder, nullptr, l.backends.nli.get());
            VerifyOptions vo;
            vo.max_in_flight = l.config.nli_in_flight;
            auto report = pipeline.verify(answer, vo);
            if (ver.json) {
                out << to_json(report).dump(2) << '\n';
            } else {
                print_report(out, report);
            }
            return kExitOk;
        }

        if (eval_ir->parsed()) {
            auto l = load_all(eval_common.overrides());
            auto queries = load_queryset(std::filesystem::path(ev.qrels));
            HybridRetriever retriever(l.index->lexical(), l.index->vectors(), *l.backends.embedder);
            HybridOptions base;
            base.pool = std::max(ev.pool, ev.k);
            std::vector<IrConfiguration> configs{{"lexical", RetrievalMode::lexical, base},
                                                 {"semantic", RetrievalMode::semantic, base},
                                                 {"hybrid", RetrievalMode::hybrid, base}};
            configs[2].options.weights = FusionWeights::lexical_share(ev.alpha);
            auto report = evaluate_ir(queries, retriever, configs, {ev.k, ev.threads});
            for (const auto& w : report.warnings) {
                err << "warning: " << w << '\n';
            }
            out << format_ir_text(report) << '\n' << format_ir_rows(report) << '\n';
            out << "hybrid " << format_histogram(report.rows.back());
            return kExitOk;
        }

        if (eval_nli->parsed()) {
            auto records = read_jsonl(ev.pairs);
            if (records.empty()) {
                throw_invalid(ev.pairs + " holds no pairs");
            }
            std::vector<NliLabel> predicted;
            std::vector<NliLabel> gold;
            std::unique_ptr<Loaded> loaded;
            for (const auto& r : records) {
                gold.push_back(label_or_throw(r, "gold"));
                if (r.contains("predicted")) {
                    predicted.push_back(label_or_throw(r, "predicted"));
                    continue;
                }
                if (!loaded) {
                    loaded = std::make_unique<Loaded>();
                    loaded->config = resolve_config(eval_common.overrides());
                    validate_config(loaded->config);
                    loaded->backends = make_backends(loaded->config, nullptr);
                    if (!loaded->backends.nli) {
                        throw_invalid("pairs without predictions need an NLI backend");
                    }
                }
                predicted.push_back(loaded->backends.nli
                                        ->classify(r.at("claim").get<std::string>(), r.at("evidence").get<std::string>())
                                        .label);
            }
            out << format_report(nli_report(predicted, gold));
            return kExitOk;
        }

        if (eval_refs->parsed()) {
            auto answers = load_answers(ev.answers);
            std::map<std::string, std::string> most;
            if (!ev.most_relevant.empty()) {
                most = load_most_relevant(ev.most_relevant);
            }
            out << format_ref_stats(reference_stats(answers, ev.most_relevant.empty() ? nullptr : &most));
            return kExitOk;
        }

        if (eval_judge->parsed()) {
            auto answers = load_answers(ev.answers);
            std::map<std::string, std::string> ideals;
            for (const auto& j : read_jsonl(ev.ideals)) {
                ideals[id_string(j.at("query_id"))] = j.at("ideal_answer").get<std::string>();
            }
            std::unique_ptr<GenerationBackend> judge;
            if (ev.judge == "stub") {
                judge = std::make_unique<StubJudgeBackend>();
            } else {
                auto config = resolve_config(eval_common.overrides());
                validate_config(config);
                judge = std::make_unique<HttpChatBackend>(config.generation.http, "judge");
            }
            std::size_t n = 0, same = 0, all = 0, unparsed = 0;
            double perc_sum = 0.0;
            out << "query_id\tSAME_CONCLUSION\tALL_INFO\tPERC_IDEAL\tparsed\n";
            for (const auto& a : answers) {
                auto it = ideals.find(a.query_id);
                if (it == ideals.end()) {
                    err << "warning: no ideal answer for query " << a.query_id << '\n';
                    continue;
                }
                auto v = judge_compare(a.answer.text, it->second, *judge);
                ++n;
                const auto yn = [](const std::optional<bool>& b) { return b ? (*b ? "YES" : "NO") : "?"; };
                out << a.query_id << '\t' << yn(v.same_conclusion) << '\t' << yn(v.all_info) << '\t'
                    << (v.perc_ideal ? fixed(*v.perc_ideal, 1) : std::string("?")) << '\t'
                    << (v.parsed ? "yes" : "no") << '\n';
                if (!v.parsed) {
                    ++unparsed;
                    continue;
                }
                same += *v.same_conclusion ? 1 : 0;
                all += *v.all_info ? 1 : 0;
                perc_sum += *v.perc_ideal;
            }
            const auto parsed = n - unparsed;
            const auto share = [&](std::size_t c) { return parsed ? fixed(100.0 * c / parsed, 1) + "%" : "n/a"; };
            out << "\njudged " << n << " unparsed " << unparsed << '\n'
                << "SAME_CONCLUSION yes " << share(same) << '\n'
                << "ALL_INFO yes " << share(all) << '\n'
                << "PERC_IDEAL mean " << (parsed ? fixed(perc_sum / parsed, 1) : std::string("n/a")) << '\n';
            return kExitOk;
        }

        if (sweep_cmd->parsed()) {
            auto l = load_all(sweep_common.overrides());
            auto queries = load_queryset(std::filesystem::path(sw.qrels));
            HybridRetriever retriever(l.index->lexical(), l.index->vectors(), *l.backends.embedder);
            HybridOptions base;
            base.pool = std::max(sw.pool, sw.k);
            const auto grid = parse_grid(sw.grid);
            auto report = weight_sweep(queries, retriever, grid, base, {sw.k, 1});
            if (sw.rows) {
                out << format_ir_rows(report);
            } else {
                out << format_ir_text(report) << '\n' << format_ir_rows(report);
            }
            return kExitOk;
        }

        if (serve_cmd->parsed()) {
            auto overrides = serve_common.overrides();
            if (!serve_host.empty()) overrides.host = serve_host;
            overrides.port = serve_port;
            auto config = resolve_config(overrides);
            validate_config(config);
            std::shared_ptr<const IndexBundle> index;
            try {
                index = std::make_shared<const IndexBundle>(IndexBundle::load(config.index_dir));
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::not_found) {
                    throw;
                }
                err << "warning: " << e.what() << "; serving without an index\n";
            }
            Service service(config, index, make_backends(config, index.get()));
            HttpServer server(service);
            const int port = server.bind(config.host, config.port);
            err << "listening on http://" << config.host << ':' << port << " ("
                << (index ? std::to_string(index->store().size()) : std::string("0")) << " documents)\n";
            g_stop_requested.store(false);
            std::signal(SIGINT, on_stop_signal);
            std::signal(SIGTERM, on_stop_signal);
            std::jthread watcher([&server](std::stop_token st) {
                while (!st.stop_requested() && !g_stop_requested.load()) {
                    std::this_thread::sleep_for(std::chrono::milliseconds(100));
                }
                server.stop();
            });
            server.listen_after_bind();
            watcher.request_stop();
            return kExitOk;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return classify_error(e);
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternalError;
    }
    err << app.help();
    return kExitUserError;
}

} // namespace verifai
