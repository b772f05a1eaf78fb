#include "fixture.hpp"

#include "verifai/cli.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace verifai;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "verifai");
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

/// Fixture corpus and index written once into a temp directory.
const std::filesystem::path& workdir() {
    static const std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() / "verifai_cli_test";
        std::filesystem::remove_all(d);
        fixture::write_fixture(fixture::make_fixture(), d);
        auto r = run({"index", "--corpus", (d / "corpus.jsonl").string(), "--out", (d / "index").string(), "--dim",
                      std::to_string(fixture::kFixtureDimension)});
        REQUIRE(r.code == kExitOk);
        return d;
    }();
    return dir;
}

std::string index_dir() {
    return (workdir() / "index").string();
}

} // namespace

TEST_SUITE("cli") {
    TEST_CASE("usage errors exit 1") {
        CHECK(run({}).code == kExitUserError);
        CHECK(run({"bogus"}).code == kExitUserError);
        CHECK(run({"search", "--q"}).code == kExitUserError);
        CHECK(run({"search", "--index", "/nonexistent/index", "--q", "x"}).code == kExitUserError);
        CHECK(run({"serve", "--port", "0"}).code == kExitUserError);
    }

    TEST_CASE("help exits 0") {
        auto r = run({"--help"});
        CHECK(r.code == kExitOk);
        CHECK(r.out.find("search") != std::string::npos);
    }

    TEST_CASE("search prints tab-separated rows") {
        auto r = run({"search", "--index", index_dir(), "--q", "cells and tissue", "--k", "3"});
        REQUIRE(r.code == kExitOk);
        std::istringstream lines(r.out);
        std::string line;
        int rows = 0;
        while (std::getline(lines, line)) {
            ++rows;
            CHECK(std::count(line.begin(), line.end(), '\t') == 5);
        }
        CHECK(rows == 3);
        auto j = run({"search", "--index", index_dir(), "--q", "cells", "--json", "--mode", "lexical"});
        REQUIRE(j.code == kExitOk);
        CHECK(nlohmann::json::parse(j.out).contains("hits"));
    }

    TEST_CASE("answer and verify") {
        auto a = run({"answer", "--index", index_dir(), "--q", "cells and tissue", "--json"});
        REQUIRE(a.code == kExitOk);
        auto j = nlohmann::json::parse(a.out);
        CHECK_FALSE(j["claims"].empty());
        const auto id = j["context_ids"][0].get<std::string>();
        auto v = run({"verify", "--index", index_dir(), "--answer", "Something (PUBMED:" + id + ").", "--context", id,
                      "--json"});
        CHECK(v.code == kExitOk);
        CHECK(run({"verify", "--index", index_dir()}).code == kExitUserError);
    }

    TEST_CASE("eval ir and sweep") {
        const auto qrels = (workdir() / "queries.jsonl").string();
        auto ir = run({"eval", "ir", "--index", index_dir(), "--qrels", qrels});
        CHECK(ir.code == kExitOk);
        CHECK(ir.out.find("hybrid") != std::string::npos);
        auto sweep = run({"sweep", "--index", index_dir(), "--qrels", qrels, "--rows"});
        REQUIRE(sweep.code == kExitOk);
        CHECK(std::count(sweep.out.begin(), sweep.out.end(), '\n') == 14);
    }

    TEST_CASE("eval nli and refs") {
        const auto pairs = workdir() / "pairs.jsonl";
        std::ofstream(pairs) << R"({"gold":"SUPPORT","predicted":"SUPPORT"})" << '\n'
                             << R"({"gold":"CONTRADICT","predicted":"NO_EVIDENCE"})" << '\n';
        auto nli = run({"eval", "nli", "--pairs", pairs.string()});
        CHECK(nli.code == kExitOk);
        CHECK(nli.out.find("0.50") != std::string::npos);

        const auto answers = workdir() / "answers.jsonl";
        std::ofstream(answers) << R"({"query_id":"q","answer":"A (PUBMED:1).","context_ids":["2"]})" << '\n';
        auto refs = run({"eval", "refs", "--answers", answers.string()});
        CHECK(refs.code == kExitOk);

        const auto bad = workdir() / "bad.jsonl";
        std::ofstream(bad) << "{not json\n";
        CHECK(run({"eval", "nli", "--pairs", bad.string()}).code == kExitUserError);
    }
}
