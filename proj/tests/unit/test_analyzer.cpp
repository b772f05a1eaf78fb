#include "verifai/analyzer.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace verifai;

TEST_SUITE("analyzer") {
    TEST_CASE("lowercases, strips punctuation and removes stopwords") {
        AnalyzerConfig c;
        CHECK(analyze("The Effect of IL-6, on cells!", c) == std::vector<std::string>{"effect", "il", "6", "cells"});
    }

    TEST_CASE("stopword removal can be disabled") {
        AnalyzerConfig c;
        c.remove_stopwords = false;
        CHECK(analyze("the cat", c) == std::vector<std::string>{"the", "cat"});
    }

    TEST_CASE("NFC normalization unifies composed and decomposed forms") {
        AnalyzerConfig c;
        CHECK(analyze("caf\xC3\xA9", c) == analyze("cafe\xCC\x81", c));
    }

    TEST_CASE("a stopword-only text analyzes to nothing") {
        CHECK(analyze("the of and", AnalyzerConfig{}).empty());
    }

    TEST_CASE("stopword files skip comments and blanks") {
        const auto path = std::filesystem::temp_directory_path() / "verifai_stopwords.txt";
        {
            std::ofstream out(path);
            out << "# comment\nfoo\n\nBar\n";
        }
        auto words = load_stopwords(path);
        std::filesystem::remove(path);
        CHECK(words.count("foo") == 1);
        CHECK(words.size() == 2);
    }
}
