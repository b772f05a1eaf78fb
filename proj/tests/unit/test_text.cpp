#include "verifai/text.hpp"

#include <doctest.h>

#include <string>
#include <vector>

using namespace verifai;

namespace {

std::vector<std::string> sentences(std::string_view text) {
    std::vector<std::string> out;
    for (const auto& s : split_sentences(text)) {
        out.emplace_back(s.of(text));
    }
    return out;
}

} // namespace

TEST_SUITE("text") {
    TEST_CASE("splits on terminal punctuation before an uppercase word") {
        CHECK(sentences("First one. Second one! Third?") ==
              std::vector<std::string>{"First one.", "Second one!", "Third?"});
    }

    TEST_CASE("abbreviations and decimals do not split") {
        CHECK(sentences("Smith et al. Reported it. Dr. Who was 3.5 mg.") ==
              std::vector<std::string>{"Smith et al. Reported it.", "Dr. Who was 3.5 mg."});
        CHECK(is_abbreviation("e.g."));
        CHECK_FALSE(is_abbreviation("cells."));
    }

    TEST_CASE("lowercase continuation does not split") {
        CHECK(sentences("Levels rose. then fell.").size() == 1);
    }

    TEST_CASE("closing brackets stay with their sentence") {
        auto s = sentences("It was shown (PUBMED:1). Next point.");
        REQUIRE(s.size() == 2);
        CHECK(s[0] == "It was shown (PUBMED:1).");
    }

    TEST_CASE("spans are trimmed and ordered") {
        const std::string text = "  A b.   C d.  ";
        auto spans = split_sentences(text);
        REQUIRE(spans.size() == 2);
        CHECK(spans[0].begin == 2);
        CHECK(spans[0].end <= spans[1].begin);
        CHECK(spans[1].of(text) == "C d.");
    }

    TEST_CASE("empty and blank input") {
        CHECK(split_sentences("").empty());
        CHECK(split_sentences("   \n").empty());
        CHECK(is_blank(" \t\n"));
        CHECK_FALSE(is_blank(" x "));
        CHECK(trim("  x y ") == "x y");
    }
}
