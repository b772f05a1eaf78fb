#include "verifai/text.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <array>
#include <cctype>

namespace verifai {
namespace {

constexpr std::array<std::string_view, 24> kAbbreviations = {
    "e.g.", "i.e.", "al.",  "fig.",  "figs.", "vs.",  "dr.",    "mr.",
    "mrs.", "ms.",  "no.",  "nos.",  "approx.", "ref.", "refs.", "eq.",
    "cf.",  "vol.", "p.",   "pp.",   "st.",   "ca.",  "resp.",  "etc.",
};

bool is_space(char c) noexcept {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool is_closer(char c) noexcept {
    return c == ')' || c == ']' || c == '"' || c == '\'';
}

bool starts_sentence(std::string_view text, std::size_t pos) {
    if (pos >= text.size()) {
        return false;
    }
    auto c = static_cast<unsigned char>(text[pos]);
    if (c < 0x80) {
        return std::isupper(c) != 0 || std::isdigit(c) != 0;
    }
    UChar32 cp = 0;
    auto i = static_cast<int32_t>(pos);
    U8_NEXT(reinterpret_cast<const uint8_t*>(text.data()), i, static_cast<int32_t>(text.size()), cp);
    return cp >= 0 && (u_isupper(cp) || u_isdigit(cp));
}

std::string lowered(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

} // namespace

bool is_abbreviation(std::string_view token_with_period) {
    auto low = lowered(token_with_period);
    return std::find(kAbbreviations.begin(), kAbbreviations.end(), low) != kAbbreviations.end();
}

std::string_view trim(std::string_view text) noexcept {
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && is_space(text[b])) {
        ++b;
    }
    while (e > b && is_space(text[e - 1])) {
        --e;
    }
    return text.substr(b, e - b);
}

bool is_blank(std::string_view text) noexcept {
    return trim(text).empty();
}

std::vector<ByteSpan> split_sentences(std::string_view text) {
    std::vector<ByteSpan> out;
    const std::size_t n = text.size();

    auto emit = [&](std::size_t b, std::size_t e) {
        while (b < e && is_space(text[b])) {
            ++b;
        }
        while (e > b && is_space(text[e - 1])) {
            --e;
        }
        if (b < e) {
            out.push_back({b, e});
        }
    };

    std::size_t start = 0;
    for (std::size_t i = 0; i < n; ++i) {
        char c = text[i];
        if (c != '.' && c != '!' && c != '?') {
            continue;
        }
        std::size_t j = i + 1;
        while (j < n && is_closer(text[j])) {
            ++j;
        }
        if (j >= n || !is_space(text[j])) {
            continue;
        }
        std::size_t k = j;
        while (k < n && is_space(text[k])) {
            ++k;
        }
        if (!starts_sentence(text, k)) {
            continue;
        }
        if (c == '.') {
            std::size_t t = i;
            while (t > start && !is_space(text[t - 1]) && text[t - 1] != '(') {
                --t;
            }
            if (is_abbreviation(text.substr(t, i + 1 - t))) {
                continue;
            }
        }
        emit(start, j);
        start = k;
        i = k - 1;
    }
    emit(start, n);
    return out;
}

} // namespace verifai
