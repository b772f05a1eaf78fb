#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace verifai {

/// Half-open byte range [begin, end) into some UTF-8 buffer.
struct ByteSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - begin; }
    std::string_view of(std::string_view text) const { return text.substr(begin, end - begin); }
    friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
};

/// Sentence boundaries: a break follows '.', '!' or '?' (plus any closing
/// brackets or quotes) when whitespace and then an uppercase letter or digit
/// come next, unless the period ends a known abbreviation. Returned spans are
/// trimmed, ordered and non-overlapping; whitespace between them is dropped.
std::vector<ByteSpan> split_sentences(std::string_view text);

bool is_abbreviation(std::string_view token_with_period);

std::string_view trim(std::string_view text) noexcept;
bool is_blank(std::string_view text) noexcept;

} // namespace verifai
