#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace iotl {

// Lowercased alphanumeric-only view of a text, with a map from each folded
// character back to its byte position in the original string. Folding makes
// "TP-Link", "tp link" and "TPLINK" compare equal.
struct FoldedText {
    std::string folded;
    std::vector<std::size_t> origin;  // origin[i] = byte index in source of folded[i]

    static FoldedText of(std::string_view text);
};

// Folds a catalog string into its matchable form: lowercase, alphanumerics only.
std::string fold_key(std::string_view s);

// One occurrence of a pattern inside the original text.
struct MatchSpan {
    std::size_t begin = 0;  // byte offset in the original text
    std::size_t end = 0;    // one past the last matched byte
};

// Counts non-overlapping occurrences of any of `patterns` (already folded via
// fold_key) in `text`. The scan is greedy left to right and takes the longest
// pattern at each position, so alias hits at the same position count once.
// Patterns of folded length <= 3 must sit on word boundaries in the original
// text; this keeps "lg" from firing inside "volga".
int match_count(const std::vector<std::string>& patterns, std::string_view text,
                std::vector<MatchSpan>* spans = nullptr);

// True when at least one pattern occurs in the text under match_count rules.
bool matches_any(const std::vector<std::string>& patterns, std::string_view text);

// Extracts a readable window around `span` from `text`. The window is clipped
// to UTF-8 character boundaries and always contains the full span.
std::string excerpt_around(std::string_view text, MatchSpan span, std::size_t context = 40);

}  // namespace iotl
