#include "iotl/text_match.hpp"

#include <algorithm>
#include <cctype>

namespace iotl {

namespace {

inline bool is_alnum_byte(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline char lower_byte(unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

inline bool is_utf8_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

}  // namespace

FoldedText FoldedText::of(std::string_view text) {
    FoldedText out;
    out.folded.reserve(text.size());
    out.origin.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_alnum_byte(c)) {
            out.folded.push_back(lower_byte(c));
            out.origin.push_back(i);
        }
    }
    return out;
}

std::string fold_key(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) {
        if (is_alnum_byte(c)) out.push_back(lower_byte(c));
    }
    return out;
}

int match_count(const std::vector<std::string>& patterns, std::string_view text,
                std::vector<MatchSpan>* spans) {
    // Longest pattern first so the greedy scan prefers "belkin international"
    // over "belkin" at the same position.
    std::vector<const std::string*> order;
    order.reserve(patterns.size());
    for (const auto& p : patterns) {
        if (!p.empty()) order.push_back(&p);
    }
    std::sort(order.begin(), order.end(), [](const std::string* a, const std::string* b) {
        if (a->size() != b->size()) return a->size() > b->size();
        return *a < *b;
    });
    if (order.empty()) return 0;

    const FoldedText ft = FoldedText::of(text);
    const std::string& f = ft.folded;

    auto boundary_ok = [&](std::size_t pos, std::size_t len) {
        // Word-boundary check in the original text, applied to short labels only.
        std::size_t ob = ft.origin[pos];
        std::size_t oe = ft.origin[pos + len - 1] + 1;
        bool before_ok = ob == 0 || !is_alnum_byte(static_cast<unsigned char>(text[ob - 1]));
        bool after_ok = oe >= text.size() || !is_alnum_byte(static_cast<unsigned char>(text[oe]));
        return before_ok && after_ok;
    };

    int count = 0;
    std::size_t i = 0;
    while (i < f.size()) {
        std::size_t advance = 1;
        for (const std::string* p : order) {
            const std::size_t len = p->size();
            if (len > f.size() - i) continue;
            if (f.compare(i, len, *p) != 0) continue;
            if (len <= 3 && !boundary_ok(i, len)) continue;
            ++count;
            if (spans) spans->push_back({ft.origin[i], ft.origin[i + len - 1] + 1});
            advance = len;
            break;
        }
        i += advance;
    }
    return count;
}

bool matches_any(const std::vector<std::string>& patterns, std::string_view text) {
    return match_count(patterns, text) > 0;
}

std::string excerpt_around(std::string_view text, MatchSpan span, std::size_t context) {
    std::size_t begin = span.begin > context ? span.begin - context : 0;
    std::size_t end = std::min(text.size(), span.end + context);
    while (begin > 0 && is_utf8_continuation(static_cast<unsigned char>(text[begin]))) --begin;
    while (end < text.size() && is_utf8_continuation(static_cast<unsigned char>(text[end]))) ++end;
    return std::string(text.substr(begin, end - begin));
}

}  // namespace iotl
