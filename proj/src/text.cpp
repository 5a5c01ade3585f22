#include "xclaim/text.hpp"

#include <cctype>

namespace xclaim {

std::string to_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) {
        out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    }
    return out;
}

bool is_word_byte(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (is_word_byte(c)) {
            current.push_back(static_cast<char>(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

bool TextMatcher::matches_any(std::string_view text, const std::vector<std::string>& patterns) const {
    for (const auto& p : patterns) {
        if (matches(text, p)) return true;
    }
    return false;
}

bool TokenPrefixMatcher::matches(std::string_view text, std::string_view pattern) const {
    if (pattern.empty()) return false;
    const std::string needle = to_lower(pattern);
    for (const auto& token : tokenize(text)) {
        if (to_lower(token).starts_with(needle)) return true;
    }
    return false;
}

const TextMatcher& default_matcher() {
    static const TokenPrefixMatcher matcher;
    return matcher;
}

}  // namespace xclaim
