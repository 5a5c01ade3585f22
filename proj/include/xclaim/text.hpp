#pragma once

// Shared text utilities: tokenization and the keyword/cue matcher used by
// the sampling filters and the error-analysis cue reports.

#include <string>
#include <string_view>
#include <vector>

namespace xclaim {

// ASCII lowercase; bytes outside ASCII are left untouched (UTF-8 safe).
std::string to_lower(std::string_view s);

// True for bytes that belong to a word: ASCII alphanumerics and any
// non-ASCII byte (so UTF-8 umlauts etc. stay inside their token).
bool is_word_byte(unsigned char c);

// Splits text into word tokens; everything that is not a word byte separates.
std::vector<std::string> tokenize(std::string_view text);

// Matching strategy for keyword / actor / cue patterns.
class TextMatcher {
public:
    virtual ~TextMatcher() = default;

    // Does `pattern` match anywhere in `text`?
    virtual bool matches(std::string_view text, std::string_view pattern) const = 0;

    bool matches_any(std::string_view text, const std::vector<std::string>& patterns) const;
};

// Case-insensitive word-prefix matching: pattern "refugee" matches "refugees"
// and "Refugee", but not "subrefugee". Good enough for English plural and
// derivational variants; swap the matcher for languages that need more.
class TokenPrefixMatcher final : public TextMatcher {
public:
    bool matches(std::string_view text, std::string_view pattern) const override;
};

const TextMatcher& default_matcher();

}  // namespace xclaim
