#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hybridclf {

/// Preprocessed tokens: lowercase unigrams followed by underscore-joined bigrams.
struct TokenSequence {
    std::vector<std::string> tokens;

    bool operator==(const TokenSequence&) const = default;
};

using StopWordSet = std::set<std::string, std::less<>>;

/// The embedded English stop-word list together with the lemmatized form of
/// each entry, so that filtering after lemmatization still catches inflected
/// stop words ("does" -> "doe").
const StopWordSet& default_stop_words();

/// The raw embedded list, in its documented order.
const std::vector<std::string_view>& embedded_stop_word_list();

struct PreprocessConfig {
    StopWordSet stop_words = default_stop_words();
    std::size_t min_token_len = 2;
    bool emit_bigrams = true;
    bool strip_markup = true;

    void validate() const;
};

/// Lowercases and collapses whitespace. With `strip_markup`: tag delimiters
/// are removed, opening-tag and attribute names are kept as words, closing
/// tags, comments and declarations vanish, <script>/<style> bodies are
/// dropped and character entities are decoded.
std::string clean(std::string_view text, bool strip_markup);

/// Splits on runs of characters other than ASCII alphanumerics, '@', '_'
/// and non-ASCII bytes. Drops tokens shorter than `min_token_len` code points
/// and tokens made only of digits.
std::vector<std::string> tokenize(std::string_view text, std::size_t min_token_len);

/// Rule-based suffix stripping applied until no rule fires:
///   sses -> ss;  ies -> y (ie when the word has 4 letters);
///   trailing s dropped when the word is longer than 3 and does not end in ss/us/is;
///   eed -> ee when the stem before "eed" has measure > 0 (words ending in eed
///     are otherwise left alone);
///   ing / ed dropped when the remaining stem contains a vowel, then
///     at/bl/iz -> +e, a doubled final consonant other than l/s/z is undoubled,
///     and a measure-1 consonant-vowel-consonant stem (last letter not w/x/y)
///     gets a silent e restored.
/// Idempotent by construction.
std::string lemmatize(std::string_view token);

std::vector<std::string> remove_stop_words(const std::vector<std::string>& tokens,
                                           const StopWordSet& stop_words);

/// "a","b","c" -> "a_b","b_c".
std::vector<std::string> generate_bigrams(const std::vector<std::string>& tokens);

/// clean -> tokenize -> lemmatize -> remove stop words -> append bigrams.
TokenSequence preprocess(std::string_view text, const PreprocessConfig& config);

}  // namespace hybridclf
