#include "hybridclf/preprocess.hpp"

#include "hybridclf/corpus.hpp"
#include "hybridclf/errors.hpp"

#include <algorithm>
#include <array>
#include <cstdint>

namespace hybridclf {

const std::vector<std::string_view>& embedded_stop_word_list() {
    static const std::vector<std::string_view> words = {
        "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "your", "yours",
        "yourself", "yourselves", "he", "him", "his", "himself", "she", "her", "hers", "herself",
        "it", "its", "itself", "they", "them", "their", "theirs", "themselves", "what", "which",
        "who", "whom", "this", "that", "these", "those", "am", "is", "are", "was", "were", "be",
        "been", "being", "have", "has", "had", "having", "do", "does", "did", "doing", "a", "an",
        "the", "and", "but", "if", "or", "because", "as", "until", "while", "of", "at", "by",
        "for", "with", "about", "against", "between", "into", "through", "during", "before",
        "after", "above", "below", "to", "from", "up", "down", "in", "out", "on", "off", "over",
        "under", "again", "further", "then", "once", "here", "there", "when", "where", "why",
        "how", "all", "any", "both", "each", "few", "more", "most", "other", "some", "such", "no",
        "nor", "not", "only", "own", "same", "so", "than", "too", "very", "s", "t", "can", "will",
        "just", "don", "should", "now", "d", "ll", "m", "o", "re", "ve", "y", "ain", "aren",
        "couldn", "didn", "doesn", "hadn", "hasn", "haven", "isn", "ma", "mightn", "mustn",
        "needn", "shan", "shouldn", "wasn", "weren", "won", "wouldn",
    };
    return words;
}

const StopWordSet& default_stop_words() {
    static const StopWordSet words = [] {
        StopWordSet s;
        for (std::string_view w : embedded_stop_word_list()) {
            s.emplace(w);
            s.insert(lemmatize(w));
        }
        return s;
    }();
    return words;
}

void PreprocessConfig::validate() const {
    if (min_token_len < 1) throw ConfigError("min_token_len must be at least 1");
}

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool iequals_prefix(std::string_view text, std::size_t pos, std::string_view word) {
    if (pos + word.size() > text.size()) return false;
    for (std::size_t i = 0; i < word.size(); ++i)
        if (lower(text[pos + i]) != word[i]) return false;
    return true;
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

// Decodes the entity starting at text[pos] == '&'. On success appends the
// decoded text and returns the position after ';'. Otherwise returns pos.
std::size_t decode_entity(std::string_view text, std::size_t pos, std::string& out) {
    const std::size_t semi = text.find(';', pos + 1);
    if (semi == std::string_view::npos || semi - pos > 12) return pos;
    const std::string_view body = text.substr(pos + 1, semi - pos - 1);
    if (body.empty()) return pos;

    if (body[0] == '#') {
        std::uint32_t cp = 0;
        const bool hex = body.size() > 1 && (body[1] == 'x' || body[1] == 'X');
        const std::string_view digits = body.substr(hex ? 2 : 1);
        if (digits.empty()) return pos;
        for (char c : digits) {
            std::uint32_t v;
            if (c >= '0' && c <= '9') v = static_cast<std::uint32_t>(c - '0');
            else if (hex && c >= 'a' && c <= 'f') v = static_cast<std::uint32_t>(c - 'a' + 10);
            else if (hex && c >= 'A' && c <= 'F') v = static_cast<std::uint32_t>(c - 'A' + 10);
            else return pos;
            cp = cp * (hex ? 16 : 10) + v;
            if (cp > 0x10FFFF) return pos;
        }
        if (cp == 0 || (cp >= 0xD800 && cp <= 0xDFFF)) {
            out += ' ';
        } else {
            append_utf8(out, cp);
        }
        return semi + 1;
    }

    static constexpr std::array<std::pair<std::string_view, std::string_view>, 6> named = {{
        {"amp", "&"}, {"lt", "<"}, {"gt", ">"}, {"quot", "\""}, {"apos", "'"}, {"nbsp", " "},
    }};
    for (const auto& [name, value] : named) {
        if (body == name) {
            out += value;
            return semi + 1;
        }
    }
    return pos;
}

// Scans an opening tag beginning at text[pos] == '<' followed by a letter.
// Appends " name attr1 attr2 " to `out` and returns the position after '>'.
// Returns npos when the tag never closes. `name_out` receives the lowercase
// tag name and `self_closing` whether the tag ended in "/>".
std::size_t scan_open_tag(std::string_view text, std::size_t pos, std::string& out,
                          std::string& name_out, bool& self_closing) {
    std::size_t i = pos + 1;
    std::string words = " ";
    name_out.clear();
    while (i < text.size() && !is_space(text[i]) && text[i] != '>' && text[i] != '/') {
        name_out += lower(text[i]);
        ++i;
    }
    words += name_out;
    self_closing = false;
    while (i < text.size()) {
        const char c = text[i];
        if (is_space(c)) {
            ++i;
        } else if (c == '>') {
            out += words;
            out += ' ';
            return i + 1;
        } else if (c == '/') {
            self_closing = i + 1 < text.size() && text[i + 1] == '>';
            ++i;
        } else {
            self_closing = false;
            std::string attr;
            while (i < text.size() && !is_space(text[i]) && text[i] != '=' && text[i] != '>' &&
                   text[i] != '/') {
                attr += text[i];
                ++i;
            }
            if (attr.empty()) {
                ++i;  // stray character such as a lone quote
                continue;
            }
            words += ' ';
            words += attr;
            while (i < text.size() && is_space(text[i])) ++i;
            if (i < text.size() && text[i] == '=') {
                ++i;
                while (i < text.size() && is_space(text[i])) ++i;
                if (i < text.size() && (text[i] == '"' || text[i] == '\'')) {
                    const std::size_t close = text.find(text[i], i + 1);
                    if (close == std::string_view::npos) return std::string_view::npos;
                    i = close + 1;
                } else {
                    while (i < text.size() && !is_space(text[i]) && text[i] != '>') ++i;
                }
            }
        }
    }
    return std::string_view::npos;
}

std::string strip_markup_pass(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '&') {
            const std::size_t next = decode_entity(text, i, out);
            if (next != i) {
                i = next;
                continue;
            }
            out += c;
            ++i;
            continue;
        }
        if (c != '<' || i + 1 >= text.size()) {
            out += c;
            ++i;
            continue;
        }
        const char n = text[i + 1];
        if (text.substr(i, 4) == "<!--") {
            const std::size_t end = text.find("-->", i + 4);
            i = end == std::string_view::npos ? text.size() : end + 3;
            out += ' ';
        } else if (n == '!' || n == '?' || (n == '/' && i + 2 < text.size() && is_alpha(text[i + 2]))) {
            const std::size_t end = text.find('>', i + 2);
            if (end == std::string_view::npos) {
                out += c;
                ++i;
            } else {
                i = end + 1;
                out += ' ';
            }
        } else if (is_alpha(n)) {
            std::string name;
            bool self_closing = false;
            const std::size_t end = scan_open_tag(text, i, out, name, self_closing);
            if (end == std::string_view::npos) {
                out += c;
                ++i;
                continue;
            }
            i = end;
            if ((name == "script" || name == "style") && !self_closing) {
                const std::string closing = "</" + name;
                std::size_t j = i;
                while (j < text.size() && !iequals_prefix(text, j, closing)) ++j;
                const std::size_t gt = j < text.size() ? text.find('>', j) : std::string_view::npos;
                i = gt == std::string_view::npos ? text.size() : gt + 1;
                out += ' ';
            }
        } else {
            out += c;
            ++i;
        }
    }
    return out;
}

}  // namespace

std::string clean(std::string_view text, bool strip_markup) {
    const std::string stripped = strip_markup ? strip_markup_pass(text) : std::string(text);
    std::string out;
    out.reserve(stripped.size());
    bool pending_space = false;
    for (char c : stripped) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out += ' ';
        pending_space = false;
        out += lower(c);
    }
    return out;
}

namespace {

bool is_token_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '@' || c == '_' || u >= 0x80;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, std::size_t min_token_len) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && !is_token_char(text[i])) ++i;
        const std::size_t start = i;
        while (i < text.size() && is_token_char(text[i])) ++i;
        if (i == start) continue;
        const std::string_view tok = text.substr(start, i - start);
        if (char_length(tok) < min_token_len) continue;
        if (std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; })) continue;
        tokens.emplace_back(tok);
    }
    return tokens;
}

namespace {

bool ends_with(std::string_view w, std::string_view suffix) {
    return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

bool is_consonant(std::string_view w, std::size_t i) {
    switch (w[i]) {
        case 'a': case 'e': case 'i': case 'o': case 'u':
            return false;
        case 'y':
            return i == 0 || !is_consonant(w, i - 1);
        default:
            return true;
    }
}

// Number of vowel-run/consonant-run pairs in [C](VC)^m[V].
std::size_t measure(std::string_view w) {
    std::size_t m = 0;
    std::size_t i = 0;
    const std::size_t n = w.size();
    while (i < n && is_consonant(w, i)) ++i;
    while (i < n) {
        while (i < n && !is_consonant(w, i)) ++i;
        if (i >= n) break;
        while (i < n && is_consonant(w, i)) ++i;
        ++m;
    }
    return m;
}

bool has_vowel(std::string_view w) {
    for (std::size_t i = 0; i < w.size(); ++i)
        if (!is_consonant(w, i)) return true;
    return false;
}

bool ends_double_consonant(std::string_view w) {
    const std::size_t n = w.size();
    return n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1);
}

bool ends_cvc(std::string_view w) {
    const std::size_t n = w.size();
    if (n < 3) return false;
    if (!is_consonant(w, n - 3) || is_consonant(w, n - 2) || !is_consonant(w, n - 1)) return false;
    const char last = w[n - 1];
    return last != 'w' && last != 'x' && last != 'y';
}

std::string restore_stem(std::string stem) {
    if (ends_with(stem, "at") || ends_with(stem, "bl") || ends_with(stem, "iz")) return stem + "e";
    if (ends_double_consonant(stem)) {
        const char last = stem.back();
        if (last != 'l' && last != 's' && last != 'z') stem.pop_back();
        return stem;
    }
    if (measure(stem) == 1 && ends_cvc(stem)) return stem + "e";
    return stem;
}

// One application of the first matching rule; returns the input unchanged
// when no rule fires. Every firing rule shortens the word.
std::string lemma_step(const std::string& w) {
    const std::size_t n = w.size();
    if (ends_with(w, "sses")) return w.substr(0, n - 2);
    if (ends_with(w, "ies") && n >= 4) return n > 4 ? w.substr(0, n - 3) + "y" : w.substr(0, n - 1);
    if (ends_with(w, "s")) {
        if (n > 3 && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is"))
            return w.substr(0, n - 1);
        return w;
    }
    if (ends_with(w, "eed")) {
        return measure(std::string_view(w).substr(0, n - 3)) > 0 ? w.substr(0, n - 1) : w;
    }
    for (std::string_view suffix : {std::string_view("ing"), std::string_view("ed")}) {
        if (ends_with(w, suffix)) {
            const std::string stem = w.substr(0, n - suffix.size());
            if (stem.size() >= 2 && has_vowel(stem)) return restore_stem(stem);
            return w;
        }
    }
    return w;
}

}  // namespace

std::string lemmatize(std::string_view token) {
    std::string current(token);
    while (true) {
        std::string next = lemma_step(current);
        if (next == current) return current;
        current = std::move(next);
    }
}

std::vector<std::string> remove_stop_words(const std::vector<std::string>& tokens,
                                           const StopWordSet& stop_words) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const std::string& t : tokens)
        if (!stop_words.contains(t)) out.push_back(t);
    return out;
}

std::vector<std::string> generate_bigrams(const std::vector<std::string>& tokens) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) out.push_back(tokens[i] + "_" + tokens[i + 1]);
    return out;
}

TokenSequence preprocess(std::string_view text, const PreprocessConfig& config) {
    config.validate();
    std::vector<std::string> tokens = tokenize(clean(text, config.strip_markup), config.min_token_len);
    for (std::string& t : tokens) t = lemmatize(t);
    TokenSequence seq{remove_stop_words(tokens, config.stop_words)};
    if (config.emit_bigrams) {
        std::vector<std::string> bigrams = generate_bigrams(seq.tokens);
        seq.tokens.insert(seq.tokens.end(), std::make_move_iterator(bigrams.begin()),
                          std::make_move_iterator(bigrams.end()));
    }
    return seq;
}

}  // namespace hybridclf
