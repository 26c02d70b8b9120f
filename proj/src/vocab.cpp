#include "hybridclf/vocab.hpp"

#include "hybridclf/errors.hpp"
#include "hybridclf/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace hybridclf {

Vocabulary::Vocabulary() : token_to_id_{{kPadToken, kPadId}, {kOovToken, kOovId}}, id_to_token_{kPadToken, kOovToken} {}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> id_to_token) {
    if (id_to_token.size() < 2 || id_to_token[kPadId] != kPadToken || id_to_token[kOovId] != kOovToken) {
        throw FormatError("vocabulary must start with the reserved tokens <pad> and <oov>");
    }
    Vocabulary v;
    v.id_to_token_ = std::move(id_to_token);
    v.token_to_id_.clear();
    v.token_to_id_.reserve(v.id_to_token_.size());
    for (std::size_t i = 0; i < v.id_to_token_.size(); ++i) {
        if (!v.token_to_id_.emplace(v.id_to_token_[i], i).second) {
            throw FormatError("duplicate vocabulary token '" + v.id_to_token_[i] + "'");
        }
    }
    return v;
}

std::size_t Vocabulary::id_of(const std::string& token) const {
    const auto it = token_to_id_.find(token);
    return it == token_to_id_.end() ? kOovId : it->second;
}

Vocabulary build_vocabulary(const std::vector<TokenSequence>& sequences, std::size_t max_size) {
    if (max_size < 1) throw ConfigError("max vocabulary size must be at least 1");
    std::unordered_map<std::string, std::size_t> freq;
    for (const TokenSequence& seq : sequences)
        for (const std::string& t : seq.tokens) ++freq[t];
    // The reserved spellings cannot come out of the tokenizer, but guard anyway.
    freq.erase(kPadToken);
    freq.erase(kOovToken);

    std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (ranked.size() > max_size) ranked.resize(max_size);

    std::vector<std::string> tokens{kPadToken, kOovToken};
    for (auto& [tok, count] : ranked) tokens.push_back(std::move(tok));
    return Vocabulary::from_tokens(std::move(tokens));
}

EncodedSequence encode(const TokenSequence& seq, const Vocabulary& vocab, std::size_t seq_len) {
    if (seq_len < 1) throw ConfigError("sequence length must be at least 1");
    EncodedSequence out;
    out.ids.assign(seq_len, kPadId);
    out.true_length = std::min(seq.tokens.size(), seq_len);
    for (std::size_t t = 0; t < out.true_length; ++t) out.ids[t] = vocab.id_of(seq.tokens[t]);
    return out;
}

std::vector<std::string> decode(const EncodedSequence& seq, const Vocabulary& vocab) {
    std::vector<std::string> out;
    for (std::size_t t = 0; t < seq.true_length; ++t) out.push_back(vocab.token(seq.ids[t]));
    return out;
}

PretrainedVectors parse_embedding_text(std::string_view text, std::size_t expected_dim) {
    PretrainedVectors out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        std::vector<std::string_view> parts;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
            const std::size_t start = i;
            while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
            if (i > start) parts.push_back(line.substr(start, i - start));
        }
        if (parts.empty()) continue;
        if (parts.size() != expected_dim + 1) {
            throw FormatError::at_line(line_no, "expected token plus " + std::to_string(expected_dim) +
                                                    " components, found " +
                                                    std::to_string(parts.size() - 1));
        }
        std::vector<double> vec(expected_dim);
        for (std::size_t k = 0; k < expected_dim; ++k) {
            const std::string_view s = parts[k + 1];
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), vec[k]);
            if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(vec[k])) {
                throw FormatError::at_line(line_no, "component " + std::to_string(k + 1) + " '" +
                                                        std::string(s) + "' is not a finite number");
            }
        }
        out.emplace(std::string(parts[0]), std::move(vec));
    }
    return out;
}

PretrainedVectors load_embedding_file(const std::filesystem::path& path, std::size_t expected_dim) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open embedding file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_embedding_text(buf.str(), expected_dim);
}

EmbeddingTable assemble_embedding(const Vocabulary& vocab, const PretrainedVectors& pretrained,
                                  std::size_t dim, std::uint64_t seed) {
    if (dim == 0) throw ConfigError("embedding dimension must be positive");
    for (const auto& [tok, vec] : pretrained) {
        if (vec.size() != dim) {
            throw ConfigError("pretrained vector for '" + tok + "' has dimension " +
                              std::to_string(vec.size()) + ", expected " + std::to_string(dim));
        }
    }
    EmbeddingTable table{Tensor({vocab.size(), dim})};
    Rng rng(derive_seed(seed, "embedding"));
    for (std::size_t id = 0; id < vocab.size(); ++id) {
        if (id == kPadId) continue;
        double* row = table.matrix.row(id);
        const auto it = id == kOovId ? pretrained.end() : pretrained.find(vocab.token(id));
        if (it != pretrained.end()) {
            std::copy(it->second.begin(), it->second.end(), row);
        } else {
            for (std::size_t k = 0; k < dim; ++k) row[k] = rng.uniform(-0.05, 0.05);
        }
    }
    return table;
}

Tensor embed(const EncodedSequence& seq, const EmbeddingTable& table) {
    const std::size_t d = table.dim();
    Tensor out({seq.ids.size(), d});
    for (std::size_t t = 0; t < seq.ids.size(); ++t) {
        const std::size_t id = seq.ids[t];
        if (id >= table.vocab_size()) {
            throw ShapeError("embed: id " + std::to_string(id) + " outside table of " +
                             std::to_string(table.vocab_size()) + " rows");
        }
        std::copy_n(table.matrix.row(id), d, out.row(t));
    }
    return out;
}

}  // namespace hybridclf
