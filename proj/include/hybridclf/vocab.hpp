#pragma once

#include "hybridclf/preprocess.hpp"
#include "hybridclf/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace hybridclf {

inline constexpr std::size_t kPadId = 0;
inline constexpr std::size_t kOovId = 1;
inline constexpr const char* kPadToken = "<pad>";
inline constexpr const char* kOovToken = "<oov>";

/// Token <-> id mapping with PAD = 0 and OOV = 1 reserved.
class Vocabulary {
public:
    /// PAD and OOV only.
    Vocabulary();

    /// From tokens in id order; the first two must be the reserved tokens.
    static Vocabulary from_tokens(std::vector<std::string> id_to_token);

    std::size_t size() const noexcept { return id_to_token_.size(); }
    std::size_t id_of(const std::string& token) const;  ///< kOovId when unknown
    bool contains(const std::string& token) const { return token_to_id_.contains(token); }
    const std::string& token(std::size_t id) const { return id_to_token_.at(id); }
    const std::vector<std::string>& tokens() const noexcept { return id_to_token_; }

    bool operator==(const Vocabulary& other) const { return id_to_token_ == other.id_to_token_; }

private:
    std::unordered_map<std::string, std::size_t> token_to_id_;
    std::vector<std::string> id_to_token_;
};

/// Keeps the `max_size` most frequent tokens; frequency ties go to the
/// lexicographically smaller token. Ids follow the same order from 2.
Vocabulary build_vocabulary(const std::vector<TokenSequence>& sequences, std::size_t max_size);

struct EncodedSequence {
    std::vector<std::size_t> ids;   ///< exactly T entries, PAD only as a suffix
    std::size_t true_length = 0;    ///< number of non-PAD positions

    bool operator==(const EncodedSequence&) const = default;
};

/// Maps to ids (OOV for unknown), keeps the first T tokens, pads at the end.
EncodedSequence encode(const TokenSequence& seq, const Vocabulary& vocab, std::size_t seq_len);

/// Tokens of the non-PAD prefix, OOV positions rendered as the OOV token.
std::vector<std::string> decode(const EncodedSequence& seq, const Vocabulary& vocab);

using PretrainedVectors = std::unordered_map<std::string, std::vector<double>>;

/// Reads the plain-text GloVe format: one "token v1 ... vd" entry per line.
PretrainedVectors load_embedding_file(const std::filesystem::path& path, std::size_t expected_dim);
PretrainedVectors parse_embedding_text(std::string_view text, std::size_t expected_dim);

/// Frozen |V| x d lookup table. Never part of the trainable parameters.
struct EmbeddingTable {
    Tensor matrix;

    std::size_t vocab_size() const { return matrix.rows(); }
    std::size_t dim() const { return matrix.cols(); }
    bool operator==(const EmbeddingTable&) const = default;
};

/// PAD row is zero; tokens found in `pretrained` copy their vector; all other
/// rows (OOV, bigrams, misses) are drawn uniformly from [-0.05, 0.05] with
/// Rng(derive_seed(seed, "embedding")), row by row in id order.
EmbeddingTable assemble_embedding(const Vocabulary& vocab, const PretrainedVectors& pretrained,
                                  std::size_t dim, std::uint64_t seed);

/// T x d matrix whose row t is the table row of ids[t].
Tensor embed(const EncodedSequence& seq, const EmbeddingTable& table);

}  // namespace hybridclf
