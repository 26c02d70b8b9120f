#pragma once

// Workflow entry points shared by the command line tool and the Python
// module. Each reads its inputs from a RunConfig and writes outputs
// atomically into the configured output directory.

#include "hybridclf/checkpoint.hpp"
#include "hybridclf/config.hpp"
#include "hybridclf/crossval.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hybridclf {

/// Corpus statistics as JSON.
nlohmann::json run_stats(const RunConfig& config);

/// One line per document: {"id":..., "label":..., "tokens":[...]}.
std::string tokens_jsonl(const std::vector<Document>& corpus, const PreprocessConfig& config);

/// Writes <out_dir>/tokens.jsonl and returns its path.
std::filesystem::path run_preprocess(const RunConfig& config);

/// Trains on the whole corpus (minus the validation slice) and writes
/// <out_dir>/model.ckpt.json and <out_dir>/history.csv.
Checkpoint run_train(const RunConfig& config);

/// Writes fold_<i>_metrics.json, fold_<i>_roc.csv, aggregate.json and
/// history.csv into out_dir.
CrossValResult run_cross_validate(const RunConfig& config);

/// Metrics of a saved model on a labeled corpus.
MetricsReport run_evaluate(const Checkpoint& checkpoint, const std::filesystem::path& corpus,
                           const std::optional<std::string>& text_column = std::nullopt,
                           const std::optional<std::string>& label_column = std::nullopt);

struct TokenWeight {
    std::string token;
    double weight = 0;
};

struct Prediction {
    int label = 0;
    std::array<double, 2> probs{};
    /// Highest attention-weighted tokens, cnn_lstm_attn only.
    std::optional<std::vector<TokenWeight>> top_tokens;
};

/// Pooled position p covers tokens [p * pool, p * pool + pool + k - 1); its
/// weight is shared equally among the non-PAD tokens of that span and summed
/// per distinct token. Ordered by weight, ties by token.
std::vector<TokenWeight> attention_tokens(const EncodedSequence& seq, const Vocabulary& vocab,
                                          const ModelConfig& model, const std::vector<double>& alpha,
                                          std::size_t top_n);

Prediction predict_text(const Checkpoint& checkpoint, std::string_view text, std::size_t top_n = 10);

nlohmann::json prediction_to_json(const Prediction& p);

/// Loads the pretrained vectors named by the config, or an empty map.
PretrainedVectors load_configured_embeddings(const RunConfig& config);

}  // namespace hybridclf
