#pragma once

#include "hybridclf/corpus.hpp"
#include "hybridclf/preprocess.hpp"
#include "hybridclf/training.hpp"

#include <cstddef>
#include <vector>

namespace hybridclf {

struct ExperimentConfig {
    PreprocessConfig preprocess;
    std::size_t vocab_size = 5000;
    ModelConfig model;
    TrainConfig train;
};

/// Everything a single fold produced, with the id bookkeeping that the
/// protocol checks read.
struct FoldOutcome {
    std::size_t fold = 0;
    std::vector<std::size_t> train_ids;       ///< every document outside the test fold
    std::vector<std::size_t> validation_ids;  ///< subset of train_ids not used for updates
    std::vector<std::size_t> test_ids;
    Vocabulary vocab;
    bool table_unchanged = false;  ///< embedding table bit-identical after training
    std::set<std::size_t> touched_ids;
    std::vector<EpochRecord> history;
    std::vector<std::array<double, 2>> test_probs;
    MetricsReport report;
};

struct CrossValResult {
    std::vector<FoldOutcome> folds;
    std::array<MetricSummary, 5> aggregate;
    CorrelationMatrix correlation;
};

/// Encodes documents with a vocabulary.
std::vector<Sample> make_samples(const std::vector<Document>& corpus, const std::vector<TokenSequence>& tokens,
                                 std::span<const std::size_t> indices, const Vocabulary& vocab, std::size_t seq_len);

/// Stratified k-fold evaluation. Per fold the vocabulary, embedding table and
/// class weights come from that fold's training documents only. Folds run on
/// up to `jobs` threads; results do not depend on `jobs`.
CrossValResult cross_validate(const std::vector<Document>& corpus, const ExperimentConfig& config,
                              const PretrainedVectors& pretrained, std::size_t jobs = 1);

nlohmann::json aggregate_to_json(const CrossValResult& result);

}  // namespace hybridclf
