#pragma once

#include "hybridclf/metrics.hpp"
#include "hybridclf/model.hpp"
#include "hybridclf/vocab.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace hybridclf {

struct TrainConfig {
    std::size_t epochs = 20;
    std::size_t batch_size = 32;
    double learning_rate = 0.001;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::size_t k = 5;
    std::uint64_t seed = 0;
    bool class_weighting = true;
    std::optional<double> grad_clip_norm = 5.0;  ///< absent disables clipping
    /// Share of each training portion held out for the validation curves.
    double validation_fraction = 0.1;

    void validate() const;
};

/// First and second moments per parameter, in ModelParams::named order.
struct AdamState {
    std::vector<Tensor> m, v;
    std::size_t t = 0;

    static AdamState for_params(const ModelParams& params);
};

inline constexpr double kProbFloor = 1e-12;

/// -weight * log(max(probs[label], 1e-12)).
double cross_entropy(const std::array<double, 2>& probs, int label, double weight = 1.0);

/// Derivative of cross_entropy with respect to the probability pair.
std::array<double, 2> cross_entropy_grad(const std::array<double, 2>& probs, int label, double weight = 1.0);

/// weight_c = N / (2 N_c). Throws ConfigError when a class is missing.
std::array<double, 2> class_weights(std::span<const int> labels);

double global_norm(const ModelParams& grads);

/// Rescales `grads` so its global L2 norm is at most `max_norm`; returns the
/// norm before scaling.
double clip_global_norm(ModelParams& grads, double max_norm);

/// Bias-corrected Adam update of every tensor in `params`.
void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, const TrainConfig& config);

struct Sample {
    std::size_t id = 0;
    EncodedSequence seq;
    int label = 0;
};

struct EpochRecord {
    std::size_t epoch = 0;  ///< 1-based
    double train_loss = 0, train_acc = 0, val_loss = 0, val_acc = 0;
    bool operator==(const EpochRecord&) const = default;
};

struct TrainResult {
    ModelParams params;
    std::vector<EpochRecord> history;
    /// Document ids read by this run, training and validation slices both.
    std::set<std::size_t> touched_ids;
};

/// Mean weighted loss and accuracy of `samples` in inference mode.
struct LossAccuracy {
    double loss = 0, accuracy = 0;
};
LossAccuracy loss_and_accuracy(std::span<const Sample> samples, const EmbeddingTable& table,
                               const ModelConfig& model, const ModelParams& params,
                               const std::array<double, 2>& weights);

/// Mini-batch training. Each epoch shuffles the training samples with a
/// seeded generator, keeps the final short batch, and records training and
/// validation loss/accuracy. With an empty `val_set` the validation columns
/// are measured on `train_set` in inference mode. Parameters start from
/// `init` when given, else from init_params(model, config.seed).
TrainResult train(std::span<const Sample> train_set, std::span<const Sample> val_set,
                  const EmbeddingTable& table, const ModelConfig& model, const TrainConfig& config,
                  const std::optional<ModelParams>& init = std::nullopt);

/// Class probabilities for each sample in inference mode.
std::vector<std::array<double, 2>> predict_all(std::span<const Sample> samples, const EmbeddingTable& table,
                                               const ModelConfig& model, const ModelParams& params);

MetricsReport evaluate(std::span<const Sample> samples, const EmbeddingTable& table, const ModelConfig& model,
                       const ModelParams& params);

/// "epoch,train_loss,train_acc,val_loss,val_acc" with one row per record;
/// `fold` adds a leading fold column.
std::string history_csv_header(bool with_fold);
std::string history_csv_row(const EpochRecord& r, std::optional<std::size_t> fold = std::nullopt);

}  // namespace hybridclf
