#pragma once

#include "hybridclf/layers.hpp"
#include "hybridclf/rng.hpp"
#include "hybridclf/vocab.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hybridclf {

enum class Variant { cnn, lstm, cnn_lstm, cnn_lstm_attn };

std::string to_string(Variant v);
Variant parse_variant(std::string_view name);

struct ModelConfig {
    Variant variant = Variant::cnn_lstm_attn;
    std::size_t seq_len = 200;
    std::size_t embed_dim = 100;
    std::size_t filters = 128;
    std::size_t kernel_size = 5;
    std::size_t pool_size = 5;
    std::size_t num_heads = 4;
    std::size_t key_dim = 64;
    std::size_t lstm_units = 128;
    double dropout = 0.3;
    bool forget_bias_one = true;
    bool bias_inside_relu = false;

    void validate() const;

    bool uses_conv() const { return variant != Variant::lstm; }
    bool uses_lstm() const { return variant != Variant::cnn; }
    bool uses_attention() const { return variant == Variant::cnn_lstm_attn; }

    std::size_t conv_length() const { return seq_len - kernel_size + 1; }
    std::size_t pooled_length() const { return conv_length() / pool_size; }
    /// Width of the vector fed to the dense head.
    std::size_t feature_dim() const { return variant == Variant::cnn ? filters : lstm_units; }
};

/// Every trainable tensor of the network. Blocks a variant does not use are
/// left empty. The embedding table is deliberately not part of this.
struct ModelParams {
    std::optional<ConvParams> conv;
    std::optional<MhaParams> mha;
    std::optional<LstmParams> lstm;
    std::optional<AttnParams> attn;
    DenseParams dense;

    /// Stable (name, tensor) list, e.g. "conv.filters", "mha.head0.w_q",
    /// "lstm.u_f", "attn.u", "dense.w".
    std::vector<std::pair<std::string, Tensor*>> named();
    std::vector<std::pair<std::string, const Tensor*>> named() const;

    ModelParams zeros_like() const;
    std::size_t parameter_count() const;

    bool operator==(const ModelParams& other) const;
};

/// Glorot-uniform matrices, zero biases, LSTM forget bias 1 when enabled.
ModelParams init_params(const ModelConfig& config, std::uint64_t seed);

/// Expected (name, shape) of every trainable tensor, in `ModelParams::named` order.
std::vector<std::pair<std::string, Shape>> parameter_shapes(const ModelConfig& config);

/// Throws ConfigError when `params` does not have the blocks and shapes the
/// configured variant needs.
void check_params(const ModelConfig& config, const ModelParams& params);

/// Number of live rows seen by the pooled-sequence consumers:
/// ceil((true_length - k + 1) / pool) clamped to [1, pooled_length] for the
/// convolutional variants, true_length clamped to [1, seq_len] for lstm.
std::size_t effective_length(const ModelConfig& config, std::size_t true_length);

struct ForwardTrace {
    Tensor embedded;
    Conv1dCache conv;
    PoolCache pool;
    MhaCache mha;
    LstmCache lstm;
    AttnCache attn;
    std::size_t live = 0;
    Tensor feature;
    Tensor dropout_mask;
    DenseCache dense;
};

struct ForwardResult {
    std::array<double, 2> probs{};
    /// Attention weights over the pooled positions (cnn_lstm_attn only).
    std::optional<std::vector<double>> attention;
    /// Shapes from the embedded input to the output probabilities.
    std::vector<Shape> shape_chain;
};

/// Runs the configured variant on one encoded sequence. Dropout is active only
/// when `training` is set, drawing from `dropout_rng`.
ForwardResult hybrid_forward(const EncodedSequence& seq, const EmbeddingTable& table,
                             const ModelConfig& config, const ModelParams& params, bool training,
                             Rng* dropout_rng = nullptr, ForwardTrace* trace = nullptr);

/// Backpropagates `d_probs` through a recorded pass and adds the parameter
/// gradients into `grads` (shaped like `params`).
void hybrid_backward(const ForwardTrace& trace, const ModelConfig& config, const ModelParams& params,
                     const std::array<double, 2>& d_probs, ModelParams& grads);

}  // namespace hybridclf
