#pragma once

// Architecture blocks with explicit forward/backward passes. Forward functions
// optionally fill a cache; the matching backward consumes that cache and the
// upstream gradient and returns gradients for the input and the parameters.

#include "hybridclf/rng.hpp"
#include "hybridclf/tensor.hpp"

#include <cstddef>
#include <vector>

namespace hybridclf {

/// Uniform Glorot initialisation with limit sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(Shape shape, std::size_t fan_in, std::size_t fan_out, Rng& rng);

// ---------------------------------------------------------------------------
// Conv1D

struct ConvParams {
    Tensor filters;  ///< F x k x d_in
    Tensor bias;     ///< F

    std::size_t num_filters() const { return filters.dim(0); }
    std::size_t width() const { return filters.dim(1); }
    std::size_t input_dim() const { return filters.dim(2); }
};

struct Conv1dCache {
    Tensor input;
    Tensor preact;  ///< filter response before ReLU (bias included when inside)
};

/// Valid 1-D convolution: out[i][f] = relu(<filters[f], X[i:i+k]>) + bias[f].
/// With `bias_inside_relu` the conventional relu(<...> + bias) is used instead.
/// X is T x d_in, output (T - k + 1) x F.
Tensor conv1d_forward(const Tensor& x, const ConvParams& params, bool bias_inside_relu = false,
                      Conv1dCache* cache = nullptr);

struct Conv1dGrads {
    Tensor d_input;
    ConvParams d_params;
};
Conv1dGrads conv1d_backward(const Conv1dCache& cache, const ConvParams& params,
                            bool bias_inside_relu, const Tensor& d_out);

// ---------------------------------------------------------------------------
// Max pooling over the time axis

enum class PoolMode { windowed, global };

struct PoolCache {
    Shape input_shape;
    std::size_t pool = 1;
    PoolMode mode = PoolMode::windowed;
    std::vector<std::size_t> argmax;
};

/// windowed: non-overlapping windows of `pool` rows, trailing remainder
/// dropped, floor(L / pool) x F. global: 1 x F column maxima. Ties go to the
/// earliest row.
Tensor maxpool(const Tensor& c, std::size_t pool, PoolMode mode, PoolCache* cache = nullptr);
Tensor maxpool_backward(const PoolCache& cache, const Tensor& d_out);

// ---------------------------------------------------------------------------
// Multi-head scaled dot-product self-attention (no masking, no positions)

struct MhaParams {
    std::vector<Tensor> w_q, w_k, w_v;  ///< per head, d_model x key_dim
    Tensor w_out;                       ///< (heads * key_dim) x d_model

    std::size_t num_heads() const { return w_q.size(); }
    std::size_t key_dim() const { return w_q.empty() ? 0 : w_q.front().cols(); }
    std::size_t model_dim() const { return w_out.cols(); }
};

struct MhaCache {
    Tensor input;
    std::vector<Tensor> q, k, v;
    std::vector<Tensor> attention;  ///< per head, L x L, rows sum to 1
    Tensor heads;                   ///< L x (heads * key_dim)
};

/// Per head A = softmax(Q K^T / sqrt(key_dim)) row-wise, head = A V; heads
/// concatenated and projected by w_out.
Tensor mha_forward(const Tensor& x, const MhaParams& params, MhaCache* cache = nullptr);

struct MhaGrads {
    Tensor d_input;
    MhaParams d_params;
};
MhaGrads mha_backward(const MhaCache& cache, const MhaParams& params, const Tensor& d_out);

// ---------------------------------------------------------------------------
// LSTM (returns the hidden state of every step)

struct LstmParams {
    Tensor w_i, w_f, w_o, w_c;  ///< d_in x h
    Tensor u_i, u_f, u_o, u_c;  ///< h x h
    Tensor b_i, b_f, b_o, b_c;  ///< h

    std::size_t input_dim() const { return w_i.rows(); }
    std::size_t hidden_dim() const { return w_i.cols(); }
};

struct LstmCache {
    Tensor input;
    Tensor h0, c0;
    Tensor gate_i, gate_f, gate_o, candidate;  ///< L x h each
    Tensor cell, hidden, cell_tanh;            ///< L x h each
    std::size_t steps = 0;                     ///< cell evaluations performed
};

/// Per step t:
///   i = s(x W_i + h U_i + b_i), f = s(x W_f + h U_f + b_f), o = s(x W_o + h U_o + b_o)
///   g = tanh(x W_c + h U_c + b_c), c = f * c_prev + i * g, h = o * tanh(c)
/// h0/c0 default to zero vectors.
Tensor lstm_forward(const Tensor& x, const LstmParams& params, const Tensor* h0 = nullptr,
                    const Tensor* c0 = nullptr, LstmCache* cache = nullptr);

struct LstmGrads {
    Tensor d_input;
    LstmParams d_params;
    Tensor d_h0, d_c0;
};
LstmGrads lstm_backward(const LstmCache& cache, const LstmParams& params, const Tensor& d_hidden);

// ---------------------------------------------------------------------------
// Contextual soft attention over LSTM states

struct AttnParams {
    Tensor u;  ///< h
};

struct SoftAttentionResult {
    Tensor context;  ///< h
    Tensor alpha;    ///< L, zero beyond the live prefix
};

struct AttnCache {
    Tensor hidden;
    Tensor alpha;
    std::size_t live = 0;
};

/// Scores h_t . u over the first `live_length` rows (the rest are masked out),
/// alpha = softmax(scores), context = sum_t alpha_t h_t.
SoftAttentionResult soft_attention(const Tensor& hidden, const AttnParams& params,
                                   std::size_t live_length, AttnCache* cache = nullptr);

struct AttnGrads {
    Tensor d_hidden;
    AttnParams d_params;
};
AttnGrads soft_attention_backward(const AttnCache& cache, const AttnParams& params,
                                  const Tensor& d_context);

// ---------------------------------------------------------------------------
// Dropout

/// Inverted dropout. In training each element survives with probability
/// 1 - rate and is scaled by 1 / (1 - rate); the applied multipliers are
/// written to `mask` when given. Outside training it is the identity.
Tensor dropout(const Tensor& x, double rate, bool training, Rng* rng, Tensor* mask = nullptr);

// ---------------------------------------------------------------------------
// Dense softmax head

struct DenseParams {
    Tensor w;  ///< d_in x 2
    Tensor b;  ///< 2
};

struct DenseCache {
    Tensor input;
    Tensor probs;
};

/// softmax(x W + b) for a d_in vector x.
Tensor dense_softmax(const Tensor& x, const DenseParams& params, DenseCache* cache = nullptr);

struct DenseGrads {
    Tensor d_input;
    DenseParams d_params;
};
DenseGrads dense_softmax_backward(const DenseCache& cache, const DenseParams& params,
                                  const Tensor& d_probs);

}  // namespace hybridclf
