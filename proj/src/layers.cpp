#include "hybridclf/layers.hpp"

#include "hybridclf/errors.hpp"
#include "hybridclf/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hybridclf {

Tensor glorot_uniform(Shape shape, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Tensor t(std::move(shape));
    for (double& v : t.data()) v = rng.uniform(-limit, limit);
    return t;
}

namespace {

void require_matrix(const Tensor& t, const char* where) {
    if (t.rank() != 2) {
        throw ShapeError(std::string(where) + ": expected a matrix, got " + shape_to_string(t.shape()));
    }
}

// out[j] += sum_p x[p] * w[p][j] for an (n x m) matrix w.
void accumulate_vec_mat(const double* x, const Tensor& w, double* out) {
    const std::size_t n = w.rows(), m = w.cols();
    for (std::size_t p = 0; p < n; ++p) {
        const double xv = x[p];
        if (xv == 0.0) continue;
        const double* wr = w.row(p);
        for (std::size_t j = 0; j < m; ++j) out[j] += xv * wr[j];
    }
}

// out[p] += sum_j w[p][j] * g[j]  (multiplication by w transposed).
void accumulate_mat_vec(const Tensor& w, const double* g, double* out) {
    const std::size_t n = w.rows(), m = w.cols();
    for (std::size_t p = 0; p < n; ++p) {
        const double* wr = w.row(p);
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += wr[j] * g[j];
        out[p] += s;
    }
}

// dw[p][j] += x[p] * g[j].
void accumulate_outer(const double* x, const double* g, Tensor& dw) {
    const std::size_t n = dw.rows(), m = dw.cols();
    for (std::size_t p = 0; p < n; ++p) {
        const double xv = x[p];
        if (xv == 0.0) continue;
        double* dr = dw.row(p);
        for (std::size_t j = 0; j < m; ++j) dr[j] += xv * g[j];
    }
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

// ---------------------------------------------------------------------------
// Conv1D

Tensor conv1d_forward(const Tensor& x, const ConvParams& params, bool bias_inside_relu,
                      Conv1dCache* cache) {
    require_matrix(x, "conv1d_forward");
    if (params.filters.rank() != 3) {
        throw ShapeError("conv1d_forward: filters must be F x k x d_in, got " +
                         shape_to_string(params.filters.shape()));
    }
    const std::size_t T = x.rows(), d = x.cols();
    const std::size_t F = params.num_filters(), k = params.width();
    if (params.input_dim() != d) {
        throw ShapeError("conv1d_forward: input " + shape_to_string(x.shape()) +
                         " does not match filters " + shape_to_string(params.filters.shape()));
    }
    expect_shape(params.bias, {F}, "conv1d_forward bias");
    if (k == 0 || T < k) {
        throw ShapeError("conv1d_forward: sequence length " + std::to_string(T) +
                         " shorter than filter width " + std::to_string(k));
    }
    const std::size_t L = T - k + 1;
    const std::size_t window = k * d;  // rows i..i+k-1 are contiguous in X
    Tensor pre({L, F});
    Tensor out({L, F});
    for (std::size_t i = 0; i < L; ++i) {
        const double* xw = x.row(i);
        for (std::size_t f = 0; f < F; ++f) {
            const double* w = params.filters.data().data() + f * window;
            double s = 0.0;
            for (std::size_t q = 0; q < window; ++q) s += w[q] * xw[q];
            if (bias_inside_relu) {
                s += params.bias[f];
                pre.at(i, f) = s;
                out.at(i, f) = s < 0.0 ? 0.0 : s;
            } else {
                pre.at(i, f) = s;
                out.at(i, f) = (s < 0.0 ? 0.0 : s) + params.bias[f];
            }
        }
    }
    check_finite(out, "conv1d_forward");
    if (cache) {
        cache->input = x;
        cache->preact = std::move(pre);
    }
    return out;
}

Conv1dGrads conv1d_backward(const Conv1dCache& cache, const ConvParams& params,
                            bool bias_inside_relu, const Tensor& d_out) {
    const std::size_t d = cache.input.cols();
    const std::size_t F = params.num_filters(), k = params.width();
    const std::size_t L = cache.preact.rows();
    expect_shape(d_out, {L, F}, "conv1d_backward");
    const std::size_t window = k * d;

    Conv1dGrads g{Tensor(cache.input.shape()),
                  ConvParams{Tensor(params.filters.shape()), Tensor(params.bias.shape())}};
    for (std::size_t i = 0; i < L; ++i) {
        const double* xw = cache.input.row(i);
        double* dxw = g.d_input.row(i);
        for (std::size_t f = 0; f < F; ++f) {
            const double upstream = d_out.at(i, f);
            if (!bias_inside_relu) g.d_params.bias[f] += upstream;
            if (!(cache.preact.at(i, f) > 0.0)) continue;
            if (bias_inside_relu) g.d_params.bias[f] += upstream;
            const double* w = params.filters.data().data() + f * window;
            double* dw = g.d_params.filters.data().data() + f * window;
            for (std::size_t q = 0; q < window; ++q) {
                dw[q] += upstream * xw[q];
                dxw[q] += upstream * w[q];
            }
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Max pooling

Tensor maxpool(const Tensor& c, std::size_t pool, PoolMode mode, PoolCache* cache) {
    require_matrix(c, "maxpool");
    const std::size_t L = c.rows(), F = c.cols();
    if (L == 0) throw ShapeError("maxpool: empty input " + shape_to_string(c.shape()));
    if (mode == PoolMode::global) {
        ops::MaxResult r = ops::max_over_axis(c, 0);
        if (cache) *cache = PoolCache{c.shape(), pool, mode, std::move(r.argmax)};
        return r.values;
    }
    if (pool == 0) throw ShapeError("maxpool: pool size must be at least 1");
    const std::size_t P = L / pool;
    if (P == 0) {
        throw ShapeError("maxpool: input length " + std::to_string(L) + " shorter than pool " +
                         std::to_string(pool));
    }
    // The first P * pool rows viewed as P x pool x F; max over the middle axis.
    const Tensor windows = ops::slice(c, 0, 0, P * pool).reshaped({P, pool, F});
    ops::MaxResult r = ops::max_over_axis(windows, 1);
    if (cache) *cache = PoolCache{c.shape(), pool, mode, std::move(r.argmax)};
    return r.values.reshaped({P, F});
}

Tensor maxpool_backward(const PoolCache& cache, const Tensor& d_out) {
    const std::size_t L = cache.input_shape.at(0), F = cache.input_shape.at(1);
    if (cache.mode == PoolMode::global) {
        expect_shape(d_out, {1, F}, "maxpool_backward");
        return ops::max_over_axis_backward(cache.input_shape, 0, cache.argmax, d_out);
    }
    const std::size_t P = L / cache.pool;
    expect_shape(d_out, {P, F}, "maxpool_backward");
    const Tensor d_windows = ops::max_over_axis_backward({P, cache.pool, F}, 1, cache.argmax,
                                                         d_out.reshaped({P, 1, F}));
    return ops::slice_backward(cache.input_shape, 0, 0, d_windows.reshaped({P * cache.pool, F}));
}

// ---------------------------------------------------------------------------
// Multi-head self-attention

Tensor mha_forward(const Tensor& x, const MhaParams& params, MhaCache* cache) {
    require_matrix(x, "mha_forward");
    const std::size_t H = params.num_heads();
    const std::size_t dk = params.key_dim();
    const std::size_t dm = x.cols();
    if (H == 0 || params.w_k.size() != H || params.w_v.size() != H) {
        throw ShapeError("mha_forward: inconsistent head count");
    }
    for (std::size_t h = 0; h < H; ++h) {
        expect_shape(params.w_q[h], {dm, dk}, "mha_forward w_q");
        expect_shape(params.w_k[h], {dm, dk}, "mha_forward w_k");
        expect_shape(params.w_v[h], {dm, dk}, "mha_forward w_v");
    }
    expect_shape(params.w_out, {H * dk, dm}, "mha_forward w_out");

    const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
    MhaCache local;
    MhaCache& c = cache ? *cache : local;
    c.input = x;
    c.q.clear();
    c.k.clear();
    c.v.clear();
    c.attention.clear();
    std::vector<Tensor> head_out;
    for (std::size_t h = 0; h < H; ++h) {
        Tensor q = ops::matmul(x, params.w_q[h]);
        Tensor k = ops::matmul(x, params.w_k[h]);
        Tensor v = ops::matmul(x, params.w_v[h]);
        Tensor scores = ops::matmul(q, ops::transpose(k));
        scores *= scale;
        Tensor a = ops::softmax(scores);
        head_out.push_back(ops::matmul(a, v));
        c.q.push_back(std::move(q));
        c.k.push_back(std::move(k));
        c.v.push_back(std::move(v));
        c.attention.push_back(std::move(a));
    }
    c.heads = ops::concat(head_out, 1);
    return ops::matmul(c.heads, params.w_out);
}

MhaGrads mha_backward(const MhaCache& cache, const MhaParams& params, const Tensor& d_out) {
    const std::size_t H = params.num_heads();
    const std::size_t dk = params.key_dim();
    const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

    MhaGrads g;
    auto [d_heads, d_w_out] = ops::matmul_backward(cache.heads, params.w_out, d_out);
    g.d_params.w_out = std::move(d_w_out);
    g.d_input = Tensor(cache.input.shape());

    std::vector<Shape> head_shapes(H, Shape{cache.input.rows(), dk});
    const std::vector<Tensor> d_head = ops::concat_backward(head_shapes, 1, d_heads);
    for (std::size_t h = 0; h < H; ++h) {
        auto [d_a, d_v] = ops::matmul_backward(cache.attention[h], cache.v[h], d_head[h]);
        Tensor d_scores = ops::softmax_backward(cache.attention[h], d_a);
        d_scores *= scale;
        // scores = q k^T
        Tensor d_q = ops::matmul(d_scores, cache.k[h]);
        Tensor d_k = ops::matmul(ops::transpose(d_scores), cache.q[h]);

        auto [dx_q, d_wq] = ops::matmul_backward(cache.input, params.w_q[h], d_q);
        auto [dx_k, d_wk] = ops::matmul_backward(cache.input, params.w_k[h], d_k);
        auto [dx_v, d_wv] = ops::matmul_backward(cache.input, params.w_v[h], d_v);
        g.d_input += dx_q;
        g.d_input += dx_k;
        g.d_input += dx_v;
        g.d_params.w_q.push_back(std::move(d_wq));
        g.d_params.w_k.push_back(std::move(d_wk));
        g.d_params.w_v.push_back(std::move(d_wv));
    }
    return g;
}

// ---------------------------------------------------------------------------
// LSTM

Tensor lstm_forward(const Tensor& x, const LstmParams& p, const Tensor* h0, const Tensor* c0,
                    LstmCache* cache) {
    require_matrix(x, "lstm_forward");
    const std::size_t L = x.rows(), din = x.cols(), h = p.hidden_dim();
    for (const Tensor* w : {&p.w_i, &p.w_f, &p.w_o, &p.w_c}) expect_shape(*w, {din, h}, "lstm_forward W");
    for (const Tensor* u : {&p.u_i, &p.u_f, &p.u_o, &p.u_c}) expect_shape(*u, {h, h}, "lstm_forward U");
    for (const Tensor* b : {&p.b_i, &p.b_f, &p.b_o, &p.b_c}) expect_shape(*b, {h}, "lstm_forward b");

    LstmCache local;
    LstmCache& c = cache ? *cache : local;
    c.input = x;
    c.h0 = h0 ? *h0 : Tensor({h});
    c.c0 = c0 ? *c0 : Tensor({h});
    expect_shape(c.h0, {h}, "lstm_forward h0");
    expect_shape(c.c0, {h}, "lstm_forward c0");
    for (Tensor* t : {&c.gate_i, &c.gate_f, &c.gate_o, &c.candidate, &c.cell, &c.hidden, &c.cell_tanh})
        *t = Tensor({L, h});
    c.steps = 0;

    std::vector<double> a_i(h), a_f(h), a_o(h), a_c(h);
    for (std::size_t t = 0; t < L; ++t) {
        const double* xt = x.row(t);
        const double* h_prev = t ? c.hidden.row(t - 1) : c.h0.data().data();
        const double* c_prev = t ? c.cell.row(t - 1) : c.c0.data().data();
        std::copy_n(p.b_i.data().data(), h, a_i.begin());
        std::copy_n(p.b_f.data().data(), h, a_f.begin());
        std::copy_n(p.b_o.data().data(), h, a_o.begin());
        std::copy_n(p.b_c.data().data(), h, a_c.begin());
        accumulate_vec_mat(xt, p.w_i, a_i.data());
        accumulate_vec_mat(xt, p.w_f, a_f.data());
        accumulate_vec_mat(xt, p.w_o, a_o.data());
        accumulate_vec_mat(xt, p.w_c, a_c.data());
        accumulate_vec_mat(h_prev, p.u_i, a_i.data());
        accumulate_vec_mat(h_prev, p.u_f, a_f.data());
        accumulate_vec_mat(h_prev, p.u_o, a_o.data());
        accumulate_vec_mat(h_prev, p.u_c, a_c.data());
        for (std::size_t j = 0; j < h; ++j) {
            const double i_g = sigmoid(a_i[j]);
            const double f_g = sigmoid(a_f[j]);
            const double o_g = sigmoid(a_o[j]);
            const double cand = std::tanh(a_c[j]);
            const double cell = f_g * c_prev[j] + i_g * cand;
            const double ct = std::tanh(cell);
            c.gate_i.at(t, j) = i_g;
            c.gate_f.at(t, j) = f_g;
            c.gate_o.at(t, j) = o_g;
            c.candidate.at(t, j) = cand;
            c.cell.at(t, j) = cell;
            c.cell_tanh.at(t, j) = ct;
            c.hidden.at(t, j) = o_g * ct;
        }
        ++c.steps;
    }
    check_finite(c.hidden, "lstm_forward");
    check_finite(c.cell, "lstm_forward cell");
    return c.hidden;
}

LstmGrads lstm_backward(const LstmCache& c, const LstmParams& p, const Tensor& d_hidden) {
    const std::size_t L = c.input.rows(), din = c.input.cols(), h = p.hidden_dim();
    expect_shape(d_hidden, {L, h}, "lstm_backward");

    LstmGrads g;
    g.d_input = Tensor({L, din});
    LstmParams& dp = g.d_params;
    for (Tensor* w : {&dp.w_i, &dp.w_f, &dp.w_o, &dp.w_c}) *w = Tensor({din, h});
    for (Tensor* u : {&dp.u_i, &dp.u_f, &dp.u_o, &dp.u_c}) *u = Tensor({h, h});
    for (Tensor* b : {&dp.b_i, &dp.b_f, &dp.b_o, &dp.b_c}) *b = Tensor({h});

    std::vector<double> dh_next(h, 0.0), dc_next(h, 0.0);
    std::vector<double> da_i(h), da_f(h), da_o(h), da_c(h);
    for (std::size_t t = L; t-- > 0;) {
        const double* c_prev = t ? c.cell.row(t - 1) : c.c0.data().data();
        const double* h_prev = t ? c.hidden.row(t - 1) : c.h0.data().data();
        for (std::size_t j = 0; j < h; ++j) {
            const double dh = d_hidden.at(t, j) + dh_next[j];
            const double i_g = c.gate_i.at(t, j), f_g = c.gate_f.at(t, j), o_g = c.gate_o.at(t, j);
            const double cand = c.candidate.at(t, j), ct = c.cell_tanh.at(t, j);
            const double d_o = dh * ct;
            const double dc = dh * o_g * (1.0 - ct * ct) + dc_next[j];
            da_i[j] = dc * cand * i_g * (1.0 - i_g);
            da_f[j] = dc * c_prev[j] * f_g * (1.0 - f_g);
            da_o[j] = d_o * o_g * (1.0 - o_g);
            da_c[j] = dc * i_g * (1.0 - cand * cand);
            dc_next[j] = dc * f_g;
        }
        const double* xt = c.input.row(t);
        accumulate_outer(xt, da_i.data(), dp.w_i);
        accumulate_outer(xt, da_f.data(), dp.w_f);
        accumulate_outer(xt, da_o.data(), dp.w_o);
        accumulate_outer(xt, da_c.data(), dp.w_c);
        accumulate_outer(h_prev, da_i.data(), dp.u_i);
        accumulate_outer(h_prev, da_f.data(), dp.u_f);
        accumulate_outer(h_prev, da_o.data(), dp.u_o);
        accumulate_outer(h_prev, da_c.data(), dp.u_c);
        for (std::size_t j = 0; j < h; ++j) {
            dp.b_i[j] += da_i[j];
            dp.b_f[j] += da_f[j];
            dp.b_o[j] += da_o[j];
            dp.b_c[j] += da_c[j];
        }
        double* dx = g.d_input.row(t);
        accumulate_mat_vec(p.w_i, da_i.data(), dx);
        accumulate_mat_vec(p.w_f, da_f.data(), dx);
        accumulate_mat_vec(p.w_o, da_o.data(), dx);
        accumulate_mat_vec(p.w_c, da_c.data(), dx);
        std::fill(dh_next.begin(), dh_next.end(), 0.0);
        accumulate_mat_vec(p.u_i, da_i.data(), dh_next.data());
        accumulate_mat_vec(p.u_f, da_f.data(), dh_next.data());
        accumulate_mat_vec(p.u_o, da_o.data(), dh_next.data());
        accumulate_mat_vec(p.u_c, da_c.data(), dh_next.data());
    }
    g.d_h0 = Tensor({h}, dh_next);
    g.d_c0 = Tensor({h}, dc_next);
    return g;
}

// ---------------------------------------------------------------------------
// Soft attention

SoftAttentionResult soft_attention(const Tensor& hidden, const AttnParams& params,
                                   std::size_t live_length, AttnCache* cache) {
    require_matrix(hidden, "soft_attention");
    const std::size_t L = hidden.rows(), h = hidden.cols();
    expect_shape(params.u, {h}, "soft_attention u");
    if (live_length == 0) throw DegenerateInputError("soft_attention: true_length is 0");
    if (live_length > L) {
        throw ShapeError("soft_attention: true_length " + std::to_string(live_length) +
                         " exceeds sequence length " + std::to_string(L));
    }
    Tensor scores({live_length});
    for (std::size_t t = 0; t < live_length; ++t) {
        const double* ht = hidden.row(t);
        double s = 0.0;
        for (std::size_t j = 0; j < h; ++j) s += ht[j] * params.u[j];
        scores[t] = s;
    }
    const Tensor live_alpha = ops::softmax(scores);
    SoftAttentionResult r{Tensor({h}), Tensor({L})};
    for (std::size_t t = 0; t < live_length; ++t) {
        r.alpha[t] = live_alpha[t];
        const double* ht = hidden.row(t);
        for (std::size_t j = 0; j < h; ++j) r.context[j] += live_alpha[t] * ht[j];
    }
    check_finite(r.context, "soft_attention");
    if (cache) *cache = AttnCache{hidden, r.alpha, live_length};
    return r;
}

AttnGrads soft_attention_backward(const AttnCache& cache, const AttnParams& params,
                                  const Tensor& d_context) {
    const std::size_t L = cache.hidden.rows(), h = cache.hidden.cols();
    expect_shape(d_context, {h}, "soft_attention_backward");
    AttnGrads g{Tensor({L, h}), AttnParams{Tensor({h})}};

    Tensor d_alpha({cache.live});
    Tensor alpha({cache.live});
    for (std::size_t t = 0; t < cache.live; ++t) {
        const double* ht = cache.hidden.row(t);
        double s = 0.0;
        for (std::size_t j = 0; j < h; ++j) s += d_context[j] * ht[j];
        d_alpha[t] = s;
        alpha[t] = cache.alpha[t];
    }
    const Tensor d_scores = ops::softmax_backward(alpha, d_alpha);
    for (std::size_t t = 0; t < cache.live; ++t) {
        const double* ht = cache.hidden.row(t);
        double* dht = g.d_hidden.row(t);
        for (std::size_t j = 0; j < h; ++j) {
            dht[j] = alpha[t] * d_context[j] + d_scores[t] * params.u[j];
            g.d_params.u[j] += d_scores[t] * ht[j];
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Dropout

Tensor dropout(const Tensor& x, double rate, bool training, Rng* rng, Tensor* mask) {
    if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("dropout rate must be in [0, 1)");
    if (!training || rate == 0.0) {
        if (mask) *mask = Tensor(x.shape(), 1.0);
        return x;
    }
    if (!rng) throw ConfigError("dropout in training mode needs a generator");
    const double keep_scale = 1.0 / (1.0 - rate);
    Tensor m(x.shape());
    Tensor out = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        m[i] = rng->bernoulli(1.0 - rate) ? keep_scale : 0.0;
        out[i] *= m[i];
    }
    if (mask) *mask = std::move(m);
    return out;
}

// ---------------------------------------------------------------------------
// Dense softmax

Tensor dense_softmax(const Tensor& x, const DenseParams& params, DenseCache* cache) {
    if (x.rank() != 1) throw ShapeError("dense_softmax: expected a vector, got " + shape_to_string(x.shape()));
    const std::size_t din = x.size();
    expect_shape(params.w, {din, 2}, "dense_softmax w");
    expect_shape(params.b, {2}, "dense_softmax b");
    Tensor logits = params.b;
    accumulate_vec_mat(x.data().data(), params.w, logits.data().data());
    Tensor probs = ops::softmax(logits);
    if (cache) *cache = DenseCache{x, probs};
    return probs;
}

DenseGrads dense_softmax_backward(const DenseCache& cache, const DenseParams& params,
                                  const Tensor& d_probs) {
    expect_shape(d_probs, {2}, "dense_softmax_backward");
    const Tensor d_logits = ops::softmax_backward(cache.probs, d_probs);
    DenseGrads g{Tensor(cache.input.shape()), DenseParams{Tensor(params.w.shape()), d_logits}};
    accumulate_outer(cache.input.data().data(), d_logits.data().data(), g.d_params.w);
    accumulate_mat_vec(params.w, d_logits.data().data(), g.d_input.data().data());
    return g;
}

}  // namespace hybridclf
