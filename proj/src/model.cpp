#include "hybridclf/model.hpp"

#include "hybridclf/errors.hpp"
#include "hybridclf/ops.hpp"

#include <algorithm>

namespace hybridclf {

std::string to_string(Variant v) {
    switch (v) {
        case Variant::cnn: return "cnn";
        case Variant::lstm: return "lstm";
        case Variant::cnn_lstm: return "cnn_lstm";
        case Variant::cnn_lstm_attn: return "cnn_lstm_attn";
    }
    return "unknown";
}

Variant parse_variant(std::string_view name) {
    if (name == "cnn") return Variant::cnn;
    if (name == "lstm") return Variant::lstm;
    if (name == "cnn_lstm") return Variant::cnn_lstm;
    if (name == "cnn_lstm_attn") return Variant::cnn_lstm_attn;
    throw ConfigError("unknown model variant '" + std::string(name) + "'");
}

void ModelConfig::validate() const {
    auto positive = [](std::size_t v, const char* name) {
        if (v == 0) throw ConfigError(std::string(name) + " must be positive");
    };
    positive(seq_len, "seq_len");
    positive(embed_dim, "embed_dim");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
    if (uses_conv()) {
        positive(filters, "filters");
        positive(kernel_size, "kernel_size");
        if (seq_len < kernel_size) throw ConfigError("seq_len is shorter than kernel_size");
        if (variant != Variant::cnn) {
            positive(pool_size, "pool_size");
            if (pooled_length() == 0) throw ConfigError("seq_len too short for kernel_size and pool_size");
        }
    }
    if (uses_lstm()) positive(lstm_units, "lstm_units");
    if (uses_attention()) {
        positive(num_heads, "num_heads");
        positive(key_dim, "key_dim");
    }
}

std::vector<std::pair<std::string, Tensor*>> ModelParams::named() {
    std::vector<std::pair<std::string, Tensor*>> out;
    if (conv) {
        out.emplace_back("conv.filters", &conv->filters);
        out.emplace_back("conv.bias", &conv->bias);
    }
    if (mha) {
        for (std::size_t h = 0; h < mha->num_heads(); ++h) {
            const std::string p = "mha.head" + std::to_string(h) + ".";
            out.emplace_back(p + "w_q", &mha->w_q[h]);
            out.emplace_back(p + "w_k", &mha->w_k[h]);
            out.emplace_back(p + "w_v", &mha->w_v[h]);
        }
        out.emplace_back("mha.w_out", &mha->w_out);
    }
    if (lstm) {
        LstmParams& l = *lstm;
        out.emplace_back("lstm.w_i", &l.w_i);
        out.emplace_back("lstm.w_f", &l.w_f);
        out.emplace_back("lstm.w_o", &l.w_o);
        out.emplace_back("lstm.w_c", &l.w_c);
        out.emplace_back("lstm.u_i", &l.u_i);
        out.emplace_back("lstm.u_f", &l.u_f);
        out.emplace_back("lstm.u_o", &l.u_o);
        out.emplace_back("lstm.u_c", &l.u_c);
        out.emplace_back("lstm.b_i", &l.b_i);
        out.emplace_back("lstm.b_f", &l.b_f);
        out.emplace_back("lstm.b_o", &l.b_o);
        out.emplace_back("lstm.b_c", &l.b_c);
    }
    if (attn) out.emplace_back("attn.u", &attn->u);
    out.emplace_back("dense.w", &dense.w);
    out.emplace_back("dense.b", &dense.b);
    return out;
}

std::vector<std::pair<std::string, const Tensor*>> ModelParams::named() const {
    auto mutable_list = const_cast<ModelParams*>(this)->named();
    return {mutable_list.begin(), mutable_list.end()};
}

ModelParams ModelParams::zeros_like() const {
    ModelParams z = *this;
    for (auto& [name, t] : z.named()) t->fill(0.0);
    return z;
}

std::size_t ModelParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& [name, t] : named()) n += t->size();
    return n;
}

bool ModelParams::operator==(const ModelParams& other) const {
    const auto a = named();
    const auto b = other.named();
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].first != b[i].first || !(*a[i].second == *b[i].second)) return false;
    return true;
}

ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(derive_seed(seed, "init"));
    ModelParams p;
    std::size_t feature_in = cfg.embed_dim;
    if (cfg.uses_conv()) {
        const std::size_t k = cfg.kernel_size, d = cfg.embed_dim, F = cfg.filters;
        p.conv = ConvParams{glorot_uniform({F, k, d}, k * d, k * F, rng), Tensor({F})};
        feature_in = F;
    }
    if (cfg.uses_attention()) {
        MhaParams m;
        const std::size_t dm = cfg.filters, dk = cfg.key_dim;
        for (std::size_t h = 0; h < cfg.num_heads; ++h) {
            m.w_q.push_back(glorot_uniform({dm, dk}, dm, dk, rng));
            m.w_k.push_back(glorot_uniform({dm, dk}, dm, dk, rng));
            m.w_v.push_back(glorot_uniform({dm, dk}, dm, dk, rng));
        }
        m.w_out = glorot_uniform({cfg.num_heads * dk, dm}, cfg.num_heads * dk, dm, rng);
        p.mha = std::move(m);
    }
    if (cfg.uses_lstm()) {
        const std::size_t din = feature_in, h = cfg.lstm_units;
        LstmParams l;
        l.w_i = glorot_uniform({din, h}, din, h, rng);
        l.w_f = glorot_uniform({din, h}, din, h, rng);
        l.w_o = glorot_uniform({din, h}, din, h, rng);
        l.w_c = glorot_uniform({din, h}, din, h, rng);
        l.u_i = glorot_uniform({h, h}, h, h, rng);
        l.u_f = glorot_uniform({h, h}, h, h, rng);
        l.u_o = glorot_uniform({h, h}, h, h, rng);
        l.u_c = glorot_uniform({h, h}, h, h, rng);
        l.b_i = Tensor({h});
        l.b_f = Tensor({h}, cfg.forget_bias_one ? 1.0 : 0.0);
        l.b_o = Tensor({h});
        l.b_c = Tensor({h});
        p.lstm = std::move(l);
    }
    if (cfg.uses_attention()) {
        p.attn = AttnParams{glorot_uniform({cfg.lstm_units}, cfg.lstm_units, 1, rng)};
    }
    const std::size_t fd = cfg.feature_dim();
    p.dense = DenseParams{glorot_uniform({fd, 2}, fd, 2, rng), Tensor({2})};
    return p;
}

std::vector<std::pair<std::string, Shape>> parameter_shapes(const ModelConfig& cfg) {
    std::vector<std::pair<std::string, Shape>> out;
    std::size_t din = cfg.embed_dim;
    const std::size_t h = cfg.lstm_units;
    if (cfg.uses_conv()) {
        out.emplace_back("conv.filters", Shape{cfg.filters, cfg.kernel_size, cfg.embed_dim});
        out.emplace_back("conv.bias", Shape{cfg.filters});
        din = cfg.filters;
    }
    if (cfg.uses_attention()) {
        for (std::size_t j = 0; j < cfg.num_heads; ++j) {
            const std::string p = "mha.head" + std::to_string(j) + ".";
            for (const char* w : {"w_q", "w_k", "w_v"}) out.emplace_back(p + w, Shape{cfg.filters, cfg.key_dim});
        }
        out.emplace_back("mha.w_out", Shape{cfg.num_heads * cfg.key_dim, cfg.filters});
    }
    if (cfg.uses_lstm()) {
        for (const char* w : {"w_i", "w_f", "w_o", "w_c"}) out.emplace_back(std::string("lstm.") + w, Shape{din, h});
        for (const char* u : {"u_i", "u_f", "u_o", "u_c"}) out.emplace_back(std::string("lstm.") + u, Shape{h, h});
        for (const char* b : {"b_i", "b_f", "b_o", "b_c"}) out.emplace_back(std::string("lstm.") + b, Shape{h});
    }
    if (cfg.uses_attention()) out.emplace_back("attn.u", Shape{h});
    out.emplace_back("dense.w", Shape{cfg.feature_dim(), 2});
    out.emplace_back("dense.b", Shape{2});
    return out;
}

void check_params(const ModelConfig& cfg, const ModelParams& p) {
    auto need = [](bool present, bool wanted, const char* block) {
        if (present != wanted) {
            throw ConfigError(std::string("parameter block '") + block +
                              (wanted ? "' missing for variant" : "' not used by variant"));
        }
    };
    need(p.conv.has_value(), cfg.uses_conv(), "conv");
    need(p.mha.has_value(), cfg.uses_attention(), "mha");
    need(p.lstm.has_value(), cfg.uses_lstm(), "lstm");
    need(p.attn.has_value(), cfg.uses_attention(), "attn");
    const auto expected = parameter_shapes(cfg);
    const auto actual = p.named();
    if (expected.size() != actual.size()) throw ConfigError("parameter set does not match variant");
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (expected[i].first != actual[i].first || expected[i].second != actual[i].second->shape()) {
            throw ConfigError("parameter '" + actual[i].first + "' has shape " +
                              shape_to_string(actual[i].second->shape()) + ", expected " +
                              shape_to_string(expected[i].second) + " for '" + expected[i].first + "'");
        }
    }
}

std::size_t effective_length(const ModelConfig& cfg, std::size_t true_length) {
    if (cfg.variant == Variant::lstm) return std::clamp<std::size_t>(true_length, 1, cfg.seq_len);
    const std::size_t k = cfg.kernel_size, pool = cfg.pool_size;
    if (true_length + 1 <= k) return 1;
    const std::size_t conv_live = true_length - k + 1;
    return std::clamp<std::size_t>((conv_live + pool - 1) / pool, 1, cfg.pooled_length());
}

ForwardResult hybrid_forward(const EncodedSequence& seq, const EmbeddingTable& table,
                             const ModelConfig& cfg, const ModelParams& params, bool training,
                             Rng* dropout_rng, ForwardTrace* trace) {
    if (seq.ids.size() != cfg.seq_len) {
        throw ShapeError("hybrid_forward: sequence length " + std::to_string(seq.ids.size()) +
                         " does not match configured " + std::to_string(cfg.seq_len));
    }
    if (table.dim() != cfg.embed_dim) {
        throw ConfigError("embedding table dimension " + std::to_string(table.dim()) +
                          " does not match configured " + std::to_string(cfg.embed_dim));
    }
    check_params(cfg, params);

    ForwardTrace local;
    ForwardTrace& tr = trace ? *trace : local;
    ForwardResult result;

    tr.embedded = embed(seq, table);
    result.shape_chain.push_back(tr.embedded.shape());

    Tensor seq_features;  // L x width, consumed by the LSTM
    switch (cfg.variant) {
        case Variant::cnn: {
            const Tensor c = conv1d_forward(tr.embedded, *params.conv, cfg.bias_inside_relu, &tr.conv);
            result.shape_chain.push_back(c.shape());
            const Tensor pooled = maxpool(c, cfg.pool_size, PoolMode::global, &tr.pool);
            result.shape_chain.push_back(pooled.shape());
            tr.feature = pooled.reshaped({pooled.size()});
            break;
        }
        case Variant::lstm:
            seq_features = tr.embedded;
            break;
        case Variant::cnn_lstm:
        case Variant::cnn_lstm_attn: {
            const Tensor c = conv1d_forward(tr.embedded, *params.conv, cfg.bias_inside_relu, &tr.conv);
            result.shape_chain.push_back(c.shape());
            seq_features = maxpool(c, cfg.pool_size, PoolMode::windowed, &tr.pool);
            result.shape_chain.push_back(seq_features.shape());
            if (cfg.variant == Variant::cnn_lstm_attn) {
                seq_features = mha_forward(seq_features, *params.mha, &tr.mha);
                result.shape_chain.push_back(seq_features.shape());
            }
            break;
        }
    }

    if (cfg.uses_lstm()) {
        const Tensor hidden = lstm_forward(seq_features, *params.lstm, nullptr, nullptr, &tr.lstm);
        result.shape_chain.push_back(hidden.shape());
        tr.live = effective_length(cfg, seq.true_length);
        if (cfg.uses_attention()) {
            SoftAttentionResult att = soft_attention(hidden, *params.attn, tr.live, &tr.attn);
            tr.feature = std::move(att.context);
            result.attention = std::vector<double>(att.alpha.values());
        } else {
            tr.feature = ops::slice(hidden, 0, tr.live - 1, tr.live).reshaped({cfg.lstm_units});
        }
        result.shape_chain.push_back(tr.feature.shape());
    }

    const Tensor dropped = dropout(tr.feature, cfg.dropout, training, dropout_rng, &tr.dropout_mask);
    const Tensor probs = dense_softmax(dropped, params.dense, &tr.dense);
    result.shape_chain.push_back(probs.shape());
    result.probs = {probs[0], probs[1]};
    return result;
}

void hybrid_backward(const ForwardTrace& tr, const ModelConfig& cfg, const ModelParams& params,
                     const std::array<double, 2>& d_probs, ModelParams& grads) {
    const DenseGrads dg = dense_softmax_backward(tr.dense, params.dense, Tensor({2}, {d_probs[0], d_probs[1]}));
    grads.dense.w += dg.d_params.w;
    grads.dense.b += dg.d_params.b;

    Tensor d_feature = dg.d_input;
    for (std::size_t i = 0; i < d_feature.size(); ++i) d_feature[i] *= tr.dropout_mask[i];

    if (cfg.variant == Variant::cnn) {
        const Tensor d_conv = maxpool_backward(tr.pool, d_feature.reshaped({1, d_feature.size()}));
        const Conv1dGrads cg = conv1d_backward(tr.conv, *params.conv, cfg.bias_inside_relu, d_conv);
        grads.conv->filters += cg.d_params.filters;
        grads.conv->bias += cg.d_params.bias;
        return;
    }

    Tensor d_hidden(tr.lstm.hidden.shape());
    if (cfg.uses_attention()) {
        const AttnGrads ag = soft_attention_backward(tr.attn, *params.attn, d_feature);
        grads.attn->u += ag.d_params.u;
        d_hidden = ag.d_hidden;
    } else {
        std::copy(d_feature.data().begin(), d_feature.data().end(), d_hidden.row(tr.live - 1));
    }

    const LstmGrads lg = lstm_backward(tr.lstm, *params.lstm, d_hidden);
    {
        LstmParams& g = *grads.lstm;
        const LstmParams& d = lg.d_params;
        g.w_i += d.w_i; g.w_f += d.w_f; g.w_o += d.w_o; g.w_c += d.w_c;
        g.u_i += d.u_i; g.u_f += d.u_f; g.u_o += d.u_o; g.u_c += d.u_c;
        g.b_i += d.b_i; g.b_f += d.b_f; g.b_o += d.b_o; g.b_c += d.b_c;
    }
    if (cfg.variant == Variant::lstm) return;  // embeddings are frozen

    Tensor d_pooled = lg.d_input;
    if (cfg.uses_attention()) {
        const MhaGrads mg = mha_backward(tr.mha, *params.mha, d_pooled);
        for (std::size_t h = 0; h < mg.d_params.num_heads(); ++h) {
            grads.mha->w_q[h] += mg.d_params.w_q[h];
            grads.mha->w_k[h] += mg.d_params.w_k[h];
            grads.mha->w_v[h] += mg.d_params.w_v[h];
        }
        grads.mha->w_out += mg.d_params.w_out;
        d_pooled = mg.d_input;
    }
    const Tensor d_conv = maxpool_backward(tr.pool, d_pooled);
    const Conv1dGrads cg = conv1d_backward(tr.conv, *params.conv, cfg.bias_inside_relu, d_conv);
    grads.conv->filters += cg.d_params.filters;
    grads.conv->bias += cg.d_params.bias;
}

}  // namespace hybridclf
