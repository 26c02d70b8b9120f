#include "hybridclf/training.hpp"

#include "hybridclf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

namespace hybridclf {

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("epochs must be at least 1");
    if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be positive");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) throw ConfigError("adam_beta1 must be in [0, 1)");
    if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) throw ConfigError("adam_beta2 must be in [0, 1)");
    if (!(adam_eps > 0.0)) throw ConfigError("adam_eps must be positive");
    if (k < 2) throw ConfigError("k must be at least 2");
    if (grad_clip_norm && !(*grad_clip_norm > 0.0)) throw ConfigError("grad_clip_norm must be positive");
    if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
        throw ConfigError("validation_fraction must be in [0, 1)");
}

AdamState AdamState::for_params(const ModelParams& params) {
    AdamState s;
    for (const auto& [name, t] : params.named()) {
        s.m.emplace_back(t->shape());
        s.v.emplace_back(t->shape());
    }
    return s;
}

double cross_entropy(const std::array<double, 2>& probs, int label, double weight) {
    if (label != 0 && label != 1) throw ConfigError("label must be 0 or 1");
    return -weight * std::log(std::max(probs[static_cast<std::size_t>(label)], kProbFloor));
}

std::array<double, 2> cross_entropy_grad(const std::array<double, 2>& probs, int label, double weight) {
    if (label != 0 && label != 1) throw ConfigError("label must be 0 or 1");
    std::array<double, 2> g{0.0, 0.0};
    const double p = probs[static_cast<std::size_t>(label)];
    if (p > kProbFloor) g[static_cast<std::size_t>(label)] = -weight / p;
    return g;
}

std::array<double, 2> class_weights(std::span<const int> labels) {
    std::array<std::size_t, 2> n{0, 0};
    for (int y : labels) {
        if (y != 0 && y != 1) throw ConfigError("label must be 0 or 1");
        ++n[static_cast<std::size_t>(y)];
    }
    if (n[0] == 0 || n[1] == 0) throw ConfigError("class weights need both classes present");
    const double total = static_cast<double>(n[0] + n[1]);
    return {total / (2.0 * static_cast<double>(n[0])), total / (2.0 * static_cast<double>(n[1]))};
}

double global_norm(const ModelParams& grads) {
    double s = 0.0;
    for (const auto& [name, t] : grads.named())
        for (double g : t->data()) s += g * g;
    return std::sqrt(s);
}

double clip_global_norm(ModelParams& grads, double max_norm) {
    const double norm = global_norm(grads);
    if (norm > max_norm) {
        const double scale = max_norm / norm;
        for (auto& [name, t] : grads.named()) *t *= scale;
    }
    return norm;
}

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& st, const TrainConfig& cfg) {
    auto ps = params.named();
    const auto gs = grads.named();
    if (ps.size() != gs.size() || st.m.size() != ps.size()) throw ShapeError("adam_step: parameter sets differ");
    ++st.t;
    const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(st.t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(st.t));
    for (std::size_t n = 0; n < ps.size(); ++n) {
        Tensor& p = *ps[n].second;
        const Tensor& g = *gs[n].second;
        expect_shape(g, p.shape(), "adam_step");
        Tensor& m = st.m[n];
        Tensor& v = st.v[n];
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            const double m_hat = m[i] / c1;
            const double v_hat = v[i] / c2;
            p[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
        }
    }
}

LossAccuracy loss_and_accuracy(std::span<const Sample> samples, const EmbeddingTable& table,
                               const ModelConfig& model, const ModelParams& params,
                               const std::array<double, 2>& weights) {
    LossAccuracy out;
    if (samples.empty()) return out;
    double loss = 0.0;
    std::size_t correct = 0;
    for (const Sample& s : samples) {
        const ForwardResult r = hybrid_forward(s.seq, table, model, params, false);
        loss += cross_entropy(r.probs, s.label, weights[static_cast<std::size_t>(s.label)]);
        if (predicted_class(r.probs) == s.label) ++correct;
    }
    out.loss = loss / static_cast<double>(samples.size());
    out.accuracy = static_cast<double>(correct) / static_cast<double>(samples.size());
    return out;
}

TrainResult train(std::span<const Sample> train_set, std::span<const Sample> val_set, const EmbeddingTable& table,
                  const ModelConfig& model, const TrainConfig& cfg, const std::optional<ModelParams>& init) {
    cfg.validate();
    model.validate();
    if (train_set.empty()) throw DegenerateInputError("train: empty training set");

    TrainResult result;
    result.params = init ? *init : init_params(model, cfg.seed);
    check_params(model, result.params);
    for (const Sample& s : train_set) result.touched_ids.insert(s.id);
    for (const Sample& s : val_set) result.touched_ids.insert(s.id);

    std::array<double, 2> weights{1.0, 1.0};
    if (cfg.class_weighting) {
        std::vector<int> labels;
        for (const Sample& s : train_set) labels.push_back(s.label);
        weights = class_weights(labels);
    }

    Rng shuffle_rng(derive_seed(cfg.seed, "train/shuffle"));
    Rng dropout_rng(derive_seed(cfg.seed, "train/dropout"));
    AdamState adam = AdamState::for_params(result.params);
    ModelParams grads = result.params.zeros_like();

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(std::span<std::size_t>(order));
        double epoch_loss = 0.0;
        std::size_t correct = 0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            const double inv_batch = 1.0 / static_cast<double>(end - start);
            for (auto& [name, t] : grads.named()) t->fill(0.0);
            try {
                double batch_loss = 0.0;
                for (std::size_t i = start; i < end; ++i) {
                    const Sample& s = train_set[order[i]];
                    const double w = weights[static_cast<std::size_t>(s.label)];
                    ForwardTrace trace;
                    const ForwardResult r =
                        hybrid_forward(s.seq, table, model, result.params, true, &dropout_rng, &trace);
                    batch_loss += cross_entropy(r.probs, s.label, w);
                    if (predicted_class(r.probs) == s.label) ++correct;
                    std::array<double, 2> d = cross_entropy_grad(r.probs, s.label, w);
                    d[0] *= inv_batch;
                    d[1] *= inv_batch;
                    hybrid_backward(trace, model, result.params, d, grads);
                }
                if (!std::isfinite(batch_loss)) throw NumericFault("loss is not finite");
                for (const auto& [name, t] : grads.named()) check_finite(*t, name);
                if (cfg.grad_clip_norm) clip_global_norm(grads, *cfg.grad_clip_norm);
                adam_step(result.params, grads, adam, cfg);
                for (const auto& [name, t] : result.params.named()) check_finite(*t, name);
                epoch_loss += batch_loss;
            } catch (const NumericFault& e) {
                throw NumericFault("epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch_index) +
                                   ": " + e.what());
            }
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = epoch_loss / static_cast<double>(order.size());
        rec.train_acc = static_cast<double>(correct) / static_cast<double>(order.size());
        const LossAccuracy val = loss_and_accuracy(val_set.empty() ? train_set : val_set, table, model,
                                                   result.params, weights);
        rec.val_loss = val.loss;
        rec.val_acc = val.accuracy;
        result.history.push_back(rec);
    }
    return result;
}

std::vector<std::array<double, 2>> predict_all(std::span<const Sample> samples, const EmbeddingTable& table,
                                               const ModelConfig& model, const ModelParams& params) {
    std::vector<std::array<double, 2>> out;
    out.reserve(samples.size());
    for (const Sample& s : samples) out.push_back(hybrid_forward(s.seq, table, model, params, false).probs);
    return out;
}

MetricsReport evaluate(std::span<const Sample> samples, const EmbeddingTable& table, const ModelConfig& model,
                       const ModelParams& params) {
    if (samples.empty()) throw DegenerateInputError("evaluate: no samples");
    const auto probs = predict_all(samples, table, model, params);
    std::vector<int> labels;
    for (const Sample& s : samples) labels.push_back(s.label);
    return make_report(probs, labels);
}

std::string history_csv_header(bool with_fold) {
    return std::string(with_fold ? "fold," : "") + "epoch,train_loss,train_acc,val_loss,val_acc\n";
}

std::string history_csv_row(const EpochRecord& r, std::optional<std::size_t> fold) {
    std::string line;
    if (fold) line += std::to_string(*fold) + ",";
    line += std::to_string(r.epoch);
    for (double v : {r.train_loss, r.train_acc, r.val_loss, r.val_acc}) {
        line += ',';
        line += nlohmann::json(v).dump();
    }
    line += '\n';
    return line;
}

}  // namespace hybridclf
