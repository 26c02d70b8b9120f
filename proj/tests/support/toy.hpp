#pragma once

// Small separable training fixtures shared by the training tests and the
// acceptance binary.

#include "hybridclf/model.hpp"
#include "hybridclf/training.hpp"

#include "support/gradcases.hpp"

#include <vector>

namespace toy {

using namespace hybridclf;

inline ModelConfig tiny_model(Variant v = Variant::cnn_lstm_attn) {
    ModelConfig m;
    m.variant = v;
    m.seq_len = 12;
    m.embed_dim = 8;
    m.filters = 8;
    m.kernel_size = 3;
    m.pool_size = 2;
    m.num_heads = 2;
    m.key_dim = 4;
    m.lstm_units = 8;
    return m;
}

/// Ids 2..5 mark class 1, ids 6..9 class 0. Lengths vary between 4 and 12.
inline std::vector<Sample> separable_set(std::size_t n, std::uint64_t seed, std::size_t seq_len = 12) {
    Rng rng(seed);
    std::vector<Sample> out;
    for (std::size_t i = 0; i < n; ++i) {
        Sample s;
        s.id = i;
        s.label = static_cast<int>(i % 2);
        s.seq.true_length = 4 + rng.below(seq_len - 3);
        for (std::size_t t = 0; t < seq_len; ++t) {
            const std::size_t base = s.label == 1 ? 2 : 6;
            s.seq.ids.push_back(t < s.seq.true_length ? base + rng.below(4) : kPadId);
        }
        out.push_back(std::move(s));
    }
    return out;
}

inline EmbeddingTable toy_table(std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    EmbeddingTable t{gradcases::random_tensor({10, dim}, rng, 0.5)};
    for (std::size_t j = 0; j < dim; ++j) t.matrix.at(kPadId, j) = 0.0;
    return t;
}

inline TrainConfig overfit_config() {
    TrainConfig c;
    c.epochs = 200;
    c.batch_size = 8;
    c.learning_rate = 0.01;
    c.seed = 3;
    return c;
}

}  // namespace toy
