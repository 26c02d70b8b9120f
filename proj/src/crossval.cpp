#include "hybridclf/crossval.hpp"

#include "hybridclf/errors.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace hybridclf {

std::vector<Sample> make_samples(const std::vector<Document>& corpus, const std::vector<TokenSequence>& tokens,
                                 std::span<const std::size_t> indices, const Vocabulary& vocab,
                                 std::size_t seq_len) {
    std::vector<Sample> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back({corpus[i].id, encode(tokens[i], vocab, seq_len), corpus[i].label});
    return out;
}

namespace {

FoldOutcome run_fold(std::size_t f, const std::vector<Document>& corpus, const std::vector<TokenSequence>& tokens,
                     const FoldPlan& plan, const ExperimentConfig& cfg, const PretrainedVectors& pretrained) {
    FoldOutcome out;
    out.fold = f;
    const std::string tag = "fold" + std::to_string(f);
    const std::vector<std::size_t> train_idx = plan.train_indices(f);
    const std::vector<std::size_t> test_idx = plan.test_indices(f);

    std::vector<TokenSequence> train_tokens;
    std::vector<int> train_labels;
    for (std::size_t i : train_idx) {
        train_tokens.push_back(tokens[i]);
        train_labels.push_back(corpus[i].label);
    }
    out.vocab = build_vocabulary(train_tokens, cfg.vocab_size);
    const EmbeddingTable table =
        assemble_embedding(out.vocab, pretrained, cfg.model.embed_dim, derive_seed(cfg.train.seed, tag + "/embedding"));
    const EmbeddingTable table_before = table;

    auto [kept_pos, holdout_pos] =
        stratified_holdout(train_labels, cfg.train.validation_fraction, derive_seed(cfg.train.seed, tag + "/validation"));
    std::vector<std::size_t> kept, holdout;
    for (std::size_t p : kept_pos) kept.push_back(train_idx[p]);
    for (std::size_t p : holdout_pos) holdout.push_back(train_idx[p]);

    const std::size_t T = cfg.model.seq_len;
    const std::vector<Sample> train_set = make_samples(corpus, tokens, kept, out.vocab, T);
    const std::vector<Sample> val_set = make_samples(corpus, tokens, holdout, out.vocab, T);
    const std::vector<Sample> test_set = make_samples(corpus, tokens, test_idx, out.vocab, T);

    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(cfg.train.seed, tag + "/train");
    TrainResult tr = train(train_set, val_set, table, cfg.model, tc);

    for (std::size_t i : train_idx) out.train_ids.push_back(corpus[i].id);
    for (std::size_t i : holdout) out.validation_ids.push_back(corpus[i].id);
    for (std::size_t i : test_idx) out.test_ids.push_back(corpus[i].id);
    out.table_unchanged = table == table_before;
    out.touched_ids = std::move(tr.touched_ids);
    out.history = std::move(tr.history);
    out.test_probs = predict_all(test_set, table, cfg.model, tr.params);
    std::vector<int> labels;
    for (const Sample& s : test_set) labels.push_back(s.label);
    out.report = make_report(out.test_probs, labels);
    return out;
}

}  // namespace

CrossValResult cross_validate(const std::vector<Document>& corpus, const ExperimentConfig& cfg,
                              const PretrainedVectors& pretrained, std::size_t jobs) {
    cfg.preprocess.validate();
    cfg.model.validate();
    cfg.train.validate();
    if (cfg.vocab_size < 1) throw ConfigError("vocab_size must be at least 1");
    if (corpus.empty()) throw EmptyCorpusError("cross_validate: empty corpus");

    const FoldPlan plan = plan_folds(corpus, cfg.train.k, cfg.train.seed);
    std::vector<TokenSequence> tokens;
    tokens.reserve(corpus.size());
    for (const Document& d : corpus) tokens.push_back(preprocess(d.text, cfg.preprocess));

    CrossValResult result;
    result.folds.resize(plan.k);
    jobs = std::clamp<std::size_t>(jobs, 1, plan.k);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t f = next++; f < plan.k; f = next++) {
            try {
                result.folds[f] = run_fold(f, corpus, tokens, plan, cfg, pretrained);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<MetricsReport> reports;
    for (const auto& f : result.folds) reports.push_back(f.report);
    result.aggregate = aggregate(reports);
    result.correlation = metric_correlation(reports);
    return result;
}

nlohmann::json aggregate_to_json(const CrossValResult& r) {
    nlohmann::json j;
    j["folds"] = r.folds.size();
    nlohmann::json mean, stdev;
    for (std::size_t m = 0; m < kMetricNames.size(); ++m) {
        const auto& s = r.aggregate[m];
        mean[kMetricNames[m]] = s.mean ? nlohmann::json(*s.mean) : nlohmann::json(nullptr);
        stdev[kMetricNames[m]] = s.std ? nlohmann::json(*s.std) : nlohmann::json(nullptr);
    }
    j["mean"] = std::move(mean);
    j["std"] = std::move(stdev);
    j["correlation"] = correlation_to_json(r.correlation);
    nlohmann::json per_fold = nlohmann::json::array();
    for (const auto& f : r.folds) {
        nlohmann::json e = report_to_json(f.report);
        e.erase("roc");
        e["fold"] = f.fold;
        per_fold.push_back(std::move(e));
    }
    j["per_fold"] = std::move(per_fold);
    return j;
}

}  // namespace hybridclf
