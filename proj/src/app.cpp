#include "hybridclf/app.hpp"

#include "hybridclf/errors.hpp"
#include "hybridclf/io.hpp"

#include <algorithm>
#include <map>

namespace hybridclf {

namespace {

std::vector<Document> load_configured_corpus(const RunConfig& c) {
    if (!c.corpus) throw ConfigError("no corpus path given");
    if (!std::filesystem::is_regular_file(*c.corpus)) throw ConfigError("corpus file not found: " + *c.corpus);
    return load_corpus(*c.corpus, c.text_column, c.label_column);
}

std::filesystem::path output_dir(const RunConfig& c) {
    if (!c.out_dir) throw ConfigError("no output directory given");
    std::filesystem::path dir(*c.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw ConfigError("cannot create output directory " + dir.string());
    return dir;
}

std::string history_csv(const std::vector<EpochRecord>& h) {
    std::string out = history_csv_header(false);
    for (const auto& r : h) out += history_csv_row(r);
    return out;
}

}  // namespace

PretrainedVectors load_configured_embeddings(const RunConfig& c) {
    if (!c.embeddings) return {};
    if (!std::filesystem::is_regular_file(*c.embeddings))
        throw ConfigError("embedding file not found: " + *c.embeddings);
    return load_embedding_file(*c.embeddings, c.model.embed_dim);
}

nlohmann::json run_stats(const RunConfig& c) {
    if (c.length_bucket < 1) throw ConfigError("length_bucket must be at least 1");
    return stats_to_json(compute_stats(load_configured_corpus(c), c.length_bucket));
}

std::string tokens_jsonl(const std::vector<Document>& corpus, const PreprocessConfig& config) {
    std::string out;
    for (const Document& d : corpus) {
        nlohmann::json line = {{"id", d.id}, {"label", d.label}, {"tokens", preprocess(d.text, config).tokens}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

std::filesystem::path run_preprocess(const RunConfig& c) {
    c.validate();
    const auto corpus = load_configured_corpus(c);
    const auto dir = output_dir(c);
    const auto path = dir / "tokens.jsonl";
    write_file_atomic(path, tokens_jsonl(corpus, c.preprocess_config()));
    return path;
}

Checkpoint run_train(const RunConfig& c) {
    c.validate();
    const auto corpus = load_configured_corpus(c);
    const PretrainedVectors pretrained = load_configured_embeddings(c);
    const auto dir = output_dir(c);
    const PreprocessConfig pc = c.preprocess_config();

    std::vector<TokenSequence> tokens;
    std::vector<int> labels;
    for (const Document& d : corpus) {
        tokens.push_back(preprocess(d.text, pc));
        labels.push_back(d.label);
    }
    Checkpoint ck;
    ck.config = c;
    ck.config.corpus.reset();
    ck.config.embeddings.reset();
    ck.config.checkpoint.reset();
    ck.config.out_dir.reset();
    ck.vocab = build_vocabulary(tokens, c.vocab_size);
    ck.table = assemble_embedding(ck.vocab, pretrained, c.model.embed_dim, derive_seed(c.train.seed, "embedding"));

    auto [kept, holdout] =
        stratified_holdout(labels, c.train.validation_fraction, derive_seed(c.train.seed, "validation"));
    const auto train_set = make_samples(corpus, tokens, kept, ck.vocab, c.model.seq_len);
    const auto val_set = make_samples(corpus, tokens, holdout, ck.vocab, c.model.seq_len);
    TrainConfig tc = c.train;
    tc.seed = derive_seed(c.train.seed, "train");
    TrainResult tr = train(train_set, val_set, ck.table, c.model, tc);
    ck.params = std::move(tr.params);
    ck.history = std::move(tr.history);

    save_checkpoint(dir / "model.ckpt.json", ck);
    write_file_atomic(dir / "history.csv", history_csv(ck.history));
    return ck;
}

CrossValResult run_cross_validate(const RunConfig& c) {
    c.validate();
    const auto corpus = load_configured_corpus(c);
    const PretrainedVectors pretrained = load_configured_embeddings(c);
    const auto dir = output_dir(c);
    CrossValResult r = cross_validate(corpus, c.experiment(), pretrained, c.jobs);

    std::string history = history_csv_header(true);
    for (const FoldOutcome& f : r.folds) {
        const std::string stem = "fold_" + std::to_string(f.fold);
        nlohmann::json m = report_to_json(f.report);
        m["fold"] = f.fold;
        m["test_ids"] = f.test_ids;
        write_file_atomic(dir / (stem + "_metrics.json"), m.dump(2) + "\n");
        write_file_atomic(dir / (stem + "_roc.csv"), roc_to_csv(f.report.roc));
        for (const auto& rec : f.history) history += history_csv_row(rec, f.fold);
    }
    write_file_atomic(dir / "aggregate.json", aggregate_to_json(r).dump(2) + "\n");
    write_file_atomic(dir / "history.csv", history);
    return r;
}

MetricsReport run_evaluate(const Checkpoint& ck, const std::filesystem::path& corpus_path,
                           const std::optional<std::string>& text_column,
                           const std::optional<std::string>& label_column) {
    if (!std::filesystem::is_regular_file(corpus_path))
        throw ConfigError("corpus file not found: " + corpus_path.string());
    const auto corpus = load_corpus(corpus_path, text_column.value_or(ck.config.text_column),
                                    label_column.value_or(ck.config.label_column));
    const PreprocessConfig pc = ck.config.preprocess_config();
    std::vector<Sample> samples;
    for (const Document& d : corpus)
        samples.push_back({d.id, encode(preprocess(d.text, pc), ck.vocab, ck.config.model.seq_len), d.label});
    return evaluate(samples, ck.table, ck.config.model, ck.params);
}

std::vector<TokenWeight> attention_tokens(const EncodedSequence& seq, const Vocabulary& vocab,
                                          const ModelConfig& model, const std::vector<double>& alpha,
                                          std::size_t top_n) {
    std::map<std::string, double> acc;
    const std::size_t span = model.pool_size + model.kernel_size - 1;
    for (std::size_t p = 0; p < alpha.size(); ++p) {
        if (alpha[p] == 0.0) continue;
        const std::size_t lo = p * model.pool_size;
        const std::size_t hi = std::min(lo + span, seq.true_length);
        if (lo >= hi) continue;
        const double share = alpha[p] / static_cast<double>(hi - lo);
        for (std::size_t t = lo; t < hi; ++t) acc[vocab.token(seq.ids[t])] += share;
    }
    std::vector<TokenWeight> out;
    for (const auto& [tok, w] : acc) out.push_back({tok, w});
    std::stable_sort(out.begin(), out.end(),
                     [](const TokenWeight& a, const TokenWeight& b) { return a.weight > b.weight; });
    if (out.size() > top_n) out.resize(top_n);
    return out;
}

Prediction predict_text(const Checkpoint& ck, std::string_view text, std::size_t top_n) {
    const ModelConfig& m = ck.config.model;
    const EncodedSequence seq = encode(preprocess(text, ck.config.preprocess_config()), ck.vocab, m.seq_len);
    const ForwardResult r = hybrid_forward(seq, ck.table, m, ck.params, false);
    Prediction p;
    p.probs = r.probs;
    p.label = predicted_class(r.probs);
    if (r.attention) p.top_tokens = attention_tokens(seq, ck.vocab, m, *r.attention, top_n);
    return p;
}

nlohmann::json prediction_to_json(const Prediction& p) {
    nlohmann::json j;
    j["class"] = p.label;
    j["probabilities"] = p.probs;
    if (p.top_tokens) {
        nlohmann::json toks = nlohmann::json::array();
        for (const auto& t : *p.top_tokens) toks.push_back({{"token", t.token}, {"weight", t.weight}});
        j["top_tokens"] = std::move(toks);
    } else {
        j["top_tokens"] = nullptr;
    }
    return j;
}

}  // namespace hybridclf
