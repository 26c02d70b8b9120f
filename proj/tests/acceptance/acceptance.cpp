// Acceptance checks. One PASS/FAIL line per criterion on stdout, details on
// stderr. Exit status is nonzero when any criterion fails.

#include "hybridclf/config.hpp"
#include "hybridclf/corpus.hpp"
#include "hybridclf/crossval.hpp"
#include "hybridclf/layers.hpp"
#include "hybridclf/metrics.hpp"
#include "hybridclf/model.hpp"
#include "hybridclf/preprocess.hpp"
#include "hybridclf/synthetic.hpp"
#include "hybridclf/training.hpp"

#include "support/gradcases.hpp"
#include "support/oracles.hpp"
#include "support/toy.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace hybridclf;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kGradEps = 1e-5;
constexpr double kGradTol = 1e-4;
constexpr std::uint64_t kGradSeeds = 20;
constexpr double kGradBudgetSeconds = 120.0;
constexpr double kProbSumTol = 1e-12;
constexpr double kLstmOracleTol = 1e-12;
constexpr double kAlphaTol = 1e-4;
constexpr double kCeTol = 1e-12;
constexpr double kBaselineTol = 1e-3;
constexpr double kAucTol = 1e-12;
constexpr int kAucInstances = 1000;
constexpr double kMinCvAccuracy = 0.95;
constexpr double kMinCvAuc = 0.98;
constexpr double kCvBudgetSeconds = 300.0;
constexpr double kOverfitLoss = 0.01;

const std::string data_dir = HYBRIDCLF_TEST_DATA;

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void fail(Outcome& o, const std::string& why) {
    o.pass = false;
    std::fprintf(stderr, "  - %s\n", why.c_str());
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

Outcome gradient_correctness() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t instances = 0;
    std::size_t failed = 0;
    double worst = 0.0;
    auto record = [&](const std::string& what, std::uint64_t seed, const GradCheckReport& r) {
        ++instances;
        worst = std::max(worst, r.max_rel_error);
        if (r.passed) return;
        ++failed;
        for (const auto& e : r.entries)
            if (e.max_rel_error > kGradTol)
                fail(o, what + " seed " + std::to_string(seed) + ": " + e.name + "[" + std::to_string(e.worst_index) +
                            "] analytic " + fmt(e.analytic) + " numeric " + fmt(e.numeric) + " rel " +
                            fmt(e.max_rel_error));
    };
    for (std::uint64_t s = 0; s < kGradSeeds; ++s) {
        record("conv1d", s, gradcases::conv1d_case(s, false, kGradTol));
        record("maxpool windowed", s, gradcases::maxpool_case(s, PoolMode::windowed, kGradTol));
        record("maxpool global", s, gradcases::maxpool_case(s, PoolMode::global, kGradTol));
        record("mha", s, gradcases::mha_case(s, kGradTol));
        record("lstm", s, gradcases::lstm_case(s, kGradTol));
        record("soft attention", s, gradcases::attention_case(s, kGradTol));
        record("dense softmax", s, gradcases::dense_case(s, kGradTol));
        record("cnn_lstm_attn composite", s,
               gradcases::composite_case(s, Variant::cnn_lstm_attn, kGradTol, kGradEps));
    }
    const double secs = seconds_since(t0);
    if (secs >= kGradBudgetSeconds) fail(o, "runtime " + fmt(secs) + " s");
    o.detail = std::to_string(instances - failed) + "/" + std::to_string(instances) + " instances within " +
               fmt(kGradTol) + " at eps " + fmt(kGradEps) + ", worst rel " + fmt(worst) + ", " + fmt(secs) + " s";
    return o;
}

Outcome shape_contract() {
    Outcome o;
    const ModelConfig cfg;
    Rng rng(2);
    EmbeddingTable table{gradcases::random_tensor({60, cfg.embed_dim}, rng, 0.05)};
    for (std::size_t j = 0; j < cfg.embed_dim; ++j) table.matrix.at(kPadId, j) = 0.0;
    EncodedSequence seq;
    seq.true_length = 200;
    for (std::size_t t = 0; t < 200; ++t) seq.ids.push_back(1 + rng.below(59));
    const auto r = hybrid_forward(seq, table, cfg, init_params(cfg, 1), false);
    const std::vector<Shape> expected{{200, 100}, {196, 128}, {39, 128}, {39, 128}, {39, 128}, {128}, {2}};
    std::string chain;
    for (const auto& s : r.shape_chain) chain += (chain.empty() ? "" : " -> ") + shape_to_string(s);
    if (r.shape_chain != expected) fail(o, "shape chain " + chain);
    const double sum_err = std::fabs(r.probs[0] + r.probs[1] - 1.0);
    if (sum_err > kProbSumTol) fail(o, "probability sum error " + fmt(sum_err));
    o.detail = chain + ", |sum-1| " + fmt(sum_err);
    return o;
}

Outcome equation_oracles() {
    Outcome o;
    double lstm_err = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        LstmParams p;
        for (Tensor* w : {&p.w_i, &p.w_f, &p.w_o, &p.w_c}) *w = gradcases::random_tensor({5, 4}, rng);
        for (Tensor* u : {&p.u_i, &p.u_f, &p.u_o, &p.u_c}) *u = gradcases::random_tensor({4, 4}, rng);
        for (Tensor* b : {&p.b_i, &p.b_f, &p.b_o, &p.b_c}) *b = gradcases::random_tensor({4}, rng);
        const Tensor x = gradcases::random_tensor({1, 5}, rng);
        const Tensor h0 = gradcases::random_tensor({4}, rng);
        const Tensor c0 = gradcases::random_tensor({4}, rng);
        oracles::LstmScalars s;
        s.din = 5;
        s.h = 4;
        s.wi = p.w_i.values(); s.wf = p.w_f.values(); s.wo = p.w_o.values(); s.wc = p.w_c.values();
        s.ui = p.u_i.values(); s.uf = p.u_f.values(); s.uo = p.u_o.values(); s.uc = p.u_c.values();
        s.bi = p.b_i.values(); s.bf = p.b_f.values(); s.bo = p.b_o.values(); s.bc = p.b_c.values();
        const Tensor h = lstm_forward(x, p, &h0, &c0);
        const auto expect = oracles::lstm_step(s, x.values(), h0.values(), c0.values());
        for (std::size_t j = 0; j < 4; ++j) lstm_err = std::max(lstm_err, std::fabs(h[j] - expect[j]));
    }
    if (lstm_err > kLstmOracleTol) fail(o, "lstm single step error " + fmt(lstm_err));

    const auto att = soft_attention(Tensor::identity(2), AttnParams{Tensor({2}, {1.0, 0.0})}, 2);
    const double a_err = std::max(std::fabs(att.alpha[0] - 0.7311), std::fabs(att.alpha[1] - 0.2689));
    if (a_err > kAlphaTol) fail(o, "alpha " + fmt(att.alpha[0]) + "," + fmt(att.alpha[1]));

    const double ce_err = std::fabs(cross_entropy({0.5, 0.5}, 1) - std::log(2.0));
    if (ce_err > kCeTol) fail(o, "cross entropy error " + fmt(ce_err));
    o.detail = "lstm max err " + fmt(lstm_err) + ", alpha [" + fmt(att.alpha[0]) + ", " + fmt(att.alpha[1]) +
               "], |CE-ln2| " + fmt(ce_err);
    return o;
}

Outcome metric_consistency() {
    Outcome o;
    const double f1_t2 = std::round(f1_from(0.94, 0.92) * 100.0) / 100.0;
    const double f1_t1 = std::round(f1_from(0.88, 0.86) * 100.0) / 100.0;
    if (f1_t2 != 0.93) fail(o, "F1 from 0.94/0.92 rounds to " + fmt(f1_t2));
    if (f1_t1 != 0.87) fail(o, "F1 from 0.88/0.86 rounds to " + fmt(f1_t1));
    // majority class: everything predicted deceptive
    const ScalarMetrics base = scalar_metrics({9198, 1176, 0, 0});
    if (std::fabs(base.accuracy - 9198.0 / 10374.0) > kBaselineTol || std::fabs(base.accuracy - 0.887) > kBaselineTol)
        fail(o, "baseline accuracy " + fmt(base.accuracy));
    o.detail = "F1 " + fmt(f1_t2) + " and " + fmt(f1_t1) + ", baseline accuracy " + fmt(base.accuracy);
    return o;
}

Outcome auc_oracle() {
    Outcome o;
    Rng rng(20240601);
    double worst = 0.0;
    for (int trial = 0; trial < kAucInstances; ++trial) {
        const std::size_t n = 2 + rng.below(49);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        const bool coarse = rng.bernoulli(0.5);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = coarse ? static_cast<double>(rng.below(6)) / 5.0 : rng.uniform();
            labels[i] = static_cast<int>(rng.below(2));
        }
        labels[rng.below(n)] = 0;
        std::size_t j = rng.below(n);
        while (labels[j] == 0 && std::count(labels.begin(), labels.end(), 0) == 1) j = rng.below(n);
        labels[j] = 1;
        worst = std::max(worst, std::fabs(roc_auc(scores, labels).auc - oracles::pairwise_auc(scores, labels)));
    }
    if (worst > kAucTol) fail(o, "max deviation from pairwise oracle " + fmt(worst));
    const double perfect = roc_auc(std::vector<double>{0.9, 0.7, 0.3, 0.1}, std::vector<int>{1, 1, 0, 0}).auc;
    const double constant = roc_auc(std::vector<double>{0.4, 0.4, 0.4, 0.4}, std::vector<int>{1, 0, 1, 0}).auc;
    if (perfect != 1.0) fail(o, "separated AUC " + fmt(perfect));
    if (constant != 0.5) fail(o, "constant-score AUC " + fmt(constant));
    o.detail = std::to_string(kAucInstances) + " instances, max deviation " + fmt(worst) + ", degenerate " +
               fmt(perfect) + " / " + fmt(constant);
    return o;
}

RunConfig tiny_config() {
    RunConfig c = load_run_config(data_dir + "/tiny_config.json");
    c.corpus = data_dir + "/synthetic_200.csv";
    return c;
}

Outcome learning_smoke() {
    Outcome o;
    const RunConfig cfg = tiny_config();
    const auto corpus = load_corpus(*cfg.corpus);
    const auto t0 = std::chrono::steady_clock::now();
    const CrossValResult cv = cross_validate(corpus, cfg.experiment(), {}, 1);
    const double secs = seconds_since(t0);
    const double acc = cv.aggregate[0].mean.value_or(0.0);
    const double auc = cv.aggregate[4].mean.value_or(0.0);
    if (cfg.train.epochs > 30) fail(o, "epochs " + std::to_string(cfg.train.epochs));
    if (acc < kMinCvAccuracy) fail(o, "mean accuracy " + fmt(acc));
    if (auc < kMinCvAuc) fail(o, "mean AUC " + fmt(auc));
    if (secs >= kCvBudgetSeconds) fail(o, "runtime " + fmt(secs) + " s");

    const auto data = toy::separable_set(8, 0);
    const auto table = toy::toy_table(8, 100);
    const auto fit = train(data, {}, table, toy::tiny_model(), toy::overfit_config());
    const double final_loss = fit.history.back().train_loss;
    if (!(final_loss < kOverfitLoss)) fail(o, "8-sample final loss " + fmt(final_loss));
    o.detail = "5-fold mean accuracy " + fmt(acc) + ", AUC " + fmt(auc) + " in " + fmt(secs) +
               " s; 8-sample loss after " + std::to_string(fit.history.size()) + " epochs " + fmt(final_loss);
    return o;
}

Outcome protocol_integrity() {
    Outcome o;
    const auto corpus = synthetic_corpus(50, 11);
    RunConfig cfg = tiny_config();
    cfg.train.epochs = 2;
    const ExperimentConfig exp = cfg.experiment();
    const CrossValResult cv = cross_validate(corpus, exp, {}, 1);
    std::vector<std::set<std::string>> doc_tokens;
    for (const auto& d : corpus) {
        const auto t = preprocess(d.text, exp.preprocess).tokens;
        doc_tokens.emplace_back(t.begin(), t.end());
    }
    if (cv.folds.size() != 5) fail(o, std::to_string(cv.folds.size()) + " folds");
    for (const auto& f : cv.folds) {
        const std::string tag = "fold " + std::to_string(f.fold) + ": ";
        if (f.train_ids.size() != 80 || f.test_ids.size() != 20)
            fail(o, tag + std::to_string(f.train_ids.size()) + "/" + std::to_string(f.test_ids.size()));
        const std::set<std::size_t> test(f.test_ids.begin(), f.test_ids.end());
        for (std::size_t id : f.train_ids)
            if (test.contains(id)) fail(o, tag + "id " + std::to_string(id) + " in train and test");
        for (std::size_t id : f.touched_ids)
            if (test.contains(id)) fail(o, tag + "test id " + std::to_string(id) + " used in training");
        std::set<std::string> train_tokens;
        for (std::size_t id : f.train_ids) train_tokens.insert(doc_tokens[id].begin(), doc_tokens[id].end());
        for (std::size_t v = 2; v < f.vocab.size(); ++v)
            if (!train_tokens.contains(f.vocab.token(v))) fail(o, tag + "vocabulary token '" + f.vocab.token(v) + "' is test-only");
        if (!f.table_unchanged) fail(o, tag + "embedding table changed");
    }
    o.detail = "5 folds of 80/20 on N=100, disjoint ids, train-only vocabulary, frozen table";
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "hybridclf_acceptance_det";
    fs::remove_all(root);
    std::vector<fs::path> dirs{root / "a", root / "b"};
    for (const auto& d : dirs) {
        const std::string cmd = std::string("\"") + HYBRIDCLF_CLI + "\" cross-validate --corpus " + data_dir +
                                "/synthetic_200.csv --config " + data_dir + "/tiny_config.json --out \"" +
                                d.string() + "\" > /dev/null";
        if (std::system(cmd.c_str()) != 0) fail(o, "command failed: " + cmd);
    }
    std::size_t compared = 0;
    if (o.pass) {
        for (const auto& entry : fs::directory_iterator(dirs[0])) {
            const auto name = entry.path().filename();
            ++compared;
            if (!fs::exists(dirs[1] / name) || slurp(entry.path()) != slurp(dirs[1] / name))
                fail(o, name.string() + " differs");
        }
        if (compared < 12) fail(o, "only " + std::to_string(compared) + " output files");
    }
    fs::remove_all(root);
    o.detail = std::to_string(compared) + " output files byte-identical across two runs";
    return o;
}

Outcome preprocessing_goldens() {
    Outcome o;
    if (lemmatize("running") != "run") fail(o, "running -> " + lemmatize("running"));
    if (generate_bigrams({"credit", "card"}) != std::vector<std::string>{"credit_card"}) fail(o, "credit card bigram");
    const auto toks = tokenize("p@ssw0rd reset", 2);
    if (toks.empty() || toks.front() != "p@ssw0rd") fail(o, "p@ssw0rd split");
    const PreprocessConfig cfg;
    std::size_t ok = 0;
    for (const auto& f : oracles::pipeline_fixtures()) {
        if (preprocess(f.text, cfg).tokens == f.tokens) ++ok;
        else fail(o, "fixture '" + f.text + "'");
    }
    if (oracles::pipeline_fixtures().size() < 20) fail(o, "fewer than 20 fixtures");
    o.detail = "micro-examples hold, " + std::to_string(ok) + "/" +
               std::to_string(oracles::pipeline_fixtures().size()) + " pipeline fixtures";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"gradient correctness", gradient_correctness},
        {"shape contract", shape_contract},
        {"equation-level oracles", equation_oracles},
        {"metric consistency", metric_consistency},
        {"AUC oracle equivalence", auc_oracle},
        {"learning smoke test", learning_smoke},
        {"protocol integrity", protocol_integrity},
        {"determinism", determinism},
        {"preprocessing goldens", preprocessing_goldens},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        std::fprintf(stderr, "criterion %zu: %s\n", i + 1, criteria[i].first.c_str());
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        if (!o.pass) ++failures;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
