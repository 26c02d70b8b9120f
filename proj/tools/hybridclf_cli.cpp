// hybridclf: batch front end for corpus statistics, preprocessing, training,
// cross-validation, evaluation and prediction.

#include "hybridclf/app.hpp"
#include "hybridclf/errors.hpp"
#include "hybridclf/io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

using hybridclf::RunConfig;

struct Overrides {
    std::string config;
    std::string corpus, embeddings, out, checkpoint, input;
    std::string text_column, label_column, variant;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs, k, epochs, bucket;
};

void print_error(const std::string& kind, const std::string& message) {
    nlohmann::json e = {{"error", kind}, {"message", message}};
    std::cerr << e.dump() << std::endl;
}

void require_file(const std::string& path, const char* what) {
    if (!std::filesystem::is_regular_file(path))
        throw hybridclf::ConfigError(std::string(what) + " file not found: " + path);
}

RunConfig resolve(const Overrides& o) {
    RunConfig c;
    if (!o.config.empty()) {
        require_file(o.config, "config");
        c = hybridclf::load_run_config(o.config);
    }
    if (!o.corpus.empty()) c.corpus = o.corpus;
    if (!o.embeddings.empty()) c.embeddings = o.embeddings;
    if (!o.out.empty()) c.out_dir = o.out;
    if (!o.checkpoint.empty()) c.checkpoint = o.checkpoint;
    if (!o.text_column.empty()) c.text_column = o.text_column;
    if (!o.label_column.empty()) c.label_column = o.label_column;
    if (!o.variant.empty()) c.model.variant = hybridclf::parse_variant(o.variant);
    if (o.seed) c.train.seed = *o.seed;
    if (o.jobs) c.jobs = *o.jobs;
    if (o.k) c.train.k = *o.k;
    if (o.epochs) c.train.epochs = *o.epochs;
    if (o.bucket) c.length_bucket = *o.bucket;
    c.validate();
    if (c.corpus) require_file(*c.corpus, "corpus");
    if (c.embeddings) require_file(*c.embeddings, "embedding");
    return c;
}

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "flat JSON run configuration");
    cmd->add_option("--text-column", o.text_column, "CSV column holding the page text");
    cmd->add_option("--label-column", o.label_column, "CSV column holding the 0/1 label");
}

void add_training(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--embeddings", o.embeddings, "pre-trained vectors, GloVe text format");
    cmd->add_option("--out", o.out, "output directory")->required();
    cmd->add_option("--seed", o.seed, "run seed");
    cmd->add_option("--epochs", o.epochs, "training epochs");
    cmd->add_option("--variant", o.variant, "cnn | lstm | cnn_lstm | cnn_lstm_attn");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid CNN-LSTM-attention web page classifier"};
    app.require_subcommand(1);
    Overrides o;

    auto* stats = app.add_subcommand("stats", "corpus class and length statistics");
    add_common(stats, o);
    stats->add_option("--corpus", o.corpus, "labeled CSV")->required();
    stats->add_option("--bucket", o.bucket, "histogram bucket width in characters");

    auto* prep = app.add_subcommand("preprocess", "write token JSON lines");
    add_common(prep, o);
    prep->add_option("--corpus", o.corpus, "labeled CSV")->required();
    prep->add_option("--out", o.out, "output directory")->required();

    auto* trn = app.add_subcommand("train", "train on the whole corpus");
    add_common(trn, o);
    trn->add_option("--corpus", o.corpus, "labeled CSV")->required();
    add_training(trn, o);

    auto* cv = app.add_subcommand("cross-validate", "stratified k-fold evaluation");
    add_common(cv, o);
    cv->add_option("--corpus", o.corpus, "labeled CSV")->required();
    add_training(cv, o);
    cv->add_option("--jobs", o.jobs, "folds trained concurrently");
    cv->add_option("--k", o.k, "number of folds");

    auto* ev = app.add_subcommand("evaluate", "metrics of a saved model");
    ev->add_option("--checkpoint", o.checkpoint, "model.ckpt.json")->required();
    ev->add_option("--corpus", o.corpus, "labeled CSV")->required();
    ev->add_option("--text-column", o.text_column, "CSV column holding the page text");
    ev->add_option("--label-column", o.label_column, "CSV column holding the 0/1 label");

    auto* pred = app.add_subcommand("predict", "classify one page");
    pred->add_option("--checkpoint", o.checkpoint, "model.ckpt.json")->required();
    pred->add_option("--input", o.input, "page text, or a path to a file holding it")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("usage", e.what());
        return 2;
    }

    try {
        if (*stats) {
            std::cout << hybridclf::run_stats(resolve(o)).dump() << std::endl;
        } else if (*prep) {
            const auto path = hybridclf::run_preprocess(resolve(o));
            std::cout << nlohmann::json{{"tokens", path.string()}}.dump() << std::endl;
        } else if (*trn) {
            const RunConfig c = resolve(o);
            const auto ck = hybridclf::run_train(c);
            const auto& last = ck.history.back();
            std::cout << nlohmann::json{{"checkpoint", (std::filesystem::path(*c.out_dir) / "model.ckpt.json").string()},
                                        {"epochs", ck.history.size()},
                                        {"train_loss", last.train_loss},
                                        {"val_acc", last.val_acc}}
                             .dump()
                      << std::endl;
        } else if (*cv) {
            const auto r = hybridclf::run_cross_validate(resolve(o));
            nlohmann::json j = hybridclf::aggregate_to_json(r);
            std::cout << nlohmann::json{{"folds", r.folds.size()}, {"mean", j["mean"]}, {"std", j["std"]}}.dump()
                      << std::endl;
        } else if (*ev) {
            require_file(o.checkpoint, "checkpoint");
            require_file(o.corpus, "corpus");
            const auto ck = hybridclf::load_checkpoint(o.checkpoint);
            auto opt = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<std::string>(s); };
            const auto report = hybridclf::run_evaluate(ck, o.corpus, opt(o.text_column), opt(o.label_column));
            std::cout << hybridclf::report_to_json(report).dump() << std::endl;
        } else if (*pred) {
            require_file(o.checkpoint, "checkpoint");
            const auto ck = hybridclf::load_checkpoint(o.checkpoint);
            std::string text = o.input;
            std::error_code ec;
            if (std::filesystem::is_regular_file(o.input, ec)) text = hybridclf::read_file(o.input);
            std::cout << hybridclf::prediction_to_json(hybridclf::predict_text(ck, text)).dump() << std::endl;
        }
    } catch (const hybridclf::Error& e) {
        print_error(e.kind(), e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 1;
    }
    return 0;
}
