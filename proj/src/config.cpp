#include "hybridclf/config.hpp"

#include "hybridclf/errors.hpp"
#include "hybridclf/io.hpp"

#include <set>

namespace hybridclf {

PreprocessConfig RunConfig::preprocess_config() const {
    PreprocessConfig p;
    if (stop_words) p.stop_words = StopWordSet(stop_words->begin(), stop_words->end());
    p.min_token_len = min_token_len;
    p.emit_bigrams = emit_bigrams;
    p.strip_markup = strip_markup;
    return p;
}

ExperimentConfig RunConfig::experiment() const {
    return {preprocess_config(), vocab_size, model, train};
}

void RunConfig::validate() const {
    preprocess_config().validate();
    if (vocab_size < 1) throw ConfigError("vocab_size must be at least 1");
    if (length_bucket < 1) throw ConfigError("length_bucket must be at least 1");
    if (jobs < 1) throw ConfigError("jobs must be at least 1");
    model.validate();
    train.validate();
}

namespace {

template <typename T>
T get_as(const nlohmann::json& v, const std::string& key) {
    try {
        return v.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

std::size_t get_count(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        throw ConfigError("config key '" + key + "' must be a non-negative integer");
    return v.get<std::size_t>();
}

std::optional<std::string> get_path(const nlohmann::json& v, const std::string& key) {
    if (v.is_null()) return std::nullopt;
    return get_as<std::string>(v, key);
}

}  // namespace

RunConfig merge_run_config(RunConfig c, const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (key == "min_token_len") c.min_token_len = get_count(v, key);
        else if (key == "emit_bigrams") c.emit_bigrams = get_as<bool>(v, key);
        else if (key == "strip_markup") c.strip_markup = get_as<bool>(v, key);
        else if (key == "stop_words") {
            if (v.is_null()) c.stop_words.reset();
            else c.stop_words = get_as<std::vector<std::string>>(v, key);
        }
        else if (key == "vocab_size") c.vocab_size = get_count(v, key);
        else if (key == "variant") c.model.variant = parse_variant(get_as<std::string>(v, key));
        else if (key == "seq_len") c.model.seq_len = get_count(v, key);
        else if (key == "embed_dim") c.model.embed_dim = get_count(v, key);
        else if (key == "filters") c.model.filters = get_count(v, key);
        else if (key == "kernel_size") c.model.kernel_size = get_count(v, key);
        else if (key == "pool_size") c.model.pool_size = get_count(v, key);
        else if (key == "num_heads") c.model.num_heads = get_count(v, key);
        else if (key == "key_dim") c.model.key_dim = get_count(v, key);
        else if (key == "lstm_units") c.model.lstm_units = get_count(v, key);
        else if (key == "dropout") c.model.dropout = get_as<double>(v, key);
        else if (key == "forget_bias_one") c.model.forget_bias_one = get_as<bool>(v, key);
        else if (key == "bias_inside_relu") c.model.bias_inside_relu = get_as<bool>(v, key);
        else if (key == "epochs") c.train.epochs = get_count(v, key);
        else if (key == "batch_size") c.train.batch_size = get_count(v, key);
        else if (key == "learning_rate") c.train.learning_rate = get_as<double>(v, key);
        else if (key == "adam_beta1") c.train.adam_beta1 = get_as<double>(v, key);
        else if (key == "adam_beta2") c.train.adam_beta2 = get_as<double>(v, key);
        else if (key == "adam_eps") c.train.adam_eps = get_as<double>(v, key);
        else if (key == "k") c.train.k = get_count(v, key);
        else if (key == "seed") c.train.seed = get_as<std::uint64_t>(v, key);
        else if (key == "class_weighting") c.train.class_weighting = get_as<bool>(v, key);
        else if (key == "grad_clip_norm") {
            if (v.is_null()) c.train.grad_clip_norm.reset();
            else c.train.grad_clip_norm = get_as<double>(v, key);
        }
        else if (key == "validation_fraction") c.train.validation_fraction = get_as<double>(v, key);
        else if (key == "text_column") c.text_column = get_as<std::string>(v, key);
        else if (key == "label_column") c.label_column = get_as<std::string>(v, key);
        else if (key == "length_bucket") c.length_bucket = get_count(v, key);
        else if (key == "jobs") c.jobs = get_count(v, key);
        else if (key == "corpus") c.corpus = get_path(v, key);
        else if (key == "embeddings") c.embeddings = get_path(v, key);
        else if (key == "checkpoint") c.checkpoint = get_path(v, key);
        else if (key == "out_dir") c.out_dir = get_path(v, key);
        else throw ConfigError("unknown config key '" + key + "'");
    }
    return c;
}

RunConfig run_config_from_json(const nlohmann::json& j) { return merge_run_config(RunConfig{}, j); }

RunConfig load_run_config(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config '" + path.string() + "' is not valid JSON (byte " + std::to_string(e.byte) + ")");
    }
    return run_config_from_json(j);
}

nlohmann::json run_config_to_json(const RunConfig& c, bool with_paths) {
    nlohmann::json j;
    j["min_token_len"] = c.min_token_len;
    j["emit_bigrams"] = c.emit_bigrams;
    j["strip_markup"] = c.strip_markup;
    j["stop_words"] = c.stop_words ? nlohmann::json(*c.stop_words) : nlohmann::json(nullptr);
    j["vocab_size"] = c.vocab_size;
    j["variant"] = to_string(c.model.variant);
    j["seq_len"] = c.model.seq_len;
    j["embed_dim"] = c.model.embed_dim;
    j["filters"] = c.model.filters;
    j["kernel_size"] = c.model.kernel_size;
    j["pool_size"] = c.model.pool_size;
    j["num_heads"] = c.model.num_heads;
    j["key_dim"] = c.model.key_dim;
    j["lstm_units"] = c.model.lstm_units;
    j["dropout"] = c.model.dropout;
    j["forget_bias_one"] = c.model.forget_bias_one;
    j["bias_inside_relu"] = c.model.bias_inside_relu;
    j["epochs"] = c.train.epochs;
    j["batch_size"] = c.train.batch_size;
    j["learning_rate"] = c.train.learning_rate;
    j["adam_beta1"] = c.train.adam_beta1;
    j["adam_beta2"] = c.train.adam_beta2;
    j["adam_eps"] = c.train.adam_eps;
    j["k"] = c.train.k;
    j["seed"] = c.train.seed;
    j["class_weighting"] = c.train.class_weighting;
    j["grad_clip_norm"] = c.train.grad_clip_norm ? nlohmann::json(*c.train.grad_clip_norm) : nlohmann::json(nullptr);
    j["validation_fraction"] = c.train.validation_fraction;
    j["text_column"] = c.text_column;
    j["label_column"] = c.label_column;
    j["length_bucket"] = c.length_bucket;
    j["jobs"] = c.jobs;
    if (with_paths) {
        auto opt = [](const std::optional<std::string>& s) { return s ? nlohmann::json(*s) : nlohmann::json(nullptr); };
        j["corpus"] = opt(c.corpus);
        j["embeddings"] = opt(c.embeddings);
        j["checkpoint"] = opt(c.checkpoint);
        j["out_dir"] = opt(c.out_dir);
    }
    return j;
}

}  // namespace hybridclf
