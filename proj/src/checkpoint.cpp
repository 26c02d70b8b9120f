#include "hybridclf/checkpoint.hpp"

#include "hybridclf/errors.hpp"
#include "hybridclf/io.hpp"

#include <map>

namespace hybridclf {

namespace {

nlohmann::json dims_to_json(const Tensor& t, std::size_t axis, std::size_t offset, std::size_t stride) {
    nlohmann::json arr = nlohmann::json::array();
    const std::size_t n = t.dim(axis);
    if (axis + 1 == t.rank()) {
        for (std::size_t i = 0; i < n; ++i) arr.push_back(t[offset + i]);
        return arr;
    }
    const std::size_t inner = stride / n;
    for (std::size_t i = 0; i < n; ++i) arr.push_back(dims_to_json(t, axis + 1, offset + i * inner, inner));
    return arr;
}

void collect(const nlohmann::json& j, std::size_t depth, Shape& shape, std::vector<double>& out) {
    if (!j.is_array()) {
        if (!j.is_number()) throw FormatError("tensor entry is not a number");
        if (depth != shape.size()) throw FormatError("ragged tensor");
        out.push_back(j.get<double>());
        return;
    }
    if (depth == shape.size()) {
        if (!out.empty()) throw FormatError("ragged tensor");
        shape.push_back(j.size());
    } else if (shape[depth] != j.size()) {
        throw FormatError("ragged tensor");
    }
    if (j.empty()) throw FormatError("empty tensor axis");
    for (const auto& e : j) collect(e, depth + 1, shape, out);
}

}  // namespace

nlohmann::json tensor_to_json(const Tensor& t) {
    if (t.rank() == 0) return t.size() ? nlohmann::json(t[0]) : nlohmann::json::array();
    return dims_to_json(t, 0, 0, t.size());
}

Tensor tensor_from_json(const nlohmann::json& j) {
    Shape shape;
    std::vector<double> data;
    collect(j, 0, shape, data);
    if (shape.size() > 3) throw FormatError("tensor rank above 3");
    return Tensor(std::move(shape), std::move(data));
}

nlohmann::json checkpoint_to_json(const Checkpoint& c) {
    nlohmann::json j;
    j["format_version"] = c.format_version;
    j["config"] = run_config_to_json(c.config, false);
    j["vocabulary"] = {{"tokens", c.vocab.tokens()}};
    j["embedding"] = tensor_to_json(c.table.matrix);
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [name, t] : c.params.named()) params[name] = tensor_to_json(*t);
    j["params"] = std::move(params);
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& r : c.history) {
        hist.push_back({{"epoch", r.epoch},
                        {"train_loss", r.train_loss},
                        {"train_acc", r.train_acc},
                        {"val_loss", r.val_loss},
                        {"val_acc", r.val_acc}});
    }
    j["history"] = std::move(hist);
    return j;
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw FormatError("checkpoint is not a JSON object");
    if (!j.contains("format_version")) throw FormatError("checkpoint has no format_version");
    const auto& ver = j["format_version"];
    if (!ver.is_number_integer() || ver.get<long long>() != kCheckpointVersion) {
        throw VersionError("unsupported checkpoint format_version " + ver.dump() + " (supported: " +
                           std::to_string(kCheckpointVersion) + ")");
    }
    Checkpoint c;
    try {
        c.config = run_config_from_json(j.at("config"));
        c.config.validate();
        c.vocab = Vocabulary::from_tokens(j.at("vocabulary").at("tokens").get<std::vector<std::string>>());
        c.table.matrix = tensor_from_json(j.at("embedding"));
        if (c.table.matrix.rank() != 2 || c.table.vocab_size() != c.vocab.size() ||
            c.table.dim() != c.config.model.embed_dim) {
            throw FormatError("embedding table shape " + shape_to_string(c.table.matrix.shape()) +
                              " does not match vocabulary and config");
        }
        const auto& pj = j.at("params");
        if (!pj.is_object()) throw FormatError("params is not an object");
        c.params = init_params(c.config.model, 0);
        auto named = c.params.named();
        if (pj.size() != named.size()) throw FormatError("checkpoint parameter set does not match the variant");
        for (auto& [name, t] : named) {
            if (!pj.contains(name)) throw FormatError("checkpoint is missing parameter '" + name + "'");
            Tensor loaded = tensor_from_json(pj.at(name));
            if (loaded.shape() != t->shape()) {
                throw FormatError("parameter '" + name + "' has shape " + shape_to_string(loaded.shape()) +
                                  ", expected " + shape_to_string(t->shape()));
            }
            *t = std::move(loaded);
        }
        for (const auto& r : j.at("history")) {
            c.history.push_back({r.at("epoch").get<std::size_t>(), r.at("train_loss").get<double>(),
                                 r.at("train_acc").get<double>(), r.at("val_loss").get<double>(),
                                 r.at("val_acc").get<double>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed checkpoint: ") + e.what());
    } catch (const ConfigError& e) {
        throw FormatError(std::string("checkpoint config: ") + e.what());
    }
    return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
    write_file_atomic(path, checkpoint_to_json(c).dump() + "\n");
}

Checkpoint parse_checkpoint(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError::at_byte(e.byte > 0 ? e.byte - 1 : 0, "checkpoint is not valid JSON");
    }
    return checkpoint_from_json(j);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    return parse_checkpoint(read_file(path));
}

}  // namespace hybridclf
