#pragma once

#include "hybridclf/crossval.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hybridclf {

/// Flat run configuration. The JSON form uses the field names below as keys;
/// unknown keys are rejected.
struct RunConfig {
    // preprocessing
    std::size_t min_token_len = 2;
    bool emit_bigrams = true;
    bool strip_markup = true;
    std::optional<std::vector<std::string>> stop_words;  ///< absent: embedded list
    // vocabulary
    std::size_t vocab_size = 5000;
    // model and training
    ModelConfig model;
    TrainConfig train;
    // corpus layout
    std::string text_column = "htmlContent";
    std::string label_column = "isPhish";
    std::size_t length_bucket = 1000;
    std::size_t jobs = 1;
    // paths
    std::optional<std::string> corpus, embeddings, checkpoint, out_dir;

    PreprocessConfig preprocess_config() const;
    ExperimentConfig experiment() const;

    /// Numeric invariants of every module.
    void validate() const;
};

/// Applies the keys of `j` on top of `base`.
RunConfig merge_run_config(RunConfig base, const nlohmann::json& j);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// `with_paths` false drops the path fields (used inside checkpoints).
nlohmann::json run_config_to_json(const RunConfig& c, bool with_paths = true);

}  // namespace hybridclf
