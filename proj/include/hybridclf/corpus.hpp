#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace hybridclf {

/// One labeled web page. label: 0 = legitimate, 1 = deceptive.
struct Document {
    std::size_t id = 0;
    std::string text;
    int label = 0;
};

struct CorpusStats {
    std::size_t total = 0;
    std::map<int, std::size_t> per_class{{0, 0}, {1, 0}};
    /// (bucket lower bound in characters, count), ascending, non-empty buckets only.
    std::vector<std::pair<std::size_t, std::size_t>> length_histogram;
};

struct FoldPlan {
    std::size_t k = 0;
    /// Fold index per document, parallel to the corpus passed to plan_folds.
    std::vector<std::size_t> assignments;

    std::vector<std::size_t> test_indices(std::size_t fold) const;
    std::vector<std::size_t> train_indices(std::size_t fold) const;
};

/// Parses RFC 4180 style CSV text: comma separated, optional double-quote
/// quoting with "" as an escaped quote, CRLF or LF line ends. Each record
/// carries the 1-based line number it starts on.
struct CsvRecord {
    std::size_t line = 0;
    std::vector<std::string> fields;
};
std::vector<CsvRecord> parse_csv(std::string_view text);

/// Loads labeled documents from a CSV file with a header row. Document ids
/// are the 0-based data-row index.
std::vector<Document> load_corpus(const std::filesystem::path& path,
                                  std::string_view text_column = "htmlContent",
                                  std::string_view label_column = "isPhish");

/// Same as load_corpus but over in-memory CSV text.
std::vector<Document> parse_corpus(std::string_view csv_text, std::string_view text_column,
                                   std::string_view label_column);

/// Number of UTF-8 code points in `text` (continuation bytes are not counted).
std::size_t char_length(std::string_view text);

CorpusStats compute_stats(const std::vector<Document>& corpus, std::size_t bucket_width);

nlohmann::json stats_to_json(const CorpusStats& stats);

/// Stratified assignment: within each class (class 0 first), document indices
/// in corpus order are shuffled with Rng(derive_seed(seed, "folds/class<c>"))
/// and dealt round-robin; the dealing position carries over from class 0 to
/// class 1 so overall fold sizes also differ by at most one.
FoldPlan plan_folds(const std::vector<Document>& corpus, std::size_t k, std::uint64_t seed);

/// Stratified holdout used for validation curves: per class, the first
/// round(fraction * n_c) documents of a seeded shuffle go to the holdout,
/// always leaving at least one member of each present class behind.
/// Returns (kept indices, holdout indices) as positions into `labels`.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_holdout(
    const std::vector<int>& labels, double fraction, std::uint64_t seed);

}  // namespace hybridclf
