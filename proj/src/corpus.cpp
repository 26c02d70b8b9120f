#include "hybridclf/corpus.hpp"

#include "hybridclf/errors.hpp"
#include "hybridclf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hybridclf {

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] != fold) out.push_back(i);
    return out;
}

std::vector<CsvRecord> parse_csv(std::string_view text) {
    std::vector<CsvRecord> records;
    std::size_t line = 1;
    std::size_t i = 0;
    const std::size_t n = text.size();

    // Skip a UTF-8 byte order mark.
    if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;

    while (i < n) {
        CsvRecord rec;
        rec.line = line;
        std::string field;
        bool in_quotes = false;
        bool record_done = false;
        while (i < n && !record_done) {
            const char c = text[i];
            if (in_quotes) {
                if (c == '"') {
                    if (i + 1 < n && text[i + 1] == '"') {
                        field += '"';
                        i += 2;
                    } else {
                        in_quotes = false;
                        ++i;
                    }
                } else {
                    if (c == '\n') ++line;
                    field += c;
                    ++i;
                }
                continue;
            }
            switch (c) {
                case '"':
                    in_quotes = true;
                    ++i;
                    break;
                case ',':
                    rec.fields.push_back(std::move(field));
                    field.clear();
                    ++i;
                    break;
                case '\r':
                    ++i;
                    if (i < n && text[i] == '\n') ++i;
                    ++line;
                    record_done = true;
                    break;
                case '\n':
                    ++i;
                    ++line;
                    record_done = true;
                    break;
                default:
                    field += c;
                    ++i;
            }
        }
        if (in_quotes) throw RowError(rec.line, "unterminated quoted field");
        rec.fields.push_back(std::move(field));
        // A blank physical line is not a record.
        if (rec.fields.size() == 1 && rec.fields[0].empty()) continue;
        records.push_back(std::move(rec));
    }
    return records;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::size_t column_index(const CsvRecord& header, std::string_view name) {
    for (std::size_t i = 0; i < header.fields.size(); ++i)
        if (trim(header.fields[i]) == name) return i;
    throw ConfigError("column '" + std::string(name) + "' not found in CSV header");
}

}  // namespace

std::vector<Document> parse_corpus(std::string_view csv_text, std::string_view text_column,
                                   std::string_view label_column) {
    const std::vector<CsvRecord> records = parse_csv(csv_text);
    if (records.empty()) throw EmptyCorpusError("corpus file is empty");
    const std::size_t text_idx = column_index(records.front(), text_column);
    const std::size_t label_idx = column_index(records.front(), label_column);
    if (records.size() == 1) throw EmptyCorpusError("corpus has a header but no data rows");

    std::vector<Document> docs;
    docs.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) {
        const CsvRecord& rec = records[r];
        if (rec.fields.size() != records.front().fields.size()) {
            throw RowError(rec.line, "expected " + std::to_string(records.front().fields.size()) +
                                         " fields, found " + std::to_string(rec.fields.size()));
        }
        const std::string_view label = trim(rec.fields[label_idx]);
        Document d;
        d.id = r - 1;
        if (label == "0") {
            d.label = 0;
        } else if (label == "1") {
            d.label = 1;
        } else {
            throw RowError(rec.line, "label '" + std::string(label) + "' is not 0 or 1");
        }
        d.text = rec.fields[text_idx];
        docs.push_back(std::move(d));
    }
    return docs;
}

std::vector<Document> load_corpus(const std::filesystem::path& path, std::string_view text_column,
                                  std::string_view label_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open corpus file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_corpus(buf.str(), text_column, label_column);
}

std::size_t char_length(std::string_view text) {
    std::size_t n = 0;
    for (unsigned char c : text)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

CorpusStats compute_stats(const std::vector<Document>& corpus, std::size_t bucket_width) {
    if (bucket_width == 0) throw ConfigError("bucket_width must be positive");
    CorpusStats stats;
    std::map<std::size_t, std::size_t> buckets;
    for (const Document& d : corpus) {
        ++stats.total;
        ++stats.per_class[d.label];
        ++buckets[char_length(d.text) / bucket_width * bucket_width];
    }
    stats.length_histogram.assign(buckets.begin(), buckets.end());
    return stats;
}

nlohmann::json stats_to_json(const CorpusStats& stats) {
    nlohmann::json per_class = nlohmann::json::object();
    for (const auto& [label, count] : stats.per_class) per_class[std::to_string(label)] = count;
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& [lo, count] : stats.length_histogram) hist.push_back({lo, count});
    return {{"total", stats.total}, {"per_class", per_class}, {"length_histogram", hist}};
}

FoldPlan plan_folds(const std::vector<Document>& corpus, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("fold count k must be at least 2");
    FoldPlan plan;
    plan.k = k;
    plan.assignments.assign(corpus.size(), 0);

    std::size_t dealt = 0;
    for (int label : {0, 1}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < corpus.size(); ++i)
            if (corpus[i].label == label) members.push_back(i);
        if (members.size() < k) {
            throw StratificationError("class " + std::to_string(label) + " has " +
                                      std::to_string(members.size()) + " documents, fewer than k = " +
                                      std::to_string(k));
        }
        Rng rng(derive_seed(seed, "folds/class" + std::to_string(label)));
        rng.shuffle(std::span<std::size_t>(members));
        for (std::size_t idx : members) plan.assignments[idx] = dealt++ % k;
    }
    return plan;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_holdout(
    const std::vector<int>& labels, double fraction, std::uint64_t seed) {
    if (fraction < 0.0 || fraction >= 1.0) throw ConfigError("holdout fraction must be in [0, 1)");
    std::vector<std::size_t> kept, holdout;
    for (int label : {0, 1}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) members.push_back(i);
        Rng rng(derive_seed(seed, "holdout/class" + std::to_string(label)));
        rng.shuffle(std::span<std::size_t>(members));
        auto n_out = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(members.size())));
        if (n_out >= members.size() && !members.empty()) n_out = members.size() - 1;
        for (std::size_t j = 0; j < members.size(); ++j)
            (j < n_out ? holdout : kept).push_back(members[j]);
    }
    std::sort(kept.begin(), kept.end());
    std::sort(holdout.begin(), holdout.end());
    return {kept, holdout};
}

}  // namespace hybridclf
