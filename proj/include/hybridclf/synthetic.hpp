#pragma once

#include "hybridclf/corpus.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hybridclf {

/// Word lists of the two synthetic classes; no word appears in both.
const std::vector<std::string_view>& synthetic_phish_words();
const std::vector<std::string_view>& synthetic_legit_words();

/// Seeded separable corpus: `per_class` pages of each label, alternating
/// labels by id, each a small HTML page of 12 to 28 words drawn from its
/// class list.
std::vector<Document> synthetic_corpus(std::size_t per_class, std::uint64_t seed);

/// CSV with header "htmlContent,isPhish".
std::string corpus_to_csv(const std::vector<Document>& corpus);

}  // namespace hybridclf
