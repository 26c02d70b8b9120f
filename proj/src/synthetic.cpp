#include "hybridclf/synthetic.hpp"

#include "hybridclf/rng.hpp"

namespace hybridclf {

const std::vector<std::string_view>& synthetic_phish_words() {
    static const std::vector<std::string_view> words{
        "verify", "account", "password", "login", "urgent", "secure", "bank", "confirm",
        "credential", "billing", "wallet", "prize", "winner", "claim", "invoice", "unlock",
        "alert", "restore", "payment", "identity", "suspend", "refund", "token", "signin"};
    return words;
}

const std::vector<std::string_view>& synthetic_legit_words() {
    static const std::vector<std::string_view> words{
        "recipe", "garden", "museum", "library", "weather", "football", "concert", "travel",
        "science", "poetry", "camera", "bicycle", "kitchen", "forest", "river", "mountain",
        "guitar", "painting", "theater", "festival", "novel", "harbor", "orchard", "picnic"};
    return words;
}

std::vector<Document> synthetic_corpus(std::size_t per_class, std::uint64_t seed) {
    Rng rng(derive_seed(seed, "synthetic"));
    std::vector<Document> out;
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const int label = static_cast<int>(i % 2 == 0);
        const auto& words = label == 1 ? synthetic_phish_words() : synthetic_legit_words();
        const std::size_t n = 12 + static_cast<std::size_t>(rng.below(17));
        std::string text = "<html><body><p>";
        for (std::size_t w = 0; w < n; ++w) {
            if (w) text += ' ';
            text += words[static_cast<std::size_t>(rng.below(words.size()))];
            if (w % 7 == 6) text += ".</p><p>";
        }
        text += "</p></body></html>";
        out.push_back({i, std::move(text), label});
    }
    return out;
}

std::string corpus_to_csv(const std::vector<Document>& corpus) {
    std::string out = "htmlContent,isPhish\n";
    for (const Document& d : corpus) {
        out += '"';
        for (char c : d.text) {
            if (c == '"') out += '"';
            out += c;
        }
        out += "\",";
        out += std::to_string(d.label);
        out += '\n';
    }
    return out;
}

}  // namespace hybridclf
