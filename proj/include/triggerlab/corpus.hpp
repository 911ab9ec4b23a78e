#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace triggerlab {

// Ordered so that comparisons follow sentiment: Negative < Neutral < Positive.
enum class Polarity { Negative = 0, Neutral = 1, Positive = 2 };

const char* to_string(Polarity p);

struct Example {
    std::vector<std::string> tokens;
    double label_prob = 0.5;
    Polarity polarity = Polarity::Neutral;
};

enum class SplitName { Train, Dev, Test };

struct DatasetSplit {
    std::vector<Example> examples;
    SplitName name = SplitName::Train;

    size_t size() const { return examples.size(); }
};

// Sentiment probability -> coarse label. The (0.4, 0.6] band is Neutral and is
// excluded from binary classification downstream.
Polarity binarize(double label_prob);

// Reads a two-column TSV: "<label_prob>\t<space-separated tokens>". Tokens are
// lowercased; the file must be non-empty and every line well formed.
DatasetSplit load_tsv(const std::filesystem::path& path, SplitName name = SplitName::Train);

class Vocabulary {
public:
    static constexpr uint32_t kUnkId = 0;
    static constexpr uint32_t kPadId = 1;
    static constexpr const char* kUnkToken = "<unk>";
    static constexpr const char* kPadToken = "<pad>";

    Vocabulary();

    // Regular tokens get ids starting at 2; insertion order defines the id.
    uint32_t add(const std::string& token);

    uint32_t id(const std::string& token) const;  // kUnkId when absent
    bool contains(const std::string& token) const;
    const std::string& token(uint32_t id) const;
    size_t size() const { return tokens_.size(); }

    // Stable hash over the ordered token list; used to detect checkpoint
    // mismatches between model and language-model artifacts.
    uint64_t fingerprint() const;

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, uint32_t> ids_;
};

// All tokens with corpus frequency >= min_freq, ids assigned by descending
// frequency with lexicographic tie-break. Deterministic across runs.
Vocabulary build_vocab(std::span<const DatasetSplit> splits, size_t min_freq);

// Unknown tokens map to kUnkId; an empty token list is passed through with a
// warning on stderr.
std::vector<uint32_t> encode(const Example& ex, const Vocabulary& vocab);
std::vector<uint32_t> encode_tokens(std::span<const std::string> tokens, const Vocabulary& vocab);
std::vector<std::string> decode(std::span<const uint32_t> ids, const Vocabulary& vocab);

DatasetSplit subset_by_polarity(const DatasetSplit& split, Polarity p);

// Positive + Negative examples only, order preserved.
DatasetSplit drop_neutral(const DatasetSplit& split);

using StopwordSet = std::unordered_set<std::string>;

StopwordSet load_stopwords(const std::filesystem::path& path);

// The k most frequent non-stopword tokens among examples of polarity p,
// most-frequent first, ties broken lexicographically. When fewer than k
// distinct tokens exist, all are returned and *truncated is set.
std::vector<std::string> top_frequent_words(const DatasetSplit& split, Polarity p, size_t k,
                                            const StopwordSet& stopwords,
                                            bool* truncated = nullptr);

}  // namespace triggerlab
