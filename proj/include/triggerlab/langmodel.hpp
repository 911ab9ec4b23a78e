#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <unordered_map>
#include <vector>

#include "triggerlab/corpus.hpp"

namespace triggerlab {

// Additive-k smoothed n-gram model with interpolated backoff. The order-n
// estimate is   (c(h,w) + D * P_{n-1}(w | tail(h))) / (c(h) + D),  D = k * E,
// where E counts the event space (every vocabulary id plus EOS). The weight
// on the observed counts therefore grows with the context count, and the
// unigram base case is plain additive-k smoothing.
class NGramLM {
public:
    NGramLM() = default;
    NGramLM(int order, double k, size_t vocab_size);

    int order() const { return order_; }
    double k() const { return k_; }
    size_t vocab_size() const { return vocab_size_; }
    uint64_t vocab_fingerprint = 0;

    uint32_t bos_id() const { return static_cast<uint32_t>(vocab_size_); }
    uint32_t eos_id() const { return static_cast<uint32_t>(vocab_size_) + 1; }
    size_t event_count() const { return vocab_size_ + 1; }  // vocabulary + EOS

    void observe_sequence(std::span<const uint32_t> ids);

    // P(word | context), context given oldest-first with length order-1
    // (shorter contexts are queried at the matching lower order).
    double prob(uint32_t word, std::span<const uint32_t> context) const;

    // Sum of conditional log probabilities in nats, EOS transition included.
    double log_prob(std::span<const uint32_t> ids) const;

    // exp(-log_prob / N) with N = len + 1 (the EOS event is counted).
    double perplexity(std::span<const uint32_t> ids) const;

    void save(const std::filesystem::path& path) const;
    static NGramLM load(const std::filesystem::path& path);

private:
    friend NGramLM train_lm(std::span<const DatasetSplit>, const Vocabulary&, int, double);

    uint64_t pack(std::span<const uint32_t> ids) const;
    double prob_order(uint32_t word, std::span<const uint32_t> context, int n) const;

    int order_ = 0;
    double k_ = 0.0;
    size_t vocab_size_ = 0;
    uint64_t total_events_ = 0;
    int id_bits_ = 0;
    // grams_[n-1]: packed n-gram -> count; ctx_[n-1]: packed (n-1)-gram ->
    // continuation count (ctx_[0] is unused; the unigram context is empty).
    std::vector<std::unordered_map<uint64_t, uint64_t>> grams_;
    std::vector<std::unordered_map<uint64_t, uint64_t>> ctx_;
};

// Counts are collected over every example's ids padded with order-1 BOS
// markers and one EOS. OOV tokens are encoded as UNK by the vocabulary.
NGramLM train_lm(std::span<const DatasetSplit> corpus, const Vocabulary& vocab, int order,
                 double k);

// Convenience wrappers operating on surface tokens.
double log_prob(const NGramLM& lm, std::span<const std::string> tokens, const Vocabulary& vocab);
double perplexity(const NGramLM& lm, std::span<const std::string> tokens, const Vocabulary& vocab);

}  // namespace triggerlab
