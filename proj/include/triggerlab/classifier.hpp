#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "triggerlab/corpus.hpp"

namespace triggerlab {

// Binary sentiment head: class 0 = Negative, class 1 = Positive.
int class_index(Polarity p);

// Mean-of-embeddings -> tanh hidden layer -> 2-way softmax. All tensors are
// row-major flat doubles so gradients can be checked entry by entry.
struct ClassifierParams {
    size_t vocab = 0;   // V
    size_t dim = 0;     // d
    size_t hidden = 0;  // h
    uint64_t seed = 0;

    std::vector<double> embedding;  // V x d
    std::vector<double> w1;         // d x h
    std::vector<double> b1;         // h
    std::vector<double> w2;         // h x 2
    std::vector<double> b2;         // 2

    static ClassifierParams init(size_t vocab, size_t dim, size_t hidden, uint64_t seed);

    std::span<const double> embedding_row(uint32_t id) const {
        return {embedding.data() + static_cast<size_t>(id) * dim, dim};
    }
};

struct ForwardTrace {
    std::vector<uint32_t> ids;     // input order as given
    std::vector<double> pooled;    // d
    std::vector<double> pre;       // h, pre-activation
    std::vector<double> act;       // h, tanh output
    std::vector<double> probs;     // 2, softmax
};

// Embeddings are summed in ascending-id order, so the result is exactly
// invariant under permutation of the input.
ForwardTrace forward(const ClassifierParams& params, std::span<const uint32_t> ids);

// Forward pass from explicit per-position embedding vectors, summed in the
// given order. Used by the gradient checks, which perturb one position.
ForwardTrace forward_from_embeddings(const ClassifierParams& params,
                                     const std::vector<std::vector<double>>& position_embeddings);

// Cross-entropy of the target class; probabilities are clamped at 1e-12.
double loss(const ForwardTrace& trace, Polarity target);

struct Gradients {
    std::vector<double> embedding;  // V x d, scatter-accumulated
    std::vector<double> w1, b1, w2, b2;
    std::vector<std::vector<double>> input_positions;  // dL/d(embedding at position i)

    static Gradients zeros_like(const ClassifierParams& params);
    void reset();
};

// Gradient of loss(trace, target) for every parameter tensor and every input
// position's embedding vector.
Gradients backward(const ClassifierParams& params, const ForwardTrace& trace, Polarity target);

// Accumulation variant used by the training loop; skips per-position storage.
// Returns the example loss.
double accumulate_backward(const ClassifierParams& params, const ForwardTrace& trace,
                           Polarity target, Gradients& acc);

struct TrainConfig {
    double learning_rate = 0.25;
    size_t epochs = 30;
    size_t batch_size = 32;
    uint64_t seed = 0;
    double l2 = 0.0;
};

// Mini-batch SGD over a binarized split (no Neutral examples). Deterministic
// given the seed. Returns the per-epoch mean loss history.
std::vector<double> train(ClassifierParams& params, const DatasetSplit& split,
                          const Vocabulary& vocab, const TrainConfig& cfg);

enum class Placement { Prepend, Append };

// Subset accuracy TP / (TP + FN) over a single-polarity subset, optionally
// with a trigger id sequence concatenated to every example.
double evaluate_accuracy(const ClassifierParams& params, const DatasetSplit& subset,
                         const Vocabulary& vocab,
                         const std::optional<std::vector<uint32_t>>& trigger,
                         Placement placement = Placement::Prepend);

// Plain classification accuracy over a mixed Positive/Negative split.
double overall_accuracy(const ClassifierParams& params, const DatasetSplit& split,
                        const Vocabulary& vocab);

// Versioned binary checkpoint: shapes, seed, vocabulary and all tensors.
// Round-trips bit-exactly.
void save_checkpoint(const ClassifierParams& params, const Vocabulary& vocab,
                     const std::filesystem::path& path);
std::pair<ClassifierParams, Vocabulary> load_checkpoint(const std::filesystem::path& path);

}  // namespace triggerlab
