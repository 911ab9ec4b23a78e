#include "triggerlab/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "triggerlab/errors.hpp"

namespace triggerlab {

namespace {
constexpr double kProbFloor = 1e-12;
}

int class_index(Polarity p) {
    switch (p) {
        case Polarity::Negative: return 0;
        case Polarity::Positive: return 1;
        default: throw std::domain_error("neutral examples have no class index");
    }
}

ClassifierParams ClassifierParams::init(size_t vocab, size_t dim, size_t hidden, uint64_t seed) {
    if (vocab == 0 || dim == 0 || hidden == 0) {
        throw ConfigError("classifier shapes must be positive");
    }
    ClassifierParams p;
    p.vocab = vocab;
    p.dim = dim;
    p.hidden = hidden;
    p.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.1, 0.1);
    auto fill = [&](std::vector<double>& v, size_t n) {
        v.resize(n);
        for (double& x : v) x = dist(rng);
    };
    fill(p.embedding, vocab * dim);
    fill(p.w1, dim * hidden);
    fill(p.b1, hidden);
    fill(p.w2, hidden * 2);
    fill(p.b2, 2);
    return p;
}

namespace {

void softmax2(const double* logits, double* probs) {
    double m = std::max(logits[0], logits[1]);
    double e0 = std::exp(logits[0] - m);
    double e1 = std::exp(logits[1] - m);
    double z = e0 + e1;
    probs[0] = e0 / z;
    probs[1] = e1 / z;
}

ForwardTrace finish_forward(const ClassifierParams& params, std::vector<uint32_t> ids,
                            std::vector<double> pooled) {
    ForwardTrace t;
    t.ids = std::move(ids);
    t.pooled = std::move(pooled);
    t.pre.assign(params.hidden, 0.0);
    t.act.assign(params.hidden, 0.0);
    for (size_t m = 0; m < params.hidden; ++m) {
        double s = params.b1[m];
        for (size_t j = 0; j < params.dim; ++j) {
            s += t.pooled[j] * params.w1[j * params.hidden + m];
        }
        t.pre[m] = s;
        t.act[m] = std::tanh(s);
    }
    double logits[2] = {params.b2[0], params.b2[1]};
    for (size_t m = 0; m < params.hidden; ++m) {
        logits[0] += t.act[m] * params.w2[m * 2 + 0];
        logits[1] += t.act[m] * params.w2[m * 2 + 1];
    }
    t.probs.assign(2, 0.0);
    softmax2(logits, t.probs.data());
    return t;
}

}  // namespace

ForwardTrace forward(const ClassifierParams& params, std::span<const uint32_t> ids) {
    if (ids.empty()) throw std::domain_error("forward: empty token sequence");
    std::vector<uint32_t> sorted(ids.begin(), ids.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.back() >= params.vocab) throw std::domain_error("forward: token id out of range");

    std::vector<double> pooled(params.dim, 0.0);
    for (uint32_t id : sorted) {
        const double* row = params.embedding.data() + static_cast<size_t>(id) * params.dim;
        for (size_t j = 0; j < params.dim; ++j) pooled[j] += row[j];
    }
    double inv = 1.0 / static_cast<double>(ids.size());
    for (double& x : pooled) x *= inv;
    return finish_forward(params, std::vector<uint32_t>(ids.begin(), ids.end()), std::move(pooled));
}

ForwardTrace forward_from_embeddings(const ClassifierParams& params,
                                     const std::vector<std::vector<double>>& position_embeddings) {
    if (position_embeddings.empty()) throw std::domain_error("forward: empty token sequence");
    std::vector<double> pooled(params.dim, 0.0);
    for (const auto& e : position_embeddings) {
        if (e.size() != params.dim) throw std::domain_error("embedding size mismatch");
        for (size_t j = 0; j < params.dim; ++j) pooled[j] += e[j];
    }
    double inv = 1.0 / static_cast<double>(position_embeddings.size());
    for (double& x : pooled) x *= inv;
    return finish_forward(params, {}, std::move(pooled));
}

double loss(const ForwardTrace& trace, Polarity target) {
    int c = class_index(target);
    double p = std::max(trace.probs[static_cast<size_t>(c)], kProbFloor);
    return -std::log(p);
}

Gradients Gradients::zeros_like(const ClassifierParams& params) {
    Gradients g;
    g.embedding.assign(params.vocab * params.dim, 0.0);
    g.w1.assign(params.dim * params.hidden, 0.0);
    g.b1.assign(params.hidden, 0.0);
    g.w2.assign(params.hidden * 2, 0.0);
    g.b2.assign(2, 0.0);
    return g;
}

void Gradients::reset() {
    std::fill(embedding.begin(), embedding.end(), 0.0);
    std::fill(w1.begin(), w1.end(), 0.0);
    std::fill(b1.begin(), b1.end(), 0.0);
    std::fill(w2.begin(), w2.end(), 0.0);
    std::fill(b2.begin(), b2.end(), 0.0);
    input_positions.clear();
}

namespace {

// Core backprop shared by the two entry points. Writes parameter gradients
// into acc and returns dL/d(pooled vector).
std::vector<double> backprop_core(const ClassifierParams& params, const ForwardTrace& trace,
                                  Polarity target, Gradients& acc) {
    int c = class_index(target);
    // Inside the clamp region the loss is constant, so the gradient vanishes.
    double dlogits[2] = {0.0, 0.0};
    if (trace.probs[static_cast<size_t>(c)] >= kProbFloor) {
        dlogits[0] = trace.probs[0];
        dlogits[1] = trace.probs[1];
        dlogits[c] -= 1.0;
    }

    acc.b2[0] += dlogits[0];
    acc.b2[1] += dlogits[1];
    std::vector<double> dact(params.hidden, 0.0);
    for (size_t m = 0; m < params.hidden; ++m) {
        acc.w2[m * 2 + 0] += trace.act[m] * dlogits[0];
        acc.w2[m * 2 + 1] += trace.act[m] * dlogits[1];
        dact[m] = params.w2[m * 2 + 0] * dlogits[0] + params.w2[m * 2 + 1] * dlogits[1];
    }
    std::vector<double> dpre(params.hidden, 0.0);
    for (size_t m = 0; m < params.hidden; ++m) {
        dpre[m] = dact[m] * (1.0 - trace.act[m] * trace.act[m]);
        acc.b1[m] += dpre[m];
    }
    std::vector<double> dpooled(params.dim, 0.0);
    for (size_t j = 0; j < params.dim; ++j) {
        double s = 0.0;
        for (size_t m = 0; m < params.hidden; ++m) {
            acc.w1[j * params.hidden + m] += trace.pooled[j] * dpre[m];
            s += params.w1[j * params.hidden + m] * dpre[m];
        }
        dpooled[j] = s;
    }
    return dpooled;
}

void scatter_input_grads(const ClassifierParams& params, const ForwardTrace& trace,
                         const std::vector<double>& dpooled, Gradients& acc) {
    double inv = 1.0 / static_cast<double>(trace.ids.size());
    for (uint32_t id : trace.ids) {
        double* row = acc.embedding.data() + static_cast<size_t>(id) * params.dim;
        for (size_t j = 0; j < params.dim; ++j) row[j] += dpooled[j] * inv;
    }
}

}  // namespace

Gradients backward(const ClassifierParams& params, const ForwardTrace& trace, Polarity target) {
    if (trace.ids.empty()) throw std::domain_error("backward: trace has no input ids");
    Gradients g = Gradients::zeros_like(params);
    std::vector<double> dpooled = backprop_core(params, trace, target, g);
    scatter_input_grads(params, trace, dpooled, g);
    // Mean pooling: every position receives dpooled / N.
    double inv = 1.0 / static_cast<double>(trace.ids.size());
    std::vector<double> per_pos(params.dim);
    for (size_t j = 0; j < params.dim; ++j) per_pos[j] = dpooled[j] * inv;
    g.input_positions.assign(trace.ids.size(), per_pos);
    return g;
}

double accumulate_backward(const ClassifierParams& params, const ForwardTrace& trace,
                           Polarity target, Gradients& acc) {
    std::vector<double> dpooled = backprop_core(params, trace, target, acc);
    scatter_input_grads(params, trace, dpooled, acc);
    return loss(trace, target);
}

std::vector<double> train(ClassifierParams& params, const DatasetSplit& split,
                          const Vocabulary& vocab, const TrainConfig& cfg) {
    if (split.examples.empty()) throw EmptyDatasetError("train: empty split");
    if (cfg.epochs == 0 || cfg.batch_size == 0) throw ConfigError("train: epochs and batch_size must be positive");
    if (cfg.learning_rate < 0.0 || cfg.l2 < 0.0) throw ConfigError("train: negative rate");

    struct Encoded {
        std::vector<uint32_t> ids;
        Polarity label;
    };
    std::vector<Encoded> data;
    data.reserve(split.examples.size());
    for (const auto& ex : split.examples) {
        if (ex.polarity == Polarity::Neutral) {
            throw ConfigError("train: split must be binarized (found neutral example)");
        }
        data.push_back({encode(ex, vocab), ex.polarity});
    }

    std::mt19937_64 rng(cfg.seed);
    std::vector<size_t> order(data.size());
    std::iota(order.begin(), order.end(), size_t{0});

    Gradients acc = Gradients::zeros_like(params);
    std::vector<double> history;
    history.reserve(cfg.epochs);

    auto apply = [&](std::vector<double>& theta, const std::vector<double>& grad, double invb) {
        for (size_t i = 0; i < theta.size(); ++i) {
            theta[i] -= cfg.learning_rate * (grad[i] * invb + cfg.l2 * theta[i]);
        }
    };

    for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
            size_t end = std::min(order.size(), start + cfg.batch_size);
            acc.reset();
            double batch_loss = 0.0;
            for (size_t i = start; i < end; ++i) {
                const Encoded& ex = data[order[i]];
                ForwardTrace t = forward(params, ex.ids);
                batch_loss += accumulate_backward(params, t, ex.label, acc);
            }
            double invb = 1.0 / static_cast<double>(end - start);
            if (!std::isfinite(batch_loss)) {
                std::ostringstream msg;
                msg << "train: non-finite loss at epoch " << epoch << ", batch offset " << start
                    << " (lr=" << cfg.learning_rate << ")";
                throw std::runtime_error(msg.str());
            }
            apply(params.embedding, acc.embedding, invb);
            apply(params.w1, acc.w1, invb);
            apply(params.b1, acc.b1, invb);
            apply(params.w2, acc.w2, invb);
            apply(params.b2, acc.b2, invb);
            epoch_loss += batch_loss;
        }
        history.push_back(epoch_loss / static_cast<double>(order.size()));
    }
    return history;
}

namespace {

std::vector<uint32_t> with_trigger(const std::vector<uint32_t>& ids,
                                   const std::optional<std::vector<uint32_t>>& trigger,
                                   Placement placement) {
    if (!trigger || trigger->empty()) return ids;
    std::vector<uint32_t> out;
    out.reserve(ids.size() + trigger->size());
    if (placement == Placement::Prepend) {
        out.insert(out.end(), trigger->begin(), trigger->end());
        out.insert(out.end(), ids.begin(), ids.end());
    } else {
        out.insert(out.end(), ids.begin(), ids.end());
        out.insert(out.end(), trigger->begin(), trigger->end());
    }
    return out;
}

}  // namespace

double evaluate_accuracy(const ClassifierParams& params, const DatasetSplit& subset,
                         const Vocabulary& vocab,
                         const std::optional<std::vector<uint32_t>>& trigger,
                         Placement placement) {
    if (subset.examples.empty()) {
        throw EmptyDatasetError("evaluate_accuracy: empty subset has undefined accuracy");
    }
    Polarity label = subset.examples.front().polarity;
    int want = class_index(label);
    size_t correct = 0;
    for (const auto& ex : subset.examples) {
        if (ex.polarity != label) {
            throw ConfigError("evaluate_accuracy: subset must contain a single polarity");
        }
        std::vector<uint32_t> ids = with_trigger(encode(ex, vocab), trigger, placement);
        ForwardTrace t = forward(params, ids);
        int pred = t.probs[1] > t.probs[0] ? 1 : 0;
        if (pred == want) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(subset.examples.size());
}

double overall_accuracy(const ClassifierParams& params, const DatasetSplit& split,
                        const Vocabulary& vocab) {
    if (split.examples.empty()) throw EmptyDatasetError("overall_accuracy: empty split");
    size_t correct = 0;
    for (const auto& ex : split.examples) {
        int want = class_index(ex.polarity);
        ForwardTrace t = forward(params, encode(ex, vocab));
        int pred = t.probs[1] > t.probs[0] ? 1 : 0;
        if (pred == want) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(split.examples.size());
}

namespace {

constexpr char kMagic[4] = {'T', 'L', 'C', 'P'};
constexpr uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

void write_tensor(std::ostream& out, const std::vector<double>& v) {
    write_pod(out, static_cast<uint64_t>(v.size()));
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_tensor(std::istream& in, std::vector<double>& v) {
    uint64_t n = 0;
    read_pod(in, n);
    v.resize(n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
}

}  // namespace

void save_checkpoint(const ClassifierParams& params, const Vocabulary& vocab,
                     const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path.string());
    out.write(kMagic, 4);
    write_pod(out, kVersion);
    write_pod(out, params.seed);
    write_pod(out, static_cast<uint64_t>(params.vocab));
    write_pod(out, static_cast<uint64_t>(params.dim));
    write_pod(out, static_cast<uint64_t>(params.hidden));
    write_pod(out, static_cast<uint64_t>(vocab.size()));
    for (uint32_t i = 0; i < vocab.size(); ++i) {
        const std::string& tok = vocab.token(i);
        write_pod(out, static_cast<uint32_t>(tok.size()));
        out.write(tok.data(), static_cast<std::streamsize>(tok.size()));
    }
    write_tensor(out, params.embedding);
    write_tensor(out, params.w1);
    write_tensor(out, params.b1);
    write_tensor(out, params.w2);
    write_tensor(out, params.b2);
    write_pod(out, vocab.fingerprint());
    if (!out) throw std::runtime_error("short write: " + path.string());
}

std::pair<ClassifierParams, Vocabulary> load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifact(path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw ParseError("not a classifier checkpoint: " + path.string());
    }
    uint32_t version = 0;
    read_pod(in, version);
    if (version != kVersion) {
        throw ParseError("unsupported checkpoint version " + std::to_string(version));
    }
    ClassifierParams params;
    uint64_t v = 0, d = 0, h = 0, ntok = 0;
    read_pod(in, params.seed);
    read_pod(in, v);
    read_pod(in, d);
    read_pod(in, h);
    read_pod(in, ntok);
    params.vocab = v;
    params.dim = d;
    params.hidden = h;
    Vocabulary vocab;
    for (uint64_t i = 0; i < ntok; ++i) {
        uint32_t len = 0;
        read_pod(in, len);
        std::string tok(len, '\0');
        in.read(tok.data(), len);
        if (i >= 2) vocab.add(tok);  // ids 0 and 1 are the fixed specials
    }
    read_tensor(in, params.embedding);
    read_tensor(in, params.w1);
    read_tensor(in, params.b1);
    read_tensor(in, params.w2);
    read_tensor(in, params.b2);
    uint64_t fp = 0;
    read_pod(in, fp);
    if (!in) throw ParseError("truncated checkpoint: " + path.string());
    if (fp != vocab.fingerprint()) throw ParseError("checkpoint vocabulary corrupt");
    if (params.embedding.size() != params.vocab * params.dim || vocab.size() != params.vocab) {
        throw ParseError("checkpoint shape mismatch");
    }
    return {std::move(params), std::move(vocab)};
}

}  // namespace triggerlab
