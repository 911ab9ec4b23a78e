#include "triggerlab/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>

#include "triggerlab/errors.hpp"
#include "triggerlab/rng.hpp"

namespace triggerlab {

const char* to_string(Polarity p) {
    switch (p) {
        case Polarity::Negative: return "negative";
        case Polarity::Neutral: return "neutral";
        case Polarity::Positive: return "positive";
    }
    return "?";
}

Polarity binarize(double label_prob) {
    if (!(label_prob >= 0.0 && label_prob <= 1.0)) {
        throw std::domain_error("label probability out of [0,1]: " + std::to_string(label_prob));
    }
    if (label_prob <= 0.4) return Polarity::Negative;
    if (label_prob > 0.6) return Polarity::Positive;
    return Polarity::Neutral;
}

namespace {

std::string lowercase(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::vector<std::string> split_tokens(const std::string& text) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && text[i] == ' ') ++i;
        size_t j = i;
        while (j < text.size() && text[j] != ' ') ++j;
        if (j > i) out.push_back(lowercase(text.substr(i, j - i)));
        i = j;
    }
    return out;
}

}  // namespace

DatasetSplit load_tsv(const std::filesystem::path& path, SplitName name) {
    std::ifstream in(path);
    if (!in) throw MissingArtifact(path.string());

    DatasetSplit split;
    split.name = name;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ParseError("expected '<label>\\t<tokens>'", lineno);
        }
        double label = 0.0;
        const char* first = line.data();
        const char* last = line.data() + tab;
        auto [ptr, ec] = std::from_chars(first, last, label);
        if (ec != std::errc() || ptr != last) {
            throw ParseError("bad label field '" + line.substr(0, tab) + "'", lineno);
        }
        if (!(label >= 0.0 && label <= 1.0) || !std::isfinite(label)) {
            throw ParseError("label out of [0,1]", lineno);
        }
        Example ex;
        ex.tokens = split_tokens(line.substr(tab + 1));
        if (ex.tokens.empty()) {
            throw ParseError("empty token sequence", lineno);
        }
        ex.label_prob = label;
        ex.polarity = binarize(label);
        split.examples.push_back(std::move(ex));
    }
    if (split.examples.empty()) {
        throw EmptyDatasetError("no examples in " + path.string());
    }
    return split;
}

Vocabulary::Vocabulary() {
    tokens_ = {kUnkToken, kPadToken};
    ids_ = {{kUnkToken, kUnkId}, {kPadToken, kPadId}};
}

uint32_t Vocabulary::add(const std::string& token) {
    auto it = ids_.find(token);
    if (it != ids_.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(tokens_.size());
    tokens_.push_back(token);
    ids_.emplace(token, id);
    return id;
}

uint32_t Vocabulary::id(const std::string& token) const {
    auto it = ids_.find(token);
    return it == ids_.end() ? kUnkId : it->second;
}

bool Vocabulary::contains(const std::string& token) const { return ids_.count(token) > 0; }

const std::string& Vocabulary::token(uint32_t id) const {
    if (id >= tokens_.size()) throw std::domain_error("token id out of range");
    return tokens_[id];
}

uint64_t Vocabulary::fingerprint() const {
    uint64_t h = kFnvOffset;
    for (const auto& t : tokens_) {
        h = fnv1a64(t, h);
        h = fnv1a64(std::string_view("\x1f", 1), h);
    }
    return h;
}

Vocabulary build_vocab(std::span<const DatasetSplit> splits, size_t min_freq) {
    if (min_freq < 1) throw ConfigError("min_freq must be >= 1");
    std::unordered_map<std::string, size_t> freq;
    size_t total_examples = 0;
    for (const auto& split : splits) {
        total_examples += split.examples.size();
        for (const auto& ex : split.examples) {
            for (const auto& tok : ex.tokens) ++freq[tok];
        }
    }
    if (total_examples == 0) throw EmptyDatasetError("cannot build vocabulary from empty corpus");

    std::vector<std::pair<std::string, size_t>> entries(freq.begin(), freq.end());
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary vocab;
    for (const auto& [token, count] : entries) {
        if (count >= min_freq) vocab.add(token);
    }
    return vocab;
}

std::vector<uint32_t> encode_tokens(std::span<const std::string> tokens, const Vocabulary& vocab) {
    if (tokens.empty()) {
        std::cerr << "warning: encoding empty token sequence\n";
        return {};
    }
    std::vector<uint32_t> ids;
    ids.reserve(tokens.size());
    for (const auto& tok : tokens) ids.push_back(vocab.id(tok));
    return ids;
}

std::vector<uint32_t> encode(const Example& ex, const Vocabulary& vocab) {
    return encode_tokens(ex.tokens, vocab);
}

std::vector<std::string> decode(std::span<const uint32_t> ids, const Vocabulary& vocab) {
    std::vector<std::string> tokens;
    tokens.reserve(ids.size());
    for (uint32_t id : ids) tokens.push_back(vocab.token(id));
    return tokens;
}

DatasetSplit subset_by_polarity(const DatasetSplit& split, Polarity p) {
    DatasetSplit out;
    out.name = split.name;
    for (const auto& ex : split.examples) {
        if (ex.polarity == p) out.examples.push_back(ex);
    }
    return out;
}

DatasetSplit drop_neutral(const DatasetSplit& split) {
    DatasetSplit out;
    out.name = split.name;
    for (const auto& ex : split.examples) {
        if (ex.polarity != Polarity::Neutral) out.examples.push_back(ex);
    }
    return out;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifact(path.string());
    StopwordSet set;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) set.insert(lowercase(line));
    }
    return set;
}

std::vector<std::string> top_frequent_words(const DatasetSplit& split, Polarity p, size_t k,
                                            const StopwordSet& stopwords, bool* truncated) {
    if (k == 0) throw ConfigError("k must be positive");
    std::unordered_map<std::string, size_t> freq;
    for (const auto& ex : split.examples) {
        if (ex.polarity != p) continue;
        for (const auto& tok : ex.tokens) {
            if (!stopwords.count(tok)) ++freq[tok];
        }
    }
    std::vector<std::pair<std::string, size_t>> entries(freq.begin(), freq.end());
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (truncated) *truncated = entries.size() < k;
    if (entries.size() < k) {
        std::cerr << "warning: only " << entries.size() << " distinct tokens available, asked for "
                  << k << "\n";
    }
    std::vector<std::string> out;
    for (size_t i = 0; i < entries.size() && i < k; ++i) out.push_back(entries[i].first);
    return out;
}

}  // namespace triggerlab
