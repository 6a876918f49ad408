#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nudgekit/embedding.hpp"
#include "nudgekit/errors.hpp"
#include "nudgekit/ioutil.hpp"
#include "nudgekit/rng.hpp"
#include "nudgekit/vecmath.hpp"

namespace nudgekit {

enum class BackendKind { remote, mock, cached };
enum class MockMode { hash, tag_aware };

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds backoff{500};
};

struct ProviderConfig {
    BackendKind kind = BackendKind::mock;
    std::string endpoint;  // e.g. "http://api.example.com/v1/embeddings"
    std::string model = "mock-tag-aware";
    std::string api_key_env;  // env var *name*; keys never live in config
    double timeout_seconds = 30.0;
    std::size_t batch_size = 16;
    RetryPolicy retry;
    std::size_t dimension = kDefaultDimension;
    MockMode mock_mode = MockMode::tag_aware;
    std::uint64_t mock_seed = 42;
    BackendKind cached_backend = BackendKind::remote;  // inner, when cached
    std::string cache_path;

    void validate() const {
        if (batch_size < 1) {
            throw ConfigError("provider: batch size must be >= 1");
        }
        if (timeout_seconds <= 0.0) {
            throw ConfigError("provider: timeout must be positive");
        }
        if (dimension < 1) {
            throw ConfigError("provider: dimension must be >= 1");
        }
        if (kind == BackendKind::cached && cached_backend == BackendKind::cached) {
            throw ConfigError("provider: cached backend cannot wrap itself");
        }
    }
};

/// Interface every embedding backend implements. Instances are immutable
/// after construction and safe to share across threads.
class Embedder {
public:
    virtual ~Embedder() = default;

    virtual std::size_t dimension() const = 0;
    virtual std::string model_name() const = 0;

    /// Embed a list of already-validated texts, preserving order.
    virtual std::vector<EmbeddingVector> embed_many(
        const std::vector<std::string>& texts) = 0;
};

namespace detail {

inline bool is_blank(const std::string& text) {
    return std::all_of(text.begin(), text.end(), [](unsigned char c) {
        return std::isspace(c) != 0;
    });
}

inline void require_unit_norm(const EmbeddingVector& v,
                              const std::string& backend) {
    if (!is_unit_norm(v)) {
        throw ProviderError(backend + ": backend returned non-unit vector");
    }
}

}  // namespace detail

/// Embed one text. Rejects blank input; every returned vector is unit-norm
/// with the engine dimension.
inline EmbeddingVector embed_text(const std::string& text, Embedder& embedder) {
    if (detail::is_blank(text)) {
        throw ValidationError("embed_text: empty text");
    }
    auto out = embedder.embed_many({text});
    if (out.size() != 1) {
        throw ProviderError("embed_text: backend returned " +
                            std::to_string(out.size()) + " vectors for 1 text");
    }
    if (out.front().dimension() != embedder.dimension()) {
        throw ConfigError("embed_text: dimension mismatch, expected " +
                          std::to_string(embedder.dimension()) + ", got " +
                          std::to_string(out.front().dimension()));
    }
    detail::require_unit_norm(out.front(), embedder.model_name());
    return std::move(out.front());
}

/// Element-wise embed_text over an ordered list.
inline std::vector<EmbeddingVector> embed_batch(
    const std::vector<std::string>& texts, Embedder& embedder) {
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (detail::is_blank(texts[i])) {
            throw ValidationError("embed_batch: empty text at index " +
                                  std::to_string(i));
        }
    }
    if (texts.empty()) return {};
    auto out = embedder.embed_many(texts);
    if (out.size() != texts.size()) {
        throw ProviderError("embed_batch: backend returned " +
                            std::to_string(out.size()) + " vectors for " +
                            std::to_string(texts.size()) + " texts");
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].dimension() != embedder.dimension()) {
            throw ConfigError("embed_batch: dimension mismatch at index " +
                              std::to_string(i));
        }
        detail::require_unit_norm(out[i], embedder.model_name());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Mock backend
// ---------------------------------------------------------------------------

/// Deterministic offline backend. `hash` mode turns (text, seed) into a
/// seeded Gaussian unit vector. `tag_aware` mode additionally recognizes a
/// fixed tag vocabulary and sums near-orthogonal per-tag basis vectors, so
/// texts sharing tags land measurably closer than unrelated texts.
class MockEmbedder : public Embedder {
public:
    MockEmbedder(MockMode mode, std::uint64_t seed,
                 std::size_t dimension = kDefaultDimension,
                 std::string bias_token = "")
        : mode_(mode),
          seed_(seed),
          dimension_(dimension),
          bias_token_(std::move(bias_token)) {
        if (mode_ == MockMode::tag_aware) {
            for (const auto& tag : tag_vocabulary()) {
                basis_.emplace(tag, hash_unit_vector(tag));
            }
        }
        if (!bias_token_.empty() && basis_.find(bias_token_) == basis_.end()) {
            throw ConfigError("mock: unknown bias token '" + bias_token_ + "'");
        }
    }

    std::size_t dimension() const override { return dimension_; }

    std::string model_name() const override {
        return mode_ == MockMode::hash ? "mock-hash" : "mock-tag-aware";
    }

    std::vector<EmbeddingVector> embed_many(
        const std::vector<std::string>& texts) override {
        std::vector<EmbeddingVector> out;
        out.reserve(texts.size());
        for (const auto& text : texts) out.push_back(embed_one(text));
        return out;
    }

    /// The recognized tags: 12 activity types, demographic tokens, and
    /// per-modality bias tokens (matched case-sensitively, so ordinary
    /// lowercase prose never triggers them).
    static const std::vector<std::string>& tag_vocabulary() {
        static const std::vector<std::string> vocab = {
            "active", "passive", "indoors", "outdoors", "mental", "physical",
            "arts", "crafts", "exploration", "relaxation", "learning",
            "homemaking",
            "male", "female", "young", "adult", "senior",
            "white", "black", "afro-american", "asian", "hispanic",
            "USER", "MESSAGE", "IMAGE"};
        return vocab;
    }

    static constexpr double kNoiseScale = 0.05;

    /// Distinct vocabulary tags present in a text, in sorted order.
    std::set<std::string> extract_tags(const std::string& text) const {
        std::set<std::string> found;
        std::string token;
        auto flush = [&] {
            if (token.empty()) return;
            if (token == "USER" || token == "MESSAGE" || token == "IMAGE") {
                found.insert(token);
            } else {
                std::string lower = token;
                std::transform(lower.begin(), lower.end(), lower.begin(),
                               [](unsigned char c) { return std::tolower(c); });
                if (lowercase_vocab().count(lower)) found.insert(lower);
            }
            token.clear();
        };
        for (unsigned char c : text) {
            if (std::isalnum(c) || c == '-') {
                token.push_back(static_cast<char>(c));
            } else {
                flush();
            }
        }
        flush();
        return found;
    }

private:
    static const std::set<std::string>& lowercase_vocab() {
        static const std::set<std::string> vocab = [] {
            std::set<std::string> s;
            for (const auto& tag : tag_vocabulary()) {
                if (tag != "USER" && tag != "MESSAGE" && tag != "IMAGE") {
                    s.insert(tag);
                }
            }
            return s;
        }();
        return vocab;
    }

    std::vector<double> hash_unit_vector(std::string_view text) const {
        rng::GaussianSource gauss(rng::combine_seed(text, seed_));
        std::vector<double> v(dimension_);
        for (double& x : v) x = gauss.next();
        vec::normalize_in_place(v);
        return v;
    }

    EmbeddingVector embed_one(const std::string& text) const {
        std::vector<double> v;
        if (mode_ == MockMode::hash) {
            v = hash_unit_vector(text);
        } else {
            v = hash_unit_vector(text);
            vec::scale_in_place(v, kNoiseScale);
            for (const auto& tag : extract_tags(text)) {
                vec::axpy(1.0, basis_.at(tag), v);
            }
            if (!bias_token_.empty()) {
                vec::axpy(1.0, basis_.at(bias_token_), v);
            }
            vec::normalize_in_place(v);
        }
        return EmbeddingVector{std::move(v), "mock:" + model_name()};
    }

    MockMode mode_;
    std::uint64_t seed_;
    std::size_t dimension_;
    std::string bias_token_;
    std::map<std::string, std::vector<double>> basis_;
};

/// Convenience wrapper matching the one-shot signature.
inline EmbeddingVector mock_embed(const std::string& text, std::uint64_t seed,
                                  MockMode mode,
                                  std::size_t dimension = kDefaultDimension) {
    MockEmbedder embedder(mode, seed, dimension);
    return embed_text(text, embedder);
}

// ---------------------------------------------------------------------------
// Persistent cache
// ---------------------------------------------------------------------------

/// Wraps another backend with an append-only JSON-lines cache keyed by
/// (model name, exact text). Hits bypass the inner backend entirely; vectors
/// round-trip bit-exactly. Corrupt lines are skipped with a warning and the
/// affected texts recomputed.
class CachingEmbedder : public Embedder {
public:
    CachingEmbedder(std::shared_ptr<Embedder> inner, std::string cache_path)
        : inner_(std::move(inner)), cache_path_(std::move(cache_path)) {
        load_cache_file();
    }

    std::size_t dimension() const override { return inner_->dimension(); }
    std::string model_name() const override { return inner_->model_name(); }

    std::vector<EmbeddingVector> embed_many(
        const std::vector<std::string>& texts) override {
        const std::string model = inner_->model_name();
        std::vector<EmbeddingVector> out(texts.size());
        std::vector<std::size_t> miss_positions;
        std::vector<std::string> miss_texts;
        std::set<std::string> queued;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            for (std::size_t i = 0; i < texts.size(); ++i) {
                auto it = entries_.find({model, texts[i]});
                if (it != entries_.end()) {
                    out[i] = EmbeddingVector{it->second, "cached:" + model};
                    ++hits_;
                } else {
                    miss_positions.push_back(i);
                    if (queued.insert(texts[i]).second) {
                        miss_texts.push_back(texts[i]);
                    }
                    ++misses_;
                }
            }
        }
        if (!miss_texts.empty()) {
            auto computed = inner_->embed_many(miss_texts);
            if (computed.size() != miss_texts.size()) {
                throw ProviderError("cache: inner backend returned " +
                                    std::to_string(computed.size()) +
                                    " vectors for " +
                                    std::to_string(miss_texts.size()) +
                                    " texts");
            }
            std::lock_guard<std::mutex> lock(mutex_);
            std::map<std::string, std::size_t> fresh;
            for (std::size_t j = 0; j < miss_texts.size(); ++j) {
                fresh.emplace(miss_texts[j], j);
                entries_[{model, miss_texts[j]}] = computed[j].values;
                append_record(model, miss_texts[j], computed[j].values);
            }
            for (std::size_t pos : miss_positions) {
                out[pos] = computed[fresh.at(texts[pos])];
            }
        }
        return out;
    }

    std::size_t entry_count() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return entries_.size();
    }
    std::size_t hit_count() const { return hits_; }
    std::size_t miss_count() const { return misses_; }

private:
    void load_cache_file() {
        std::ifstream in(cache_path_);
        if (!in) return;  // first run: file created on first append
        std::string line;
        std::size_t line_number = 0;
        while (std::getline(in, line)) {
            ++line_number;
            if (line.empty()) continue;
            try {
                auto record = nlohmann::json::parse(line);
                std::string model = record.at("model").get<std::string>();
                std::string text = record.at("text").get<std::string>();
                auto values = record.at("vector").get<std::vector<double>>();
                if (values.size() != inner_->dimension()) {
                    throw ValidationError("wrong dimension");
                }
                entries_[{std::move(model), std::move(text)}] = std::move(values);
            } catch (const std::exception& e) {
                std::cerr << "warning: evicting corrupt cache entry at "
                          << cache_path_ << ":" << line_number << " ("
                          << e.what() << ")\n";
            }
        }
    }

    // Caller holds mutex_.
    void append_record(const std::string& model, const std::string& text,
                       const std::vector<double>& values) {
        const std::filesystem::path path(cache_path_);
        if (path.has_parent_path()) {
            std::error_code ec;
            std::filesystem::create_directories(path.parent_path(), ec);
        }
        std::ofstream out(cache_path_, std::ios::app);
        if (!out) {
            throw IoError("cannot append to cache file: " + cache_path_);
        }
        nlohmann::json record = {
            {"model", model},
            {"text_hash", rng::fnv1a64(text)},
            {"text", text},
            {"vector", values},
        };
        out << record.dump() << "\n";
    }

    std::shared_ptr<Embedder> inner_;
    std::string cache_path_;
    mutable std::mutex mutex_;
    std::map<std::pair<std::string, std::string>, std::vector<double>> entries_;
    std::atomic<std::size_t> hits_{0};
    std::atomic<std::size_t> misses_{0};
};

/// Return the stored vector for (model, text) or compute-and-persist it.
inline EmbeddingVector cache_get_or_compute(const std::string& text,
                                            std::shared_ptr<Embedder> inner,
                                            const std::string& cache_path) {
    CachingEmbedder cache(std::move(inner), cache_path);
    return embed_text(text, cache);
}

}  // namespace nudgekit
