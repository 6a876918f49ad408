#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "nudgekit/providers.hpp"

namespace nudgekit {

namespace detail {

struct ParsedUrl {
    std::string base;  // scheme://host[:port]
    std::string path;  // /v1/embeddings
};

inline ParsedUrl parse_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint must be an http(s) URL: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

inline bool retryable_status(int status) {
    return status == 429 || status >= 500;
}

}  // namespace detail

/// HTTP+JSON embedding client. Request {model, input:[texts]}, response
/// {data:[{index, embedding}]}; entries are re-sorted by index, so
/// out-of-order providers are tolerated. Vectors are renormalized to unit
/// length on receipt because all downstream scoring assumes unit-sphere
/// geometry.
class RemoteEmbedder : public Embedder {
public:
    explicit RemoteEmbedder(ProviderConfig config) : config_(std::move(config)) {
        config_.validate();
        if (config_.endpoint.empty()) {
            throw ConfigError("remote provider requires an endpoint URL");
        }
        if (!config_.api_key_env.empty()) {
            if (const char* key = std::getenv(config_.api_key_env.c_str())) {
                api_key_ = key;
            }
        }
    }

    std::size_t dimension() const override { return config_.dimension; }
    std::string model_name() const override { return config_.model; }

    std::vector<EmbeddingVector> embed_many(
        const std::vector<std::string>& texts) override {
        std::vector<EmbeddingVector> out;
        out.reserve(texts.size());
        for (std::size_t offset = 0; offset < texts.size();
             offset += config_.batch_size) {
            const std::size_t end =
                std::min(offset + config_.batch_size, texts.size());
            std::vector<std::string> chunk(texts.begin() + offset,
                                           texts.begin() + end);
            auto vectors = request_chunk(chunk);
            for (auto& v : vectors) out.push_back(std::move(v));
        }
        return out;
    }

    /// Number of HTTP requests issued so far (cache-hit checks, stats).
    std::size_t request_count() const { return requests_.load(); }

private:
    std::vector<EmbeddingVector> request_chunk(
        const std::vector<std::string>& texts) {
        const auto url = detail::parse_url(config_.endpoint);
        const nlohmann::json body = {{"model", config_.model},
                                     {"input", texts}};
        const std::string payload = body.dump();

        std::string last_error;
        int last_status = 0;
        for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
            if (attempt > 1) {
                std::this_thread::sleep_for(config_.retry.backoff);
            }
            httplib::Client client(url.base);
            const auto timeout = std::chrono::milliseconds(
                static_cast<long>(config_.timeout_seconds * 1000.0));
            client.set_connection_timeout(timeout);
            client.set_read_timeout(timeout);
            client.set_write_timeout(timeout);
            httplib::Headers headers;
            if (!api_key_.empty()) {
                headers.emplace("Authorization", "Bearer " + api_key_);
            }
            ++requests_;
            auto res = client.Post(url.path, headers, payload, "application/json");
            if (!res) {
                last_error = "connection error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status == 200) {
                return parse_response(res->body, texts.size());
            }
            last_status = res->status;
            last_error = "HTTP " + std::to_string(res->status);
            if (!detail::retryable_status(res->status)) break;
        }
        throw ProviderError("embedding request to " + config_.endpoint +
                                " failed after " +
                                std::to_string(config_.retry.max_attempts) +
                                " attempt(s): " + last_error,
                            last_status);
    }

    std::vector<EmbeddingVector> parse_response(const std::string& body,
                                                std::size_t expected) {
        nlohmann::json parsed;
        try {
            parsed = nlohmann::json::parse(body);
        } catch (const std::exception& e) {
            throw ProviderError(std::string("malformed embedding response: ") +
                                e.what());
        }
        if (!parsed.contains("data") || !parsed["data"].is_array()) {
            throw ProviderError("embedding response missing 'data' array");
        }
        std::vector<std::vector<double>> by_index(expected);
        std::vector<bool> seen(expected, false);
        for (const auto& item : parsed["data"]) {
            const auto index = item.at("index").get<std::size_t>();
            if (index >= expected || seen[index]) {
                throw ProviderError("embedding response has bad index " +
                                    std::to_string(index));
            }
            by_index[index] = item.at("embedding").get<std::vector<double>>();
            seen[index] = true;
        }
        for (std::size_t i = 0; i < expected; ++i) {
            if (!seen[i]) {
                throw ProviderError("embedding response missing index " +
                                    std::to_string(i));
            }
            if (by_index[i].size() != config_.dimension) {
                throw ConfigError(
                    "remote model returned dimension " +
                    std::to_string(by_index[i].size()) + ", configured " +
                    std::to_string(config_.dimension));
            }
        }
        std::vector<EmbeddingVector> out;
        out.reserve(expected);
        for (auto& values : by_index) {
            vec::normalize_in_place(values);
            out.push_back(EmbeddingVector{std::move(values),
                                          "remote:" + config_.model});
        }
        return out;
    }

    ProviderConfig config_;
    std::string api_key_;
    std::atomic<std::size_t> requests_{0};
};

/// Build the backend a config describes; `cached` wraps its inner backend
/// with the JSON-lines cache. A non-empty cache_path also enables caching
/// for the other kinds.
inline std::shared_ptr<Embedder> make_embedder(const ProviderConfig& config) {
    config.validate();
    auto make_inner = [&config](BackendKind kind) -> std::shared_ptr<Embedder> {
        switch (kind) {
            case BackendKind::mock:
                return std::make_shared<MockEmbedder>(
                    config.mock_mode, config.mock_seed, config.dimension);
            case BackendKind::remote:
                return std::make_shared<RemoteEmbedder>(config);
            case BackendKind::cached:
                throw ConfigError("cached backend cannot nest");
        }
        throw ConfigError("unknown backend kind");
    };
    if (config.kind == BackendKind::cached) {
        if (config.cache_path.empty()) {
            throw ConfigError("cached provider requires cache_path");
        }
        return std::make_shared<CachingEmbedder>(
            make_inner(config.cached_backend), config.cache_path);
    }
    auto inner = make_inner(config.kind);
    if (!config.cache_path.empty()) {
        return std::make_shared<CachingEmbedder>(std::move(inner),
                                                 config.cache_path);
    }
    return inner;
}

// ---------------------------------------------------------------------------
// Captions
// ---------------------------------------------------------------------------

/// Text description of an image; the image's sole interface to the
/// embedding space.
struct Caption {
    std::string image_id;
    std::string text;  // comma-joined attribute/activity phrases
};

class CaptionProvider {
public:
    virtual ~CaptionProvider() = default;
    virtual Caption caption_for(const std::string& image_id,
                                const std::string& prompt_template) = 0;
};

/// Serves the shipped captions verbatim.
class FixtureCaptionProvider : public CaptionProvider {
public:
    explicit FixtureCaptionProvider(
        std::map<std::string, std::string> captions)
        : captions_(std::move(captions)) {}

    Caption caption_for(const std::string& image_id,
                        const std::string& /*prompt_template*/) override {
        auto it = captions_.find(image_id);
        if (it == captions_.end()) {
            throw NotFoundError("no caption for image id '" + image_id + "'");
        }
        return Caption{image_id, it->second};
    }

private:
    std::map<std::string, std::string> captions_;
};

/// Prompted visual-question-answering client: POST {image, prompt},
/// response {caption}.
class RemoteCaptionProvider : public CaptionProvider {
public:
    explicit RemoteCaptionProvider(ProviderConfig config)
        : config_(std::move(config)) {
        if (config_.endpoint.empty()) {
            throw ConfigError("remote caption provider requires an endpoint");
        }
        if (!config_.api_key_env.empty()) {
            if (const char* key = std::getenv(config_.api_key_env.c_str())) {
                api_key_ = key;
            }
        }
    }

    Caption caption_for(const std::string& image_id,
                        const std::string& prompt_template) override {
        const auto url = detail::parse_url(config_.endpoint);
        const nlohmann::json body = {{"image", image_id},
                                     {"prompt", prompt_template}};
        std::string last_error;
        int last_status = 0;
        for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
            if (attempt > 1) std::this_thread::sleep_for(config_.retry.backoff);
            httplib::Client client(url.base);
            httplib::Headers headers;
            if (!api_key_.empty()) {
                headers.emplace("Authorization", "Bearer " + api_key_);
            }
            auto res = client.Post(url.path, headers, body.dump(),
                                   "application/json");
            if (!res) {
                last_error =
                    "connection error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status == 404) {
                throw NotFoundError("captioning backend has no image '" +
                                    image_id + "'");
            }
            if (res->status == 200) {
                try {
                    auto parsed = nlohmann::json::parse(res->body);
                    return Caption{image_id,
                                   parsed.at("caption").get<std::string>()};
                } catch (const std::exception& e) {
                    throw ProviderError(
                        std::string("malformed caption response: ") + e.what());
                }
            }
            last_status = res->status;
            last_error = "HTTP " + std::to_string(res->status);
            if (!detail::retryable_status(res->status)) break;
        }
        throw ProviderError("caption request failed: " + last_error,
                            last_status);
    }

private:
    ProviderConfig config_;
    std::string api_key_;
};

/// Fetch an image's caption through the given provider and validate it.
inline Caption caption_image(const std::string& image_ref,
                             const std::string& prompt_template,
                             CaptionProvider& provider) {
    Caption caption = provider.caption_for(image_ref, prompt_template);
    if (caption.text.empty()) {
        throw ValidationError("caption for '" + image_ref + "' is empty");
    }
    return caption;
}

}  // namespace nudgekit
