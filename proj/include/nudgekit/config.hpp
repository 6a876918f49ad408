#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "nudgekit/errors.hpp"
#include "nudgekit/ioutil.hpp"
#include "nudgekit/matching.hpp"
#include "nudgekit/providers.hpp"
#include "nudgekit/representation.hpp"

namespace nudgekit {

struct DataPaths {
    std::filesystem::path users = "data/users.csv";
    std::filesystem::path messages = "data/messages.csv";
    std::filesystem::path images = "data/images.csv";
};

/// Every free parameter of a run in one place. Defaults: like/dislike
/// weights 0.2, unit preference weights, k = 5, temperature 1.
struct RunConfig {
    DataPaths data;
    ProviderConfig provider;
    UserWeights user_weights;
    PreferenceWeights preference_weights;
    int k = 5;
    double temperature = 1.0;
    std::uint64_t seed = 42;
    std::filesystem::path output_dir = "out";

    void validate() const {
        if (k < 1) throw ConfigError("config: k must be >= 1");
        if (!(temperature > 0.0)) {
            throw ConfigError("config: temperature must be positive");
        }
        provider.validate();
        user_weights.validate();
        preference_weights.validate();
        for (const auto& path : {data.users, data.messages, data.images}) {
            if (!std::filesystem::exists(path)) {
                throw IoError("config: data file not found: " + path.string());
            }
        }
    }
};

namespace detail {

/// Expand ${NAME} references against the environment. Secrets stay out of
/// config files this way.
inline std::string interpolate_env(const std::string& value) {
    std::string out;
    std::size_t pos = 0;
    while (pos < value.size()) {
        const auto start = value.find("${", pos);
        if (start == std::string::npos) {
            out.append(value, pos, std::string::npos);
            break;
        }
        const auto end = value.find('}', start + 2);
        if (end == std::string::npos) {
            throw ConfigError("config: unterminated ${...} in '" + value + "'");
        }
        out.append(value, pos, start - pos);
        const std::string name = value.substr(start + 2, end - start - 2);
        const char* expanded = std::getenv(name.c_str());
        if (expanded == nullptr) {
            throw ConfigError("config: environment variable '" + name +
                              "' is not set");
        }
        out += expanded;
        pos = end + 1;
    }
    return out;
}

inline void interpolate_tree(nlohmann::json& node) {
    if (node.is_string()) {
        node = interpolate_env(node.get<std::string>());
    } else if (node.is_object() || node.is_array()) {
        for (auto& child : node) interpolate_tree(child);
    }
}

inline BackendKind backend_kind_from_string(const std::string& text) {
    if (text == "remote") return BackendKind::remote;
    if (text == "mock") return BackendKind::mock;
    if (text == "cached") return BackendKind::cached;
    throw ConfigError("config: unknown provider kind '" + text + "'");
}

inline MockMode mock_mode_from_string(const std::string& text) {
    if (text == "hash") return MockMode::hash;
    if (text == "tag_aware") return MockMode::tag_aware;
    throw ConfigError("config: unknown mock mode '" + text + "'");
}

}  // namespace detail

/// Parse a JSON config file. Unknown keys are rejected so typos fail loudly.
inline RunConfig load_run_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw IoError("config file not found: " + path.string());
    }
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(io::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: parse error in " + path.string() + ": " +
                          e.what());
    }
    detail::interpolate_tree(root);

    auto reject_unknown = [](const nlohmann::json& object,
                             std::initializer_list<const char*> known,
                             const char* where) {
        for (const auto& [key, value] : object.items()) {
            bool ok = false;
            for (const char* k : known) {
                if (key == k) { ok = true; break; }
            }
            if (!ok) {
                throw ConfigError(std::string("config: unknown key '") + key +
                                  "' in " + where);
            }
        }
    };

    RunConfig config;
    reject_unknown(root,
                   {"data", "provider", "user_weights", "preference_weights",
                    "k", "temperature", "seed", "output_dir"},
                   "top level");
    if (root.contains("data")) {
        const auto& data = root["data"];
        reject_unknown(data, {"users", "messages", "images"}, "data");
        if (data.contains("users")) config.data.users = data["users"].get<std::string>();
        if (data.contains("messages")) config.data.messages = data["messages"].get<std::string>();
        if (data.contains("images")) config.data.images = data["images"].get<std::string>();
    }
    if (root.contains("provider")) {
        const auto& p = root["provider"];
        reject_unknown(p,
                       {"kind", "endpoint", "model", "api_key_env",
                        "timeout_seconds", "batch_size", "max_attempts",
                        "backoff_ms", "dimension", "mock_mode", "mock_seed",
                        "cached_backend", "cache_path"},
                       "provider");
        if (p.contains("kind")) {
            config.provider.kind =
                detail::backend_kind_from_string(p["kind"].get<std::string>());
        }
        if (p.contains("endpoint")) config.provider.endpoint = p["endpoint"].get<std::string>();
        if (p.contains("model")) config.provider.model = p["model"].get<std::string>();
        if (p.contains("api_key_env")) config.provider.api_key_env = p["api_key_env"].get<std::string>();
        if (p.contains("timeout_seconds")) config.provider.timeout_seconds = p["timeout_seconds"].get<double>();
        if (p.contains("batch_size")) config.provider.batch_size = p["batch_size"].get<std::size_t>();
        if (p.contains("max_attempts")) config.provider.retry.max_attempts = p["max_attempts"].get<int>();
        if (p.contains("backoff_ms")) {
            config.provider.retry.backoff =
                std::chrono::milliseconds(p["backoff_ms"].get<long>());
        }
        if (p.contains("dimension")) config.provider.dimension = p["dimension"].get<std::size_t>();
        if (p.contains("mock_mode")) {
            config.provider.mock_mode =
                detail::mock_mode_from_string(p["mock_mode"].get<std::string>());
        }
        if (p.contains("mock_seed")) config.provider.mock_seed = p["mock_seed"].get<std::uint64_t>();
        if (p.contains("cached_backend")) {
            config.provider.cached_backend = detail::backend_kind_from_string(
                p["cached_backend"].get<std::string>());
        }
        if (p.contains("cache_path")) config.provider.cache_path = p["cache_path"].get<std::string>();
    }
    if (root.contains("user_weights")) {
        const auto& w = root["user_weights"];
        reject_unknown(w, {"like", "dislike"}, "user_weights");
        if (w.contains("like")) config.user_weights.like_weight = w["like"].get<double>();
        if (w.contains("dislike")) config.user_weights.dislike_weight = w["dislike"].get<double>();
    }
    if (root.contains("preference_weights")) {
        const auto& w = root["preference_weights"];
        reject_unknown(w, {"message_image", "user_message", "user_image"},
                       "preference_weights");
        if (w.contains("message_image")) config.preference_weights.message_image = w["message_image"].get<double>();
        if (w.contains("user_message")) config.preference_weights.user_message = w["user_message"].get<double>();
        if (w.contains("user_image")) config.preference_weights.user_image = w["user_image"].get<double>();
    }
    if (root.contains("k")) config.k = root["k"].get<int>();
    if (root.contains("temperature")) config.temperature = root["temperature"].get<double>();
    if (root.contains("seed")) config.seed = root["seed"].get<std::uint64_t>();
    if (root.contains("output_dir")) config.output_dir = root["output_dir"].get<std::string>();
    return config;
}

}  // namespace nudgekit
