#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "nudgekit/corpus.hpp"
#include "nudgekit/embedding.hpp"
#include "nudgekit/ioutil.hpp"
#include "nudgekit/providers.hpp"

namespace nudgekit {

enum class Modality { user, message, image };

inline std::string to_string(Modality m) {
    switch (m) {
        case Modality::user: return "user";
        case Modality::message: return "message";
        case Modality::image: return "image";
    }
    return "?";
}

inline Modality modality_from_string(const std::string& text) {
    if (text == "user") return Modality::user;
    if (text == "message") return Modality::message;
    if (text == "image") return Modality::image;
    throw ValidationError("unknown modality '" + text + "'");
}

/// Embedding-space representation of one catalog item. Message and image
/// vectors are unit-norm; user vectors are weighted sums and generally are
/// not.
struct Representation {
    std::string id;
    Modality modality = Modality::message;
    std::vector<double> vector;
};

struct UserWeights {
    double like_weight = 0.2;
    double dislike_weight = 0.2;

    void validate() const {
        if (like_weight < 0.0 || dislike_weight < 0.0) {
            throw ConfigError("user weights must be non-negative");
        }
    }
};

inline Representation represent_message(const Message& message,
                                        Embedder& embedder) {
    return Representation{message.id, Modality::message,
                          embed_text(message.text, embedder).values};
}

inline Representation represent_image(const ImageItem& image,
                                      Embedder& embedder) {
    return Representation{image.id, Modality::image,
                          embed_text(image.caption, embedder).values};
}

/// "<age> year old <race> <gender>", e.g. "23 year old white female".
inline std::string demographics_sentence(const User& user) {
    return std::to_string(user.age) + " year old " +
           detail::to_lower(user.race) + " " + detail::to_lower(user.gender);
}

/// r(u) = emb(demographics) + w_l * sum emb(like) - w_d * sum emb(dislike).
/// Likes/dislikes are embedded as bare activity words and accumulated in
/// lexicographic order so the sum reproduces bit-exactly.
inline Representation represent_user(const User& user, Embedder& embedder,
                                     const UserWeights& weights = {}) {
    weights.validate();
    std::vector<double> acc =
        embed_text(demographics_sentence(user), embedder).values;
    for (const auto& activity : user.likes) {  // std::set: sorted
        vec::axpy(weights.like_weight, embed_text(activity, embedder).values,
                  acc);
    }
    for (const auto& activity : user.dislikes) {
        vec::axpy(-weights.dislike_weight,
                  embed_text(activity, embedder).values, acc);
    }
    return Representation{user.id, Modality::user, std::move(acc)};
}

/// Representations for the whole corpus, users first, then messages, then
/// images, each group in catalog order.
inline std::vector<Representation> represent_corpus(
    const Corpus& corpus, Embedder& embedder, const UserWeights& weights = {}) {
    std::vector<Representation> out;
    out.reserve(corpus.users.size() + corpus.messages.size() +
                corpus.images.size());
    for (const auto& u : corpus.users) {
        out.push_back(represent_user(u, embedder, weights));
    }
    for (const auto& m : corpus.messages) {
        out.push_back(represent_message(m, embedder));
    }
    for (const auto& i : corpus.images) {
        out.push_back(represent_image(i, embedder));
    }
    return out;
}

inline void save_representations(const std::vector<Representation>& reps,
                                 const std::filesystem::path& path) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& r : reps) {
        items.push_back({{"id", r.id},
                         {"modality", to_string(r.modality)},
                         {"vector", r.vector}});
    }
    io::atomic_write_file(path, items.dump());
}

inline std::vector<Representation> load_representations(
    const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw IoError("representations file not found: " + path.string() +
                      " (run the embed command first)");
    }
    nlohmann::json items;
    try {
        items = nlohmann::json::parse(io::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed representations file " +
                              path.string() + ": " + e.what());
    }
    std::vector<Representation> out;
    std::size_t dimension = 0;
    for (const auto& item : items) {
        Representation r;
        r.id = item.at("id").get<std::string>();
        r.modality = modality_from_string(item.at("modality").get<std::string>());
        r.vector = item.at("vector").get<std::vector<double>>();
        if (dimension == 0) dimension = r.vector.size();
        if (r.vector.size() != dimension) {
            throw ValidationError("representations file mixes dimensions (" +
                                  std::to_string(dimension) + " vs " +
                                  std::to_string(r.vector.size()) + ")");
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace nudgekit
