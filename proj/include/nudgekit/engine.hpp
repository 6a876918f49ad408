#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "nudgekit/corpus.hpp"
#include "nudgekit/csv.hpp"
#include "nudgekit/diagnostics.hpp"
#include "nudgekit/evaluation.hpp"
#include "nudgekit/matching.hpp"
#include "nudgekit/representation.hpp"

// Pipeline orchestration shared by the CLI and the integration tests:
// corpus -> representations -> centered sets -> per-user tables -> outputs.

namespace nudgekit {

struct CenteredSets {
    CenteredRepresentationSet users;
    CenteredRepresentationSet messages;
    CenteredRepresentationSet images;
};

/// Split a mixed representation list by modality and center each modality
/// over exactly its own items.
inline CenteredSets center_all(const std::vector<Representation>& reps) {
    std::vector<Representation> users, messages, images;
    for (const auto& r : reps) {
        switch (r.modality) {
            case Modality::user: users.push_back(r); break;
            case Modality::message: messages.push_back(r); break;
            case Modality::image: images.push_back(r); break;
        }
    }
    return CenteredSets{center(users, Modality::user),
                        center(messages, Modality::message),
                        center(images, Modality::image)};
}

/// Top-k recommendations for every user, keyed by user id.
inline std::map<std::string, std::vector<Recommendation>> recommend_all(
    const CenteredSets& sets, const PreferenceWeights& weights, std::size_t k) {
    std::map<std::string, std::vector<Recommendation>> out;
    for (const auto& user : sets.users.items) {
        const auto table =
            preference_table(user, sets.messages, sets.images, weights);
        out.emplace(user.id, top_k(table, k));
    }
    return out;
}

/// One softmax-sampled recommendation per user; the per-user stream is
/// seeded from (run seed, user id) so runs reproduce.
inline std::map<std::string, std::vector<Recommendation>> sample_all(
    const CenteredSets& sets, const PreferenceWeights& weights,
    double temperature, std::uint64_t seed) {
    std::map<std::string, std::vector<Recommendation>> out;
    for (const auto& user : sets.users.items) {
        const auto table =
            preference_table(user, sets.messages, sets.images, weights);
        const auto dist = softmax_distribution(table, temperature);
        const auto [message_id, image_id] =
            sample_recommendation(dist, seed ^ rng::fnv1a64(user.id));
        const std::size_t image_count = table.image_ids.size();
        double score = 0.0;
        for (std::size_t mi = 0; mi < table.message_ids.size(); ++mi) {
            if (table.message_ids[mi] == message_id) {
                for (std::size_t ii = 0; ii < image_count; ++ii) {
                    if (table.image_ids[ii] == image_id) {
                        score = table.at(mi, ii);
                    }
                }
            }
        }
        out.emplace(user.id,
                    std::vector<Recommendation>{{1, message_id, image_id, score}});
    }
    return out;
}

inline void save_recommendations(
    const std::map<std::string, std::vector<Recommendation>>& per_user,
    const std::filesystem::path& path) {
    csv::Table table;
    table.header = {"user_id", "message_id", "image_id", "score", "rank"};
    for (const auto& [user_id, recommendations] : per_user) {
        for (const auto& rec : recommendations) {
            table.rows.push_back({user_id, rec.message_id, rec.image_id,
                                  io::format_double(rec.score),
                                  std::to_string(rec.rank)});
        }
    }
    io::atomic_write_file(path, csv::format_table(table));
}

inline std::map<std::string, std::vector<Recommendation>> load_recommendations(
    const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw IoError("recommendations file not found: " + path.string() +
                      " (run the recommend command first)");
    }
    const auto table = csv::read_file(path);
    const auto user_col = table.column("user_id");
    const auto message_col = table.column("message_id");
    const auto image_col = table.column("image_id");
    const auto score_col = table.column("score");
    const auto rank_col = table.column("rank");
    std::map<std::string, std::vector<Recommendation>> out;
    for (const auto& row : table.rows) {
        out[row[user_col]].push_back(Recommendation{
            static_cast<int>(io::parse_long(row[rank_col], "rank")),
            row[message_col], row[image_col],
            io::parse_double(row[score_col], "score")});
    }
    return out;
}

/// Scatter data for the two-panel geometry figure: a joint PCA over all
/// modalities, fit separately for the un-centered and the centered
/// representations.
inline std::vector<PlotPoint> build_plot_points(
    const std::vector<Representation>& reps, const CenteredSets& sets) {
    std::vector<std::vector<double>> uncentered_vectors;
    uncentered_vectors.reserve(reps.size());
    for (const auto& r : reps) uncentered_vectors.push_back(r.vector);

    std::vector<Representation> centered_reps;
    centered_reps.reserve(reps.size());
    for (const auto* set : {&sets.users, &sets.messages, &sets.images}) {
        for (const auto& item : set->items) {
            centered_reps.push_back(
                Representation{item.id, set->modality, item.vector});
        }
    }
    std::vector<std::vector<double>> centered_vectors;
    centered_vectors.reserve(centered_reps.size());
    for (const auto& r : centered_reps) centered_vectors.push_back(r.vector);

    std::vector<PlotPoint> points;
    points.reserve(reps.size() * 2);
    const auto uncentered_model = fit_pca(uncentered_vectors, 2);
    const auto uncentered_xy = project(uncentered_model, uncentered_vectors);
    for (std::size_t i = 0; i < reps.size(); ++i) {
        points.push_back(PlotPoint{reps[i].id, to_string(reps[i].modality),
                                   uncentered_xy[i][0], uncentered_xy[i][1],
                                   false});
    }
    const auto centered_model = fit_pca(centered_vectors, 2);
    const auto centered_xy = project(centered_model, centered_vectors);
    for (std::size_t i = 0; i < centered_reps.size(); ++i) {
        points.push_back(PlotPoint{centered_reps[i].id,
                                   to_string(centered_reps[i].modality),
                                   centered_xy[i][0], centered_xy[i][1], true});
    }
    return points;
}

inline std::map<std::string, std::vector<std::vector<double>>>
vectors_by_modality(const std::vector<Representation>& reps) {
    std::map<std::string, std::vector<std::vector<double>>> out;
    for (const auto& r : reps) {
        out[to_string(r.modality)].push_back(r.vector);
    }
    return out;
}

}  // namespace nudgekit
