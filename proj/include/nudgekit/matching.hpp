#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nudgekit/representation.hpp"
#include "nudgekit/rng.hpp"
#include "nudgekit/vecmath.hpp"

namespace nudgekit {

struct CenteredItem {
    std::string id;
    std::vector<double> vector;
};

/// One modality's representations after subtracting the modality centroid.
/// The centered vectors sum to (numerically) zero, and adding the centroid
/// back reconstructs the original representation.
struct CenteredRepresentationSet {
    Modality modality = Modality::message;
    std::vector<CenteredItem> items;
    std::vector<double> centroid;

    const CenteredItem& by_id(const std::string& id) const {
        for (const auto& item : items) {
            if (item.id == id) return item;
        }
        throw NotFoundError("no centered item with id '" + id + "'");
    }
};

/// r_bar(x) = r(x) - mean over all items of the same modality.
inline CenteredRepresentationSet center(
    const std::vector<Representation>& representations, Modality modality) {
    if (representations.empty()) {
        throw ValidationError("center: empty representation list");
    }
    const std::size_t dimension = representations.front().vector.size();
    for (const auto& r : representations) {
        if (r.modality != modality) {
            throw ValidationError("center: mixed modalities (" +
                                  to_string(r.modality) + " in a " +
                                  to_string(modality) + " set)");
        }
        if (r.vector.size() != dimension) {
            throw ValidationError("center: mixed dimensions");
        }
    }
    CenteredRepresentationSet set;
    set.modality = modality;
    set.centroid.assign(dimension, 0.0);
    for (const auto& r : representations) {
        for (std::size_t i = 0; i < dimension; ++i) {
            set.centroid[i] += r.vector[i];
        }
    }
    vec::scale_in_place(set.centroid,
                        1.0 / static_cast<double>(representations.size()));
    set.items.reserve(representations.size());
    for (const auto& r : representations) {
        set.items.push_back({r.id, vec::subtract(r.vector, set.centroid)});
    }
    return set;
}

/// Pair-alignment weights in the preference score; defaults treat all three
/// pairs equally.
struct PreferenceWeights {
    double message_image = 1.0;
    double user_message = 1.0;
    double user_image = 1.0;

    void validate() const {
        if (!std::isfinite(message_image) || !std::isfinite(user_message) ||
            !std::isfinite(user_image)) {
            throw ConfigError("preference weights must be finite");
        }
    }
};

/// p(u,m,i) = w_mi <m,i> + w_um <u,m> + w_ui <u,i> over centered vectors.
inline double preference(std::span<const double> user_bar,
                         std::span<const double> message_bar,
                         std::span<const double> image_bar,
                         const PreferenceWeights& w = {}) {
    const double mi = vec::dot(message_bar, image_bar);
    const double um = vec::dot(user_bar, message_bar);
    const double ui = vec::dot(user_bar, image_bar);
    return w.message_image * mi + w.user_message * um + w.user_image * ui;
}

/// Full |M| x |I| score matrix for one user, row-major over (message, image).
struct PreferenceTable {
    std::string user_id;
    std::vector<std::string> message_ids;
    std::vector<std::string> image_ids;
    std::vector<double> scores;  // row-major, size |M| * |I|
    PreferenceWeights weights;

    std::size_t size() const { return scores.size(); }

    double at(std::size_t message_index, std::size_t image_index) const {
        return scores[message_index * image_ids.size() + image_index];
    }
};

inline PreferenceTable preference_table(
    const CenteredItem& user, const CenteredRepresentationSet& messages,
    const CenteredRepresentationSet& images, const PreferenceWeights& w = {}) {
    w.validate();
    if (messages.items.empty() || images.items.empty()) {
        throw ValidationError("preference_table: empty catalog");
    }
    PreferenceTable table;
    table.user_id = user.id;
    table.weights = w;
    table.message_ids.reserve(messages.items.size());
    table.image_ids.reserve(images.items.size());

    // <u,m> and <u,i> depend on a single message/image; hoist them out of
    // the pair loop. The combination below mirrors preference() exactly.
    std::vector<double> user_message_dots;
    user_message_dots.reserve(messages.items.size());
    for (const auto& m : messages.items) {
        table.message_ids.push_back(m.id);
        user_message_dots.push_back(vec::dot(user.vector, m.vector));
    }
    std::vector<double> user_image_dots;
    user_image_dots.reserve(images.items.size());
    for (const auto& i : images.items) {
        table.image_ids.push_back(i.id);
        user_image_dots.push_back(vec::dot(user.vector, i.vector));
    }

    table.scores.reserve(messages.items.size() * images.items.size());
    for (std::size_t mi = 0; mi < messages.items.size(); ++mi) {
        for (std::size_t ii = 0; ii < images.items.size(); ++ii) {
            const double message_image_dot =
                vec::dot(messages.items[mi].vector, images.items[ii].vector);
            table.scores.push_back(w.message_image * message_image_dot +
                                   w.user_message * user_message_dots[mi] +
                                   w.user_image * user_image_dots[ii]);
        }
    }
    return table;
}

struct Recommendation {
    int rank = 0;  // 1-based
    std::string message_id;
    std::string image_id;
    double score = 0.0;
};

/// The k largest table entries, sorted by score descending; ties broken by
/// (message id, image id) ascending for deterministic output.
inline std::vector<Recommendation> top_k(const PreferenceTable& table,
                                         std::size_t k) {
    if (k < 1 || k > table.size()) {
        throw ValidationError("top_k: k=" + std::to_string(k) +
                              " out of range [1, " +
                              std::to_string(table.size()) + "]");
    }
    std::vector<std::size_t> order(table.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t image_count = table.image_ids.size();
    auto better = [&](std::size_t a, std::size_t b) {
        if (table.scores[a] != table.scores[b]) {
            return table.scores[a] > table.scores[b];
        }
        const auto& ma = table.message_ids[a / image_count];
        const auto& mb = table.message_ids[b / image_count];
        if (ma != mb) return ma < mb;
        return table.image_ids[a % image_count] < table.image_ids[b % image_count];
    };
    std::partial_sort(order.begin(), order.begin() + k, order.end(), better);

    std::vector<Recommendation> out;
    out.reserve(k);
    for (std::size_t r = 0; r < k; ++r) {
        const std::size_t flat = order[r];
        out.push_back(Recommendation{static_cast<int>(r + 1),
                                     table.message_ids[flat / image_count],
                                     table.image_ids[flat % image_count],
                                     table.scores[flat]});
    }
    return out;
}

/// Softmax over a preference table: q = exp(p / tau) / sum, computed with
/// max-subtraction for stability.
struct RecommendationDistribution {
    std::string user_id;
    std::vector<std::string> message_ids;
    std::vector<std::string> image_ids;
    std::vector<double> probabilities;  // row-major, aligned with the table
    double temperature = 1.0;
};

inline RecommendationDistribution softmax_distribution(
    const PreferenceTable& table, double temperature = 1.0) {
    if (!(temperature > 0.0)) {
        throw ValidationError("softmax: temperature must be positive");
    }
    if (table.size() == 0) {
        throw ValidationError("softmax: empty table");
    }
    RecommendationDistribution dist;
    dist.user_id = table.user_id;
    dist.message_ids = table.message_ids;
    dist.image_ids = table.image_ids;
    dist.temperature = temperature;

    const double max_score =
        *std::max_element(table.scores.begin(), table.scores.end());
    dist.probabilities.reserve(table.size());
    double sum = 0.0;
    for (double s : table.scores) {
        const double e = std::exp((s - max_score) / temperature);
        dist.probabilities.push_back(e);
        sum += e;
    }
    for (double& p : dist.probabilities) p /= sum;
    return dist;
}

/// Inverse-CDF sample over pairs in (message id, image id) order;
/// reproducible for a given seed.
inline std::pair<std::string, std::string> sample_recommendation(
    const RecommendationDistribution& dist, std::uint64_t seed) {
    rng::SplitMix64 gen(seed);
    const double u = gen.next_unit();
    const std::size_t image_count = dist.image_ids.size();
    double cumulative = 0.0;
    for (std::size_t flat = 0; flat < dist.probabilities.size(); ++flat) {
        cumulative += dist.probabilities[flat];
        if (u <= cumulative) {
            return {dist.message_ids[flat / image_count],
                    dist.image_ids[flat % image_count]};
        }
    }
    // Roundoff left the CDF a hair short of 1; take the last pair.
    return {dist.message_ids.back(), dist.image_ids.back()};
}

}  // namespace nudgekit
