#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "nudgekit/corpus.hpp"
#include "nudgekit/matching.hpp"

namespace nudgekit {

// Appropriateness rubric over annotated fixtures:
//   condition 1 - the message's activity aligns with the image;
//   condition 2 - the message's activity matches one of the user's likes;
//   condition 3 - the image's subject matches >= 2 of gender/age/race.
// Appropriate   = cond1 and (cond2 or cond3), without a dislike hit.
// Inappropriate = not cond1, or the message hits a dislike (a dislike hit
//                 overrides an otherwise-appropriate verdict).
// Neutral       = everything else.

enum class VerdictClass { appropriate, inappropriate, neutral };

inline std::string to_string(VerdictClass v) {
    switch (v) {
        case VerdictClass::appropriate: return "appropriate";
        case VerdictClass::inappropriate: return "inappropriate";
        case VerdictClass::neutral: return "neutral";
    }
    return "?";
}

struct RecommendationVerdict {
    std::string user_id;
    std::string message_id;
    std::string image_id;
    bool cond1_aligned = false;
    bool cond2_likes = false;
    bool cond3_demographics = false;
    bool dislike_hit = false;
    VerdictClass verdict = VerdictClass::neutral;
};

/// Condition 1. Ambiguous images (no activity tags) count as aligned with
/// any message.
inline bool check_alignment(const Message& message, const ImageItem& image) {
    if (image.ambiguous()) return true;
    for (const auto& tag : message.activity_tags) {
        if (image.activity_tags.count(tag)) return true;
    }
    return false;
}

/// Condition 2.
inline bool check_likes(const Message& message, const User& user) {
    for (const auto& tag : message.activity_tags) {
        if (user.likes.count(tag)) return true;
    }
    return false;
}

inline bool check_dislike_hit(const Message& message, const User& user) {
    for (const auto& tag : message.activity_tags) {
        if (user.dislikes.count(tag)) return true;
    }
    return false;
}

/// Condition 3: at least two of {gender, age band, race} match. Unknown
/// image fields never match.
inline bool check_demographics(const ImageItem& image, const User& user) {
    int matches = 0;
    if (image.gender != "unknown" && image.gender == user.gender) ++matches;
    if (image.age_band != AgeBand::unknown &&
        image.age_band == age_band_for(user.age)) {
        ++matches;
    }
    if (image.race != "unknown" &&
        detail::to_lower(image.race) == detail::to_lower(user.race)) {
        ++matches;
    }
    return matches >= 2;
}

inline RecommendationVerdict classify(const User& user, const Message& message,
                                      const ImageItem& image) {
    RecommendationVerdict v;
    v.user_id = user.id;
    v.message_id = message.id;
    v.image_id = image.id;
    v.cond1_aligned = check_alignment(message, image);
    v.cond2_likes = check_likes(message, user);
    v.cond3_demographics = check_demographics(image, user);
    v.dislike_hit = check_dislike_hit(message, user);
    if (!v.cond1_aligned || v.dislike_hit) {
        v.verdict = VerdictClass::inappropriate;
    } else if (v.cond2_likes || v.cond3_demographics) {
        v.verdict = VerdictClass::appropriate;
    } else {
        v.verdict = VerdictClass::neutral;
    }
    return v;
}

struct UserEvaluation {
    std::string user_id;
    std::vector<RecommendationVerdict> verdicts;
};

struct EvaluationReport {
    int k = 0;
    std::vector<UserEvaluation> per_user;
    double appropriate_rate = 0.0;
    double inappropriate_rate = 0.0;
    double neutral_rate = 0.0;

    std::size_t verdict_count() const {
        std::size_t n = 0;
        for (const auto& u : per_user) n += u.verdicts.size();
        return n;
    }

    nlohmann::json to_json() const {
        nlohmann::json users = nlohmann::json::array();
        for (const auto& u : per_user) {
            nlohmann::json verdicts = nlohmann::json::array();
            for (const auto& v : u.verdicts) {
                verdicts.push_back({{"message_id", v.message_id},
                                    {"image_id", v.image_id},
                                    {"cond1_aligned", v.cond1_aligned},
                                    {"cond2_likes", v.cond2_likes},
                                    {"cond3_demographics", v.cond3_demographics},
                                    {"dislike_hit", v.dislike_hit},
                                    {"class", to_string(v.verdict)}});
            }
            users.push_back({{"user_id", u.user_id}, {"verdicts", verdicts}});
        }
        return nlohmann::json{{"k", k},
                              {"verdict_count", verdict_count()},
                              {"appropriate_rate", appropriate_rate},
                              {"inappropriate_rate", inappropriate_rate},
                              {"neutral_rate", neutral_rate},
                              {"per_user", users}};
    }

    /// Human-readable per-user table with one glyph column per condition.
    std::string to_markdown() const {
        std::string out;
        out += "| user | rank | message | image | aligned | likes | demo | "
               "dislike | class |\n";
        out += "|------|------|---------|-------|---------|-------|------|"
               "---------|-------|\n";
        auto glyph = [](bool b) { return b ? std::string("✓") : std::string("✗"); };
        for (const auto& u : per_user) {
            int rank = 0;
            for (const auto& v : u.verdicts) {
                ++rank;
                out += "| " + u.user_id + " | " + std::to_string(rank) + " | " +
                       v.message_id + " | " + v.image_id + " | " +
                       glyph(v.cond1_aligned) + " | " + glyph(v.cond2_likes) +
                       " | " + glyph(v.cond3_demographics) + " | " +
                       glyph(v.dislike_hit) + " | " + to_string(v.verdict) +
                       " |\n";
            }
        }
        return out;
    }
};

/// Classify every recommended (message, image) pair per user and aggregate
/// the run-level rates.
inline EvaluationReport evaluate_run(
    const Corpus& corpus,
    const std::map<std::string, std::vector<Recommendation>>& per_user_topk,
    int k) {
    if (per_user_topk.empty()) {
        throw ValidationError("evaluate_run: no recommendations to evaluate");
    }
    EvaluationReport report;
    report.k = k;
    std::size_t appropriate = 0, inappropriate = 0, neutral = 0;
    for (const auto& [user_id, recommendations] : per_user_topk) {
        const User& user = corpus.user_by_id(user_id);
        UserEvaluation ue;
        ue.user_id = user_id;
        for (const auto& rec : recommendations) {
            const auto verdict =
                classify(user, corpus.message_by_id(rec.message_id),
                         corpus.image_by_id(rec.image_id));
            switch (verdict.verdict) {
                case VerdictClass::appropriate: ++appropriate; break;
                case VerdictClass::inappropriate: ++inappropriate; break;
                case VerdictClass::neutral: ++neutral; break;
            }
            ue.verdicts.push_back(verdict);
        }
        report.per_user.push_back(std::move(ue));
    }
    const double total =
        static_cast<double>(appropriate + inappropriate + neutral);
    report.appropriate_rate = static_cast<double>(appropriate) / total;
    report.inappropriate_rate = static_cast<double>(inappropriate) / total;
    report.neutral_rate = static_cast<double>(neutral) / total;
    return report;
}

}  // namespace nudgekit
