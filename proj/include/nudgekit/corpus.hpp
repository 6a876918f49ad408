#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "nudgekit/csv.hpp"
#include "nudgekit/errors.hpp"
#include "nudgekit/ioutil.hpp"

namespace nudgekit {

/// The fixed 12 broad activity types every like/dislike and annotation tag
/// must belong to.
inline const std::array<std::string, 12>& activity_vocabulary() {
    static const std::array<std::string, 12> vocab = {
        "active",  "passive",     "indoors",    "outdoors",
        "mental",  "physical",    "arts",       "crafts",
        "exploration", "relaxation", "learning", "homemaking"};
    return vocab;
}

inline bool is_activity(const std::string& tag) {
    const auto& vocab = activity_vocabulary();
    return std::find(vocab.begin(), vocab.end(), tag) != vocab.end();
}

inline const std::array<std::string, 2>& gender_vocabulary() {
    static const std::array<std::string, 2> vocab = {"female", "male"};
    return vocab;
}

inline const std::array<std::string, 5>& race_vocabulary() {
    static const std::array<std::string, 5> vocab = {
        "white", "black", "afro-american", "asian", "hispanic"};
    return vocab;
}

enum class AgeBand { young, adult, senior, unknown };

inline std::string to_string(AgeBand band) {
    switch (band) {
        case AgeBand::young: return "young";
        case AgeBand::adult: return "adult";
        case AgeBand::senior: return "senior";
        case AgeBand::unknown: return "unknown";
    }
    return "unknown";
}

inline AgeBand age_band_from_string(const std::string& text) {
    if (text == "young") return AgeBand::young;
    if (text == "adult") return AgeBand::adult;
    if (text == "senior") return AgeBand::senior;
    if (text == "unknown" || text.empty()) return AgeBand::unknown;
    throw ValidationError("unknown age band '" + text + "'");
}

/// Band containing an integer age: young 18-34, adult 35-54, senior 55+.
inline AgeBand age_band_for(int age) {
    if (age >= 55) return AgeBand::senior;
    if (age >= 35) return AgeBand::adult;
    if (age >= 18) return AgeBand::young;
    return AgeBand::unknown;
}

struct User {
    std::string id;
    std::string gender;
    int age = 0;
    std::string race;
    std::set<std::string> likes;
    std::set<std::string> dislikes;
};

struct Message {
    std::string id;
    std::string text;
    std::set<std::string> activity_tags;  // which of the 12 types it promotes
};

struct ImageItem {
    std::string id;
    std::string caption;
    std::string gender;  // "unknown" when no visible face
    AgeBand age_band = AgeBand::unknown;
    std::string race;  // "unknown" when not identifiable
    std::set<std::string> activity_tags;  // empty == ambiguous/versatile image

    bool ambiguous() const { return activity_tags.empty(); }
};

struct Corpus {
    std::vector<User> users;
    std::vector<Message> messages;
    std::vector<ImageItem> images;

    const Message& message_by_id(const std::string& id) const {
        for (const auto& m : messages) {
            if (m.id == id) return m;
        }
        throw NotFoundError("no message with id '" + id + "'");
    }

    const ImageItem& image_by_id(const std::string& id) const {
        for (const auto& i : images) {
            if (i.id == id) return i;
        }
        throw NotFoundError("no image with id '" + id + "'");
    }

    const User& user_by_id(const std::string& id) const {
        for (const auto& u : users) {
            if (u.id == id) return u;
        }
        throw NotFoundError("no user with id '" + id + "'");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

inline std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

/// Split a semicolon-separated multi-valued cell.
inline std::vector<std::string> split_list(const std::string& cell) {
    std::vector<std::string> out;
    std::string item;
    for (char c : cell) {
        if (c == ';') {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
            item.clear();
        } else {
            item.push_back(c);
        }
    }
    item = trim(item);
    if (!item.empty()) out.push_back(item);
    return out;
}

inline std::string join_list(const std::set<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) out.push_back(';');
        out += item;
    }
    return out;
}

inline std::string row_id(const char* prefix, std::size_t row) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_%02zu", prefix, row);
    return buf;
}

inline std::set<std::string> parse_activity_tags(const std::string& cell,
                                                 const std::string& where) {
    std::set<std::string> tags;
    for (const auto& raw : split_list(cell)) {
        const std::string tag = to_lower(raw);
        if (!is_activity(tag)) {
            throw ValidationError(where + ": unknown activity '" + raw + "'");
        }
        tags.insert(tag);
    }
    return tags;
}

}  // namespace detail

/// Load the user catalog. Expected header: Gender,Age,Race,Likes,Dislikes
/// with semicolon-separated multi-valued cells; ids are assigned from row
/// order (user_01, user_02, ...).
inline std::vector<User> load_users(const std::filesystem::path& path) {
    const auto table = csv::read_file(path);
    const auto gender_col = table.column("Gender");
    const auto age_col = table.column("Age");
    const auto race_col = table.column("Race");
    const auto likes_col = table.column("Likes");
    const auto dislikes_col = table.column("Dislikes");

    std::vector<User> users;
    users.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where =
            path.filename().string() + " row " + std::to_string(r + 1);
        User user;
        user.id = detail::row_id("user", r + 1);
        user.gender = detail::to_lower(detail::trim(row[gender_col]));
        if (std::find(gender_vocabulary().begin(), gender_vocabulary().end(),
                      user.gender) == gender_vocabulary().end()) {
            throw ValidationError(where + ": unknown gender '" +
                                  row[gender_col] + "'");
        }
        const std::string age_text = detail::trim(row[age_col]);
        long age = 0;
        try {
            age = io::parse_long(age_text, "age");
        } catch (const ValidationError&) {
            throw ValidationError(where + ": non-integer age '" + age_text + "'");
        }
        if (age <= 0) {
            throw ValidationError(where + ": age must be positive");
        }
        user.age = static_cast<int>(age);
        user.race = detail::to_lower(detail::trim(row[race_col]));
        if (std::find(race_vocabulary().begin(), race_vocabulary().end(),
                      user.race) == race_vocabulary().end()) {
            throw ValidationError(where + ": unknown race '" + row[race_col] +
                                  "'");
        }
        user.likes = detail::parse_activity_tags(row[likes_col], where);
        user.dislikes = detail::parse_activity_tags(row[dislikes_col], where);
        for (const auto& like : user.likes) {
            if (user.dislikes.count(like)) {
                throw ValidationError(where + ": activity '" + like +
                                      "' appears in both likes and dislikes");
            }
        }
        users.push_back(std::move(user));
    }
    return users;
}

/// Load the message catalog. Expected header: Message,Tags.
inline std::vector<Message> load_messages(const std::filesystem::path& path) {
    const auto table = csv::read_file(path);
    const auto text_col = table.column("Message");
    const auto tags_col = table.column("Tags");

    std::vector<Message> messages;
    messages.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where =
            path.filename().string() + " row " + std::to_string(r + 1);
        Message message;
        message.id = detail::row_id("msg", r + 1);
        message.text = detail::trim(row[text_col]);
        if (message.text.empty()) {
            throw ValidationError(where + ": empty message text");
        }
        message.activity_tags = detail::parse_activity_tags(row[tags_col], where);
        if (message.activity_tags.empty()) {
            throw ValidationError(where + ": message has no activity tags");
        }
        messages.push_back(std::move(message));
    }
    return messages;
}

/// Load the image catalog. Expected header: Caption,Gender,Age,Race,Tags.
/// Demographic cells may be "unknown"; an empty Tags cell marks the image
/// as ambiguous/versatile.
inline std::vector<ImageItem> load_images(const std::filesystem::path& path) {
    const auto table = csv::read_file(path);
    const auto caption_col = table.column("Caption");
    const auto gender_col = table.column("Gender");
    const auto age_col = table.column("Age");
    const auto race_col = table.column("Race");
    const auto tags_col = table.column("Tags");

    std::vector<ImageItem> images;
    images.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where =
            path.filename().string() + " row " + std::to_string(r + 1);
        ImageItem image;
        image.id = detail::row_id("img", r + 1);
        image.caption = detail::trim(row[caption_col]);
        if (image.caption.empty()) {
            throw ValidationError(where + ": empty caption");
        }
        image.gender = detail::to_lower(detail::trim(row[gender_col]));
        if (image.gender.empty()) image.gender = "unknown";
        if (image.gender != "unknown" &&
            std::find(gender_vocabulary().begin(), gender_vocabulary().end(),
                      image.gender) == gender_vocabulary().end()) {
            throw ValidationError(where + ": unknown gender '" +
                                  row[gender_col] + "'");
        }
        try {
            image.age_band =
                age_band_from_string(detail::to_lower(detail::trim(row[age_col])));
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": " + e.what());
        }
        image.race = detail::to_lower(detail::trim(row[race_col]));
        if (image.race.empty()) image.race = "unknown";
        if (image.race != "unknown" &&
            std::find(race_vocabulary().begin(), race_vocabulary().end(),
                      image.race) == race_vocabulary().end()) {
            throw ValidationError(where + ": unknown race '" + row[race_col] +
                                  "'");
        }
        image.activity_tags = detail::parse_activity_tags(row[tags_col], where);
        images.push_back(std::move(image));
    }
    return images;
}

inline Corpus load_corpus(const std::filesystem::path& users_path,
                          const std::filesystem::path& messages_path,
                          const std::filesystem::path& images_path) {
    return Corpus{load_users(users_path), load_messages(messages_path),
                  load_images(images_path)};
}

inline void save_users(const std::vector<User>& users,
                       const std::filesystem::path& path) {
    csv::Table table;
    table.header = {"Gender", "Age", "Race", "Likes", "Dislikes"};
    for (const auto& u : users) {
        table.rows.push_back({u.gender, std::to_string(u.age), u.race,
                              detail::join_list(u.likes),
                              detail::join_list(u.dislikes)});
    }
    io::atomic_write_file(path, csv::format_table(table));
}

inline void save_messages(const std::vector<Message>& messages,
                          const std::filesystem::path& path) {
    csv::Table table;
    table.header = {"Message", "Tags"};
    for (const auto& m : messages) {
        table.rows.push_back({m.text, detail::join_list(m.activity_tags)});
    }
    io::atomic_write_file(path, csv::format_table(table));
}

inline void save_images(const std::vector<ImageItem>& images,
                        const std::filesystem::path& path) {
    csv::Table table;
    table.header = {"Caption", "Gender", "Age", "Race", "Tags"};
    for (const auto& i : images) {
        table.rows.push_back({i.caption, i.gender, to_string(i.age_band),
                              i.race, detail::join_list(i.activity_tags)});
    }
    io::atomic_write_file(path, csv::format_table(table));
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationReport {
    std::size_t user_count = 0;
    std::size_t message_count = 0;
    std::size_t image_count = 0;
    /// activity type -> number of messages carrying that tag
    std::map<std::string, std::size_t> message_tag_coverage;
    std::vector<std::string> failures;
    std::vector<std::string> warnings;

    bool ok() const { return failures.empty(); }

    nlohmann::json to_json() const {
        return nlohmann::json{
            {"user_count", user_count},
            {"message_count", message_count},
            {"image_count", image_count},
            {"pair_count", message_count * image_count},
            {"message_tag_coverage", message_tag_coverage},
            {"failures", failures},
            {"warnings", warnings},
            {"ok", ok()},
        };
    }
};

/// Cross-cutting corpus checks: duplicate ids, counts, and the activity
/// coverage matrix (every activity type reachable through >= 1 message).
inline ValidationReport validate_corpus(const std::vector<User>& users,
                                        const std::vector<Message>& messages,
                                        const std::vector<ImageItem>& images) {
    ValidationReport report;
    report.user_count = users.size();
    report.message_count = messages.size();
    report.image_count = images.size();

    auto check_duplicates = [&report](const auto& items, const char* what) {
        std::set<std::string> seen;
        for (const auto& item : items) {
            if (!seen.insert(item.id).second) {
                report.failures.push_back(std::string("duplicate ") + what +
                                          " id '" + item.id + "'");
            }
        }
    };
    check_duplicates(users, "user");
    check_duplicates(messages, "message");
    check_duplicates(images, "image");

    for (const auto& activity : activity_vocabulary()) {
        report.message_tag_coverage[activity] = 0;
    }
    for (const auto& m : messages) {
        for (const auto& tag : m.activity_tags) {
            ++report.message_tag_coverage[tag];
        }
    }
    for (const auto& [activity, count] : report.message_tag_coverage) {
        if (count == 0) {
            report.warnings.push_back("no message covers activity '" +
                                      activity + "'");
        }
    }

    if (users.empty()) report.failures.push_back("user catalog is empty");
    if (messages.empty()) report.failures.push_back("message catalog is empty");
    if (images.empty()) report.failures.push_back("image catalog is empty");

    return report;
}

}  // namespace nudgekit
