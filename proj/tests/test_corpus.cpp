#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "nudgekit/corpus.hpp"
#include "support.hpp"

using namespace nudgekit;

namespace {

Corpus load_fixture_corpus() {
    const auto data = testsupport::data_dir();
    return load_corpus(data / "users.csv", data / "messages.csv",
                       data / "images.csv");
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

}  // namespace

TEST_CASE("shipped fixtures load with the documented counts") {
    const auto corpus = load_fixture_corpus();
    REQUIRE(corpus.users.size() == 20);
    REQUIRE(corpus.messages.size() == 40);
    REQUIRE(corpus.images.size() == 50);
    REQUIRE(corpus.messages.size() * corpus.images.size() == 2000);
}

TEST_CASE("first fixture user matches the canonical example") {
    const auto corpus = load_fixture_corpus();
    const auto& u = corpus.users.front();
    REQUIRE(u.id == "user_01");
    REQUIRE(u.gender == "female");
    REQUIRE(u.age == 23);
    REQUIRE(u.race == "white");
    REQUIRE(u.likes == std::set<std::string>{"active", "outdoors", "learning"});
    REQUIRE(u.dislikes ==
            std::set<std::string>{"mental", "crafts", "homemaking"});
}

TEST_CASE("ids are stable strings assigned from row order") {
    const auto corpus = load_fixture_corpus();
    REQUIRE(corpus.users[2].id == "user_03");
    REQUIRE(corpus.messages[16].id == "msg_17");
    REQUIRE(corpus.images[41].id == "img_42");
    REQUIRE(corpus.images.back().id == "img_50");
}

TEST_CASE("fixture captions include the canonical examples") {
    const auto corpus = load_fixture_corpus();
    REQUIRE(corpus.images[0].caption ==
            "senior, white, male, holding a book, walking");
    const auto& meditating = corpus.images[4];
    REQUIRE(meditating.caption == "woman, adult, afro-american, meditating, yoga");
    REQUIRE(meditating.age_band == AgeBand::adult);
    REQUIRE(meditating.race == "afro-american");
    REQUIRE(meditating.gender == "female");
}

TEST_CASE("ambiguous images have empty tags; unknown fields parse") {
    const auto corpus = load_fixture_corpus();
    const auto& sky = corpus.image_by_id("img_23");
    REQUIRE(sky.ambiguous());
    const auto& faceless = corpus.image_by_id("img_21");
    REQUIRE(faceless.gender == "unknown");
    REQUIRE(faceless.age_band == AgeBand::unknown);
    REQUIRE(faceless.race == "unknown");
    REQUIRE_FALSE(faceless.ambiguous());
}

TEST_CASE("age banding: young 18-34, adult 35-54, senior 55+") {
    REQUIRE(age_band_for(18) == AgeBand::young);
    REQUIRE(age_band_for(34) == AgeBand::young);
    REQUIRE(age_band_for(35) == AgeBand::adult);
    REQUIRE(age_band_for(54) == AgeBand::adult);
    REQUIRE(age_band_for(55) == AgeBand::senior);
    REQUIRE(age_band_for(90) == AgeBand::senior);
    REQUIRE(age_band_for(17) == AgeBand::unknown);
}

TEST_CASE("loader rejects malformed rows with row and token context") {
    testsupport::TempDir tmp("corpusbad");

    SECTION("like/dislike overlap") {
        const auto path = tmp.path() / "users.csv";
        write_file(path,
                   "Gender,Age,Race,Likes,Dislikes\n"
                   "female,30,white,arts,arts\n");
        try {
            load_users(path);
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            const std::string what = e.what();
            REQUIRE(what.find("arts") != std::string::npos);
            REQUIRE(what.find("row 1") != std::string::npos);
        }
    }

    SECTION("unknown activity token names the row and token") {
        const auto path = tmp.path() / "users.csv";
        write_file(path,
                   "Gender,Age,Race,Likes,Dislikes\n"
                   "male,40,asian,active,mental\n"
                   "female,25,white,swiming,crafts\n");
        try {
            load_users(path);
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            const std::string what = e.what();
            REQUIRE(what.find("swiming") != std::string::npos);
            REQUIRE(what.find("row 2") != std::string::npos);
        }
    }

    SECTION("non-integer age") {
        const auto path = tmp.path() / "users.csv";
        write_file(path,
                   "Gender,Age,Race,Likes,Dislikes\n"
                   "male,forty,asian,active,mental\n");
        REQUIRE_THROWS_AS(load_users(path), ValidationError);
    }

    SECTION("empty message text") {
        const auto path = tmp.path() / "messages.csv";
        write_file(path, "Message,Tags\n,active\n");
        REQUIRE_THROWS_AS(load_messages(path), ValidationError);
    }

    SECTION("unknown tag on an image") {
        const auto path = tmp.path() / "images.csv";
        write_file(path,
                   "Caption,Gender,Age,Race,Tags\n"
                   "\"a person\",unknown,unknown,unknown,snowboarding\n");
        REQUIRE_THROWS_AS(load_images(path), ValidationError);
    }

    SECTION("missing file is an I/O error") {
        REQUIRE_THROWS_AS(load_users(tmp.path() / "nope.csv"), IoError);
    }
}

TEST_CASE("validate_corpus is clean on the shipped fixtures") {
    const auto corpus = load_fixture_corpus();
    const auto report =
        validate_corpus(corpus.users, corpus.messages, corpus.images);
    CAPTURE(report.failures, report.warnings);
    REQUIRE(report.ok());
    REQUIRE(report.warnings.empty());
    REQUIRE(report.user_count == 20);
    for (const auto& [activity, count] : report.message_tag_coverage) {
        INFO("activity " << activity);
        REQUIRE(count >= 1);
    }
    const auto as_json = report.to_json();
    REQUIRE(as_json.at("pair_count") == 2000);
    REQUIRE(as_json.at("ok") == true);
}

TEST_CASE("validate_corpus flags duplicates and coverage gaps") {
    auto corpus = load_fixture_corpus();
    corpus.messages[1].id = corpus.messages[0].id;
    auto report = validate_corpus(corpus.users, corpus.messages, corpus.images);
    REQUIRE_FALSE(report.ok());
    REQUIRE(report.failures.size() == 1);
    REQUIRE(report.failures[0].find("duplicate message id") !=
            std::string::npos);

    // Remove every crafts message: coverage warning, not a failure.
    auto pruned = load_fixture_corpus();
    std::erase_if(pruned.messages, [](const Message& m) {
        return m.activity_tags.count("crafts") > 0;
    });
    report = validate_corpus(pruned.users, pruned.messages, pruned.images);
    REQUIRE(report.ok());
    REQUIRE(report.warnings.size() == 1);
    REQUIRE(report.warnings[0].find("crafts") != std::string::npos);
}

TEST_CASE("catalogs survive a save/load round trip") {
    testsupport::TempDir tmp("roundtrip");
    const auto corpus = load_fixture_corpus();

    save_users(corpus.users, tmp.path() / "users.csv");
    save_messages(corpus.messages, tmp.path() / "messages.csv");
    save_images(corpus.images, tmp.path() / "images.csv");

    const auto reloaded =
        load_corpus(tmp.path() / "users.csv", tmp.path() / "messages.csv",
                    tmp.path() / "images.csv");
    REQUIRE(reloaded.users.size() == corpus.users.size());
    for (std::size_t i = 0; i < corpus.users.size(); ++i) {
        REQUIRE(reloaded.users[i].id == corpus.users[i].id);
        REQUIRE(reloaded.users[i].gender == corpus.users[i].gender);
        REQUIRE(reloaded.users[i].age == corpus.users[i].age);
        REQUIRE(reloaded.users[i].race == corpus.users[i].race);
        REQUIRE(reloaded.users[i].likes == corpus.users[i].likes);
        REQUIRE(reloaded.users[i].dislikes == corpus.users[i].dislikes);
    }
    for (std::size_t i = 0; i < corpus.messages.size(); ++i) {
        REQUIRE(reloaded.messages[i].text == corpus.messages[i].text);
        REQUIRE(reloaded.messages[i].activity_tags ==
                corpus.messages[i].activity_tags);
    }
    for (std::size_t i = 0; i < corpus.images.size(); ++i) {
        REQUIRE(reloaded.images[i].caption == corpus.images[i].caption);
        REQUIRE(reloaded.images[i].gender == corpus.images[i].gender);
        REQUIRE(reloaded.images[i].age_band == corpus.images[i].age_band);
        REQUIRE(reloaded.images[i].race == corpus.images[i].race);
        REQUIRE(reloaded.images[i].activity_tags ==
                corpus.images[i].activity_tags);
    }
}

TEST_CASE("every annotation tag belongs to the known vocabularies") {
    const auto corpus = load_fixture_corpus();
    for (const auto& u : corpus.users) {
        for (const auto& tag : u.likes) REQUIRE(is_activity(tag));
        for (const auto& tag : u.dislikes) REQUIRE(is_activity(tag));
    }
    for (const auto& m : corpus.messages) {
        for (const auto& tag : m.activity_tags) REQUIRE(is_activity(tag));
    }
    for (const auto& i : corpus.images) {
        for (const auto& tag : i.activity_tags) REQUIRE(is_activity(tag));
    }
}

TEST_CASE("activity vocabulary is exactly the 12 lowercase types") {
    const auto& vocab = activity_vocabulary();
    REQUIRE(vocab.size() == 12);
    std::set<std::string> unique(vocab.begin(), vocab.end());
    REQUIRE(unique.size() == 12);
    for (const auto& v : vocab) {
        REQUIRE(detail::to_lower(v) == v);
    }
}
