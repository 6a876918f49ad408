#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "nudgekit/providers.hpp"
#include "support.hpp"

using namespace nudgekit;

TEST_CASE("mock embeddings are deterministic and unit-norm") {
    MockEmbedder embedder(MockMode::tag_aware, 42);

    const auto first = embed_text("active", embedder);
    const auto second = embed_text("active", embedder);
    REQUIRE(first.values == second.values);  // bit-identical
    REQUIRE(first.dimension() == kDefaultDimension);
    REQUIRE(is_unit_norm(first));

    // A separate instance with the same parameters is the same function.
    MockEmbedder twin(MockMode::tag_aware, 42);
    REQUIRE(embed_text("active", twin).values == first.values);

    // Different seed, different vector.
    MockEmbedder other_seed(MockMode::tag_aware, 7);
    REQUIRE(embed_text("active", other_seed).values != first.values);

    const auto hashed = mock_embed("23 year old white female", 42, MockMode::hash);
    REQUIRE(is_unit_norm(hashed));
    REQUIRE(hashed.dimension() == 1536);
}

TEST_CASE("renormalizing a returned vector changes it negligibly") {
    MockEmbedder embedder(MockMode::tag_aware, 42);
    const auto v = embed_text("outdoors exploration", embedder);

    // Independent norm via long-double accumulation.
    long double sum = 0.0L;
    for (double x : v.values) sum += static_cast<long double>(x) * x;
    const double norm = static_cast<double>(std::sqrt(sum));
    REQUIRE(std::abs(norm - 1.0) < 1e-9);

    auto renormalized = v.values;
    for (double& x : renormalized) x /= norm;
    double max_change = 0.0;
    for (std::size_t i = 0; i < v.values.size(); ++i) {
        max_change = std::max(max_change, std::abs(renormalized[i] - v.values[i]));
    }
    REQUIRE(max_change < 1e-6);
}

TEST_CASE("empty or blank text is rejected") {
    MockEmbedder embedder(MockMode::hash, 1);
    REQUIRE_THROWS_AS(embed_text("", embedder), ValidationError);
    REQUIRE_THROWS_AS(embed_text("   \t ", embedder), ValidationError);
}

TEST_CASE("embed_batch preserves order and matches embed_text element-wise") {
    MockEmbedder embedder(MockMode::tag_aware, 42);

    REQUIRE(embed_batch({}, embedder).empty());

    const std::vector<std::string> texts = {"a", "b"};
    const auto batch = embed_batch(texts, embedder);
    REQUIRE(batch.size() == 2);
    REQUIRE(batch[0].values == embed_text("a", embedder).values);
    REQUIRE(batch[1].values == embed_text("b", embedder).values);

    // Failure carries the offending index.
    try {
        embed_batch({"ok", "", "ok"}, embedder);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        REQUIRE(std::string(e.what()).find("index 1") != std::string::npos);
    }
}

TEST_CASE("tag_aware embeddings reflect shared tags") {
    MockEmbedder embedder(MockMode::tag_aware, 42);
    const auto a = embed_text("active outdoors", embedder);
    const auto b = embed_text("active indoors", embedder);
    const auto c = embed_text("crafts relaxation", embedder);

    const double shared = vec::dot(a.values, b.values);
    const double disjoint = vec::dot(a.values, c.values);
    REQUIRE(shared > disjoint);
    REQUIRE(shared > 0.3);          // one of two tags shared
    REQUIRE(std::abs(disjoint) < 0.2);  // no tags shared
}

TEST_CASE("tag extraction is case-sensitive only for modality tokens") {
    MockEmbedder embedder(MockMode::tag_aware, 42);
    const auto tags = embedder.extract_tags(
        "An Active senior, afro-american, loves Learning and MESSAGE boards");
    REQUIRE(tags.count("active") == 1);
    REQUIRE(tags.count("senior") == 1);
    REQUIRE(tags.count("afro-american") == 1);
    REQUIRE(tags.count("learning") == 1);
    REQUIRE(tags.count("MESSAGE") == 1);
    // lowercase "message" is ordinary prose, not the modality token
    REQUIRE(embedder.extract_tags("a message about nothing").empty());
}

TEST_CASE("modality bias token shifts every embedding of that backend") {
    MockEmbedder plain(MockMode::tag_aware, 42, 256);
    MockEmbedder biased(MockMode::tag_aware, 42, 256, "IMAGE");
    MockEmbedder biased_too(MockMode::tag_aware, 42, 256, "IMAGE");

    const auto a = embed_text("crafts", biased);
    const auto b = embed_text("relaxation", biased_too);
    const auto a_plain = embed_text("crafts", plain);
    const auto b_plain = embed_text("relaxation", plain);
    // Shared bias direction pulls unrelated texts together.
    REQUIRE(vec::dot(a.values, b.values) >
            vec::dot(a_plain.values, b_plain.values) + 0.2);

    REQUIRE_THROWS_AS(MockEmbedder(MockMode::tag_aware, 42, 256, "bogus"),
                      ConfigError);
}

TEST_CASE("hash embeddings of distinct texts are near-orthogonal") {
    MockEmbedder embedder(MockMode::hash, 42);
    std::vector<std::string> texts;
    for (int i = 0; i < 1000; ++i) {
        texts.push_back("probe text #" + std::to_string(i));
    }
    const auto vectors = embedder.embed_many(texts);
    double worst = 0.0;
    for (int pair = 0; pair + 1 < 1000; pair += 2) {
        worst = std::max(worst, std::abs(vec::dot(vectors[pair].values,
                                                  vectors[pair + 1].values)));
    }
    REQUIRE(worst < 0.15);
}

TEST_CASE("cache: miss computes and persists, hit skips the inner backend") {
    testsupport::TempDir tmp("cache");
    const auto cache_file = (tmp.path() / "embeddings.jsonl").string();

    auto counter = std::make_shared<testsupport::CountingEmbedder>(
        std::make_shared<MockEmbedder>(MockMode::tag_aware, 42, 64));

    CachingEmbedder cache(counter, cache_file);
    const auto miss = embed_text("active outdoors", cache);
    REQUIRE(counter->texts_embedded() == 1);
    const auto hit = embed_text("active outdoors", cache);
    REQUIRE(counter->texts_embedded() == 1);  // no recomputation
    REQUIRE(miss.values == hit.values);

    // A new cache instance over the same file serves the stored vector
    // bit-exactly without touching the inner backend.
    auto counter2 = std::make_shared<testsupport::CountingEmbedder>(
        std::make_shared<MockEmbedder>(MockMode::tag_aware, 42, 64));
    CachingEmbedder reloaded(counter2, cache_file);
    const auto from_disk = embed_text("active outdoors", reloaded);
    REQUIRE(counter2->texts_embedded() == 0);
    REQUIRE(from_disk.values == miss.values);
}

TEST_CASE("cache keys include the model name") {
    testsupport::TempDir tmp("cachekeys");
    const auto cache_file = (tmp.path() / "embeddings.jsonl").string();
    {
        CachingEmbedder cache(
            std::make_shared<MockEmbedder>(MockMode::hash, 42, 64), cache_file);
        embed_text("same text", cache);
        REQUIRE(cache.entry_count() == 1);
    }
    {
        CachingEmbedder cache(
            std::make_shared<MockEmbedder>(MockMode::tag_aware, 42, 64),
            cache_file);
        embed_text("same text", cache);
        REQUIRE(cache.entry_count() == 2);  // mock-hash + mock-tag-aware
    }
}

TEST_CASE("corrupt cache lines are evicted and recomputed") {
    testsupport::TempDir tmp("cachecorrupt");
    const auto cache_file = (tmp.path() / "embeddings.jsonl").string();

    auto inner = std::make_shared<MockEmbedder>(MockMode::hash, 42, 16);
    {
        CachingEmbedder cache(inner, cache_file);
        embed_text("keep me", cache);
        embed_text("break me", cache);
    }
    // Mangle the second record and append plain garbage.
    {
        std::ifstream in(cache_file);
        std::string first_line, second_line;
        std::getline(in, first_line);
        std::getline(in, second_line);
        in.close();
        std::ofstream out(cache_file, std::ios::trunc);
        out << first_line << "\n";
        out << second_line.substr(0, second_line.size() / 2) << "\n";
        out << "not json at all\n";
    }
    auto counter = std::make_shared<testsupport::CountingEmbedder>(inner);
    CachingEmbedder cache(counter, cache_file);
    REQUIRE(cache.entry_count() == 1);  // corrupt entries dropped
    const auto recomputed = embed_text("break me", cache);
    REQUIRE(counter->texts_embedded() == 1);
    REQUIRE(recomputed.values == embed_text("break me", *inner).values);
}

TEST_CASE("cache round-trip preserves vectors bit-exactly") {
    testsupport::TempDir tmp("cacheexact");
    const auto cache_file = (tmp.path() / "embeddings.jsonl").string();
    auto inner = std::make_shared<MockEmbedder>(MockMode::tag_aware, 42, 1536);

    std::vector<std::string> texts = {"crafts indoors", "42 year old asian male",
                                      "a person outdoors, relaxation"};
    std::vector<EmbeddingVector> computed;
    {
        CachingEmbedder cache(inner, cache_file);
        computed = embed_batch(texts, cache);
    }
    CachingEmbedder reloaded(inner, cache_file);
    const auto restored = embed_batch(texts, reloaded);
    REQUIRE(reloaded.hit_count() == texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        REQUIRE(restored[i].values == computed[i].values);
    }
}

TEST_CASE("duplicate texts within one batch are computed once") {
    testsupport::TempDir tmp("cachedup");
    auto counter = std::make_shared<testsupport::CountingEmbedder>(
        std::make_shared<MockEmbedder>(MockMode::hash, 1, 32));
    CachingEmbedder cache(counter, (tmp.path() / "c.jsonl").string());
    const auto out = embed_batch({"x", "y", "x"}, cache);
    REQUIRE(counter->texts_embedded() == 2);
    REQUIRE(out[0].values == out[2].values);
}

TEST_CASE("provider config is validated") {
    ProviderConfig config;
    config.batch_size = 0;
    REQUIRE_THROWS_AS(config.validate(), ConfigError);
    config.batch_size = 4;
    config.timeout_seconds = 0.0;
    REQUIRE_THROWS_AS(config.validate(), ConfigError);
}
