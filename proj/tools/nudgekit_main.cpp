#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nudgekit/config.hpp"
#include "nudgekit/engine.hpp"
#include "nudgekit/remote.hpp"

// Command-line driver. Stages are composable with file handoffs under the
// output directory:
//   validate  -> validation.json
//   embed     -> representations.json (+ optional embedding cache)
//   recommend -> recommendations.csv / recommendations.json
//   evaluate  -> evaluation.json / evaluation.md
//   diagnose  -> pca_points.csv / cluster_stats.json
//
// Exit codes: 0 success, 1 validation failure, 2 I/O failure, 3 provider
// failure.

namespace {

using nudgekit::RunConfig;

struct CliOverrides {
    std::optional<std::string> config_path;
    std::optional<std::string> users, messages, images;
    std::optional<int> k;
    std::optional<std::uint64_t> seed;
    std::optional<double> temperature;
    std::optional<std::string> provider;
    std::optional<std::string> out;
    std::optional<std::string> cache_path;
    std::optional<std::string> endpoint;
    std::optional<std::string> model;
    std::optional<std::string> mock_mode;
    std::optional<std::uint64_t> mock_seed;
    std::optional<std::size_t> dimension;
};

RunConfig resolve_config(const CliOverrides& cli) {
    RunConfig config = cli.config_path
                           ? nudgekit::load_run_config(*cli.config_path)
                           : RunConfig{};
    if (cli.users) config.data.users = *cli.users;
    if (cli.messages) config.data.messages = *cli.messages;
    if (cli.images) config.data.images = *cli.images;
    if (cli.k) config.k = *cli.k;
    if (cli.seed) config.seed = *cli.seed;
    if (cli.temperature) config.temperature = *cli.temperature;
    if (cli.provider) {
        config.provider.kind =
            nudgekit::detail::backend_kind_from_string(*cli.provider);
    }
    if (cli.out) config.output_dir = *cli.out;
    if (cli.cache_path) config.provider.cache_path = *cli.cache_path;
    if (cli.endpoint) config.provider.endpoint = *cli.endpoint;
    if (cli.model) config.provider.model = *cli.model;
    if (cli.mock_mode) {
        config.provider.mock_mode =
            nudgekit::detail::mock_mode_from_string(*cli.mock_mode);
    }
    if (cli.mock_seed) config.provider.mock_seed = *cli.mock_seed;
    if (cli.dimension) config.provider.dimension = *cli.dimension;
    return config;
}

int cmd_validate(const RunConfig& config) {
    const auto corpus = nudgekit::load_corpus(
        config.data.users, config.data.messages, config.data.images);
    const auto report =
        nudgekit::validate_corpus(corpus.users, corpus.messages, corpus.images);
    nudgekit::io::atomic_write_file(config.output_dir / "validation.json",
                                    report.to_json().dump(2) + "\n");
    std::cout << "corpus: " << report.user_count << " users, "
              << report.message_count << " messages, " << report.image_count
              << " images (" << report.message_count * report.image_count
              << " pairs per user)\n";
    for (const auto& warning : report.warnings) {
        std::cout << "warning: " << warning << "\n";
    }
    for (const auto& failure : report.failures) {
        std::cerr << "failure: " << failure << "\n";
    }
    std::cout << (report.ok() ? "validation passed" : "validation FAILED")
              << "\n";
    return report.ok() ? 0 : 1;
}

int cmd_embed(const RunConfig& config) {
    const auto corpus = nudgekit::load_corpus(
        config.data.users, config.data.messages, config.data.images);
    auto embedder = nudgekit::make_embedder(config.provider);
    const auto representations =
        nudgekit::represent_corpus(corpus, *embedder, config.user_weights);
    nudgekit::save_representations(representations,
                                   config.output_dir / "representations.json");
    std::cout << "embedded " << representations.size() << " items (dimension "
              << embedder->dimension() << ", model " << embedder->model_name()
              << ")\n";
    if (auto* cache = dynamic_cast<nudgekit::CachingEmbedder*>(embedder.get())) {
        std::cout << "cache: " << cache->entry_count() << " entries, "
                  << cache->hit_count() << " hits, " << cache->miss_count()
                  << " misses\n";
    }
    return 0;
}

int cmd_recommend(const RunConfig& config, const std::string& user_filter,
                  bool sample) {
    const auto representations = nudgekit::load_representations(
        config.output_dir / "representations.json");
    auto sets = nudgekit::center_all(representations);
    if (user_filter != "all") {
        auto& items = sets.users.items;
        // Centering stays over the full user set; the filter only narrows
        // whose tables get computed.
        const auto match = sets.users.by_id(user_filter);
        items.assign(1, match);
    }
    const auto recommendations =
        sample ? nudgekit::sample_all(sets, config.preference_weights,
                                      config.temperature, config.seed)
               : nudgekit::recommend_all(sets, config.preference_weights,
                                         static_cast<std::size_t>(config.k));
    nudgekit::save_recommendations(recommendations,
                                   config.output_dir / "recommendations.csv");
    nlohmann::json as_json = nlohmann::json::array();
    std::size_t rows = 0;
    for (const auto& [user_id, recs] : recommendations) {
        for (const auto& rec : recs) {
            as_json.push_back({{"user_id", user_id},
                               {"message_id", rec.message_id},
                               {"image_id", rec.image_id},
                               {"score", rec.score},
                               {"rank", rec.rank}});
            ++rows;
        }
    }
    nudgekit::io::atomic_write_file(config.output_dir / "recommendations.json",
                                    as_json.dump(2) + "\n");
    std::cout << (sample ? "sampled " : "ranked ") << rows
              << " recommendations for " << recommendations.size()
              << " user(s)\n";
    return 0;
}

int cmd_evaluate(const RunConfig& config) {
    const auto corpus = nudgekit::load_corpus(
        config.data.users, config.data.messages, config.data.images);
    const auto recommendations = nudgekit::load_recommendations(
        config.output_dir / "recommendations.csv");
    const auto report =
        nudgekit::evaluate_run(corpus, recommendations, config.k);
    nudgekit::io::atomic_write_file(config.output_dir / "evaluation.json",
                                    report.to_json().dump(2) + "\n");
    nudgekit::io::atomic_write_file(config.output_dir / "evaluation.md",
                                    report.to_markdown());
    std::cout << "evaluated " << report.verdict_count()
              << " recommendations: " << report.appropriate_rate * 100.0
              << "% appropriate, " << report.inappropriate_rate * 100.0
              << "% inappropriate, " << report.neutral_rate * 100.0
              << "% neutral\n";
    return 0;
}

int cmd_diagnose(const RunConfig& config) {
    const auto representations = nudgekit::load_representations(
        config.output_dir / "representations.json");
    const auto sets = nudgekit::center_all(representations);
    nudgekit::emit_plot_data(nudgekit::build_plot_points(representations, sets),
                             config.output_dir / "pca_points.csv");

    const auto uncentered_stats =
        nudgekit::cluster_stats(nudgekit::vectors_by_modality(representations));
    std::vector<nudgekit::Representation> centered;
    for (const auto* set : {&sets.users, &sets.messages, &sets.images}) {
        for (const auto& item : set->items) {
            centered.push_back(
                nudgekit::Representation{item.id, set->modality, item.vector});
        }
    }
    const auto centered_stats =
        nudgekit::cluster_stats(nudgekit::vectors_by_modality(centered));
    nlohmann::json stats = {{"uncentered", uncentered_stats.to_json()},
                            {"centered", centered_stats.to_json()}};
    nudgekit::io::atomic_write_file(config.output_dir / "cluster_stats.json",
                                    stats.dump(2) + "\n");
    std::cout << "wrote pca_points.csv (" << representations.size() * 2
              << " points) and cluster_stats.json\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zero-shot multimodal nudge recommender"};
    app.require_subcommand(1);

    CliOverrides cli;
    app.add_option("--config", cli.config_path, "JSON config file");
    app.add_option("--users", cli.users, "users CSV path");
    app.add_option("--messages", cli.messages, "messages CSV path");
    app.add_option("--images", cli.images, "images CSV path");
    app.add_option("--k", cli.k, "recommendations per user");
    app.add_option("--seed", cli.seed, "run seed");
    app.add_option("--temperature", cli.temperature, "softmax temperature");
    app.add_option("--provider", cli.provider,
                   "embedding backend: remote, mock, cached");
    app.add_option("--out", cli.out, "output directory");
    app.add_option("--cache-path", cli.cache_path, "embedding cache file");
    app.add_option("--endpoint", cli.endpoint, "remote endpoint URL");
    app.add_option("--model", cli.model, "remote model name");
    app.add_option("--mock-mode", cli.mock_mode, "mock mode: hash, tag_aware");
    app.add_option("--mock-seed", cli.mock_seed, "mock backend seed");
    app.add_option("--dimension", cli.dimension, "embedding dimension");

    auto* validate_cmd =
        app.add_subcommand("validate", "check the corpus files");
    auto* embed_cmd =
        app.add_subcommand("embed", "compute and export representations");
    auto* recommend_cmd =
        app.add_subcommand("recommend", "rank or sample (message, image) pairs");
    std::string user_filter = "all";
    bool sample = false;
    recommend_cmd->add_option("--user", user_filter,
                              "user id, or 'all' (default)");
    recommend_cmd->add_flag("--sample", sample,
                            "softmax-sample one pair per user instead of top-k");
    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "apply the appropriateness rubric");
    auto* diagnose_cmd = app.add_subcommand(
        "diagnose", "PCA projections and cluster statistics");

    CLI11_PARSE(app, argc, argv);

    try {
        const RunConfig config = resolve_config(cli);
        config.user_weights.validate();
        config.preference_weights.validate();
        if (config.k < 1) throw nudgekit::ConfigError("k must be >= 1");
        if (validate_cmd->parsed()) return cmd_validate(config);
        if (embed_cmd->parsed()) return cmd_embed(config);
        if (recommend_cmd->parsed())
            return cmd_recommend(config, user_filter, sample);
        if (evaluate_cmd->parsed()) return cmd_evaluate(config);
        if (diagnose_cmd->parsed()) return cmd_diagnose(config);
    } catch (const nudgekit::ProviderError& e) {
        std::cerr << "provider error: " << e.what() << "\n";
        return 3;
    } catch (const nudgekit::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const nudgekit::NotFoundError& e) {
        std::cerr << "not found: " << e.what() << "\n";
        return 2;
    } catch (const nudgekit::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const nudgekit::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
