#pragma once

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "nudgekit/providers.hpp"

namespace testsupport {

inline std::filesystem::path data_dir() {
    return std::filesystem::path(NUDGEKIT_DATA_DIR);
}

inline std::string cli_path() { return NUDGEKIT_CLI_PATH; }

/// Fresh scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& label) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("nudgekit_" + label + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Pass-through embedder that counts inner calls; used to assert cache hits
/// perform no recomputation.
class CountingEmbedder : public nudgekit::Embedder {
public:
    explicit CountingEmbedder(std::shared_ptr<nudgekit::Embedder> inner)
        : inner_(std::move(inner)) {}

    std::size_t dimension() const override { return inner_->dimension(); }
    std::string model_name() const override { return inner_->model_name(); }

    std::vector<nudgekit::EmbeddingVector> embed_many(
        const std::vector<std::string>& texts) override {
        calls_ += 1;
        texts_embedded_ += texts.size();
        return inner_->embed_many(texts);
    }

    std::size_t calls() const { return calls_; }
    std::size_t texts_embedded() const { return texts_embedded_; }

private:
    std::shared_ptr<nudgekit::Embedder> inner_;
    std::size_t calls_ = 0;
    std::size_t texts_embedded_ = 0;
};

/// Brute-force eigen-decomposition of a symmetric matrix via cyclic Jacobi
/// rotations. Independent oracle for the power-iteration implementation.
struct JacobiResult {
    std::vector<double> values;                // descending
    std::vector<std::vector<double>> vectors;  // vectors[i] pairs values[i]
};

inline JacobiResult jacobi_eigen(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-26) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) +
                                  std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    JacobiResult result;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&a](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });
    for (std::size_t i : order) {
        result.values.push_back(a[i][i]);
        std::vector<double> column(n);
        for (std::size_t k = 0; k < n; ++k) column[k] = v[k][i];
        result.vectors.push_back(std::move(column));
    }
    return result;
}

/// Random symmetric PSD matrix A = B B^T with seeded entries.
inline std::vector<std::vector<double>> random_covariance(std::size_t n,
                                                          unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::vector<double>> b(n, std::vector<double>(n));
    for (auto& row : b)
        for (double& x : row) x = normal(gen);
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) a[i][j] += b[i][k] * b[j][k];
    return a;
}

}  // namespace testsupport
