#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nudgekit/csv.hpp"
#include "nudgekit/errors.hpp"
#include "nudgekit/ioutil.hpp"
#include "nudgekit/rng.hpp"
#include "nudgekit/vecmath.hpp"

// Embedding-space geometry study: 2-component PCA of un-centered vs
// centered representations plus per-modality cluster statistics.

namespace nudgekit {

struct EigenPair {
    double value = 0.0;
    std::vector<double> vector;
};

namespace detail {

inline std::vector<double> matvec(const std::vector<std::vector<double>>& m,
                                  const std::vector<double>& x) {
    std::vector<double> y(m.size(), 0.0);
    for (std::size_t r = 0; r < m.size(); ++r) {
        y[r] = vec::dot(m[r], x);
    }
    return y;
}

inline void orthogonalize_against(std::vector<double>& v,
                                  const std::vector<EigenPair>& found) {
    for (const auto& pair : found) {
        vec::axpy(-vec::dot(v, pair.vector), pair.vector, v);
    }
}

/// Deterministic unit vector orthogonal to everything already found; used
/// for zero-variance directions where power iteration has nothing to bite.
inline std::vector<double> fallback_direction(
    std::size_t n, const std::vector<EigenPair>& found) {
    for (std::size_t basis = 0; basis < n; ++basis) {
        std::vector<double> v(n, 0.0);
        v[basis] = 1.0;
        orthogonalize_against(v, found);
        if (vec::l2_norm(v) > 0.5) {
            vec::normalize_in_place(v);
            return v;
        }
    }
    throw NumericalError("no orthogonal direction left");
}

}  // namespace detail

/// Top-k eigenpairs of a symmetric PSD matrix via power iteration with
/// deflation. Eigenvalues come out in non-increasing order.
inline std::vector<EigenPair> top_eigenpairs_power(
    const std::vector<std::vector<double>>& matrix, std::size_t k,
    double tolerance = 1e-10, std::size_t max_iterations = 10000) {
    const std::size_t n = matrix.size();
    if (k > n) {
        throw ValidationError("top_eigenpairs_power: k exceeds matrix size");
    }
    // Deflated working copy.
    auto work = matrix;
    double scale = 0.0;
    for (const auto& row : work) {
        for (double x : row) scale = std::max(scale, std::abs(x));
    }
    const double negligible = scale * 1e-14;

    std::vector<EigenPair> found;
    for (std::size_t component = 0; component < k; ++component) {
        rng::GaussianSource gauss(0x5bd1e995u + component);
        std::vector<double> x(n);
        for (double& value : x) value = gauss.next();
        detail::orthogonalize_against(x, found);
        const double start_norm = vec::l2_norm(x);
        if (start_norm == 0.0) {
            found.push_back({0.0, detail::fallback_direction(n, found)});
            continue;
        }
        vec::scale_in_place(x, 1.0 / start_norm);

        bool converged = false;
        std::size_t iterations = 0;
        for (; iterations < max_iterations; ++iterations) {
            auto y = detail::matvec(work, x);
            detail::orthogonalize_against(y, found);
            const double norm = vec::l2_norm(y);
            if (norm <= negligible || scale == 0.0) {
                // Remaining spectrum is numerically zero.
                found.push_back({0.0, detail::fallback_direction(n, found)});
                converged = true;
                break;
            }
            vec::scale_in_place(y, 1.0 / norm);
            double delta = 0.0;
            double delta_flipped = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                delta = std::max(delta, std::abs(y[i] - x[i]));
                delta_flipped = std::max(delta_flipped, std::abs(y[i] + x[i]));
            }
            x = std::move(y);
            if (std::min(delta, delta_flipped) < tolerance) {
                const double eigenvalue = vec::dot(x, detail::matvec(work, x));
                found.push_back({eigenvalue, x});
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw NumericalError(
                "power iteration did not converge after " +
                std::to_string(max_iterations) + " iterations (component " +
                std::to_string(component + 1) + ")");
        }
        // Deflate: A <- A - lambda v v^T.
        const auto& pair = found.back();
        if (pair.value != 0.0) {
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t c = 0; c < n; ++c) {
                    work[r][c] -= pair.value * pair.vector[r] * pair.vector[c];
                }
            }
        }
    }
    return found;
}

struct PcaModel {
    std::vector<double> mean;
    std::vector<std::vector<double>> components;  // orthonormal, row per component
    std::vector<double> explained_variance;       // non-increasing
};

namespace detail {

/// Sign convention: the largest-magnitude coordinate of a component is
/// positive, so repeated fits produce identical plots.
inline void fix_component_sign(std::vector<double>& component) {
    std::size_t argmax = 0;
    for (std::size_t i = 1; i < component.size(); ++i) {
        if (std::abs(component[i]) > std::abs(component[argmax])) argmax = i;
    }
    if (component[argmax] < 0.0) {
        for (double& x : component) x = -x;
    }
}

}  // namespace detail

/// PCA via the Gram-matrix trick: eigen-decompose the n x n Gram matrix of
/// the centered points instead of the d x d covariance, then map the
/// eigenvectors back through the data. Explained variances are population
/// covariance eigenvalues (1/n normalization).
inline PcaModel fit_pca(const std::vector<std::vector<double>>& points,
                        std::size_t n_components = 2) {
    if (points.size() < 2) {
        throw ValidationError("fit_pca: need at least 2 vectors");
    }
    const std::size_t n = points.size();
    const std::size_t dimension = points.front().size();
    if (dimension < n_components) {
        throw ValidationError("fit_pca: dimension smaller than n_components");
    }

    PcaModel model;
    model.mean = vec::mean(points);
    std::vector<std::vector<double>> centered;
    centered.reserve(n);
    for (const auto& p : points) {
        centered.push_back(vec::subtract(p, model.mean));
    }

    // Gram matrix G = (1/n) X X^T shares its nonzero spectrum with the
    // population covariance (1/n) X^T X.
    std::vector<std::vector<double>> gram(n, std::vector<double>(n, 0.0));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = r; c < n; ++c) {
            const double value =
                vec::dot(centered[r], centered[c]) / static_cast<double>(n);
            gram[r][c] = value;
            gram[c][r] = value;
        }
    }

    const auto eigenpairs =
        top_eigenpairs_power(gram, std::min(n_components, n));
    for (const auto& pair : eigenpairs) {
        // Map the Gram eigenvector back to data space: c = X^T v.
        std::vector<double> component(dimension, 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            vec::axpy(pair.vector[r], centered[r], component);
        }
        const double norm = vec::l2_norm(component);
        if (pair.value <= 0.0 || norm <= 1e-12) {
            // Zero-variance direction; supply a deterministic filler axis.
            std::vector<double> filler;
            for (std::size_t basis = 0; basis < dimension; ++basis) {
                std::vector<double> candidate(dimension, 0.0);
                candidate[basis] = 1.0;
                for (const auto& existing : model.components) {
                    vec::axpy(-vec::dot(candidate, existing), existing,
                              candidate);
                }
                if (vec::l2_norm(candidate) > 0.5) {
                    vec::normalize_in_place(candidate);
                    filler = std::move(candidate);
                    break;
                }
            }
            detail::fix_component_sign(filler);
            model.components.push_back(std::move(filler));
            model.explained_variance.push_back(0.0);
            continue;
        }
        vec::scale_in_place(component, 1.0 / norm);
        // Re-orthogonalize against earlier components to keep the basis
        // orthonormal to machine precision despite deflation roundoff.
        for (const auto& existing : model.components) {
            vec::axpy(-vec::dot(component, existing), existing, component);
        }
        vec::normalize_in_place(component);
        detail::fix_component_sign(component);
        model.components.push_back(std::move(component));
        model.explained_variance.push_back(pair.value);
    }
    // Pad with filler axes if the caller asked for more components than the
    // point count supports.
    while (model.components.size() < n_components) {
        std::vector<double> filler;
        for (std::size_t basis = 0; basis < dimension; ++basis) {
            std::vector<double> candidate(dimension, 0.0);
            candidate[basis] = 1.0;
            for (const auto& existing : model.components) {
                vec::axpy(-vec::dot(candidate, existing), existing, candidate);
            }
            if (vec::l2_norm(candidate) > 0.5) {
                vec::normalize_in_place(candidate);
                filler = std::move(candidate);
                break;
            }
        }
        model.components.push_back(std::move(filler));
        model.explained_variance.push_back(0.0);
    }
    return model;
}

/// Project points onto the first two principal components.
inline std::vector<std::array<double, 2>> project(
    const PcaModel& model, const std::vector<std::vector<double>>& points) {
    if (model.components.size() < 2) {
        throw ValidationError("project: model has fewer than 2 components");
    }
    std::vector<std::array<double, 2>> out;
    out.reserve(points.size());
    for (const auto& p : points) {
        const auto centered = vec::subtract(p, model.mean);
        out.push_back({vec::dot(centered, model.components[0]),
                       vec::dot(centered, model.components[1])});
    }
    return out;
}

struct ModalityStats {
    std::size_t count = 0;
    double centroid_norm = 0.0;
    std::optional<double> mean_intra_cosine;  // absent with < 2 items
};

struct ClusterStats {
    std::map<std::string, ModalityStats> per_modality;
    std::optional<double> mean_inter_cosine;  // absent with one modality

    nlohmann::json to_json() const {
        nlohmann::json modalities = nlohmann::json::object();
        for (const auto& [name, stats] : per_modality) {
            nlohmann::json entry = {{"count", stats.count},
                                    {"centroid_norm", stats.centroid_norm}};
            if (stats.mean_intra_cosine) {
                entry["mean_intra_cosine"] = *stats.mean_intra_cosine;
            } else {
                entry["mean_intra_cosine"] = nullptr;
            }
            modalities[name] = entry;
        }
        nlohmann::json out = {{"per_modality", modalities}};
        if (mean_inter_cosine) {
            out["mean_inter_cosine"] = *mean_inter_cosine;
        } else {
            out["mean_inter_cosine"] = nullptr;
        }
        return out;
    }
};

/// Centroid norms and exhaustive mean pairwise cosines, within and across
/// modalities.
inline ClusterStats cluster_stats(
    const std::map<std::string, std::vector<std::vector<double>>>& by_modality) {
    if (by_modality.empty()) {
        throw ValidationError("cluster_stats: no input");
    }
    ClusterStats stats;
    for (const auto& [name, vectors] : by_modality) {
        if (vectors.empty()) {
            throw ValidationError("cluster_stats: modality '" + name +
                                  "' is empty");
        }
        ModalityStats ms;
        ms.count = vectors.size();
        ms.centroid_norm = vec::l2_norm(vec::mean(vectors));
        if (vectors.size() >= 2) {
            double sum = 0.0;
            std::size_t pairs = 0;
            for (std::size_t a = 0; a < vectors.size(); ++a) {
                for (std::size_t b = a + 1; b < vectors.size(); ++b) {
                    sum += vec::cosine(vectors[a], vectors[b]);
                    ++pairs;
                }
            }
            ms.mean_intra_cosine = sum / static_cast<double>(pairs);
        }
        stats.per_modality.emplace(name, std::move(ms));
    }
    if (by_modality.size() >= 2) {
        double sum = 0.0;
        std::size_t pairs = 0;
        for (auto first = by_modality.begin(); first != by_modality.end();
             ++first) {
            for (auto second = std::next(first); second != by_modality.end();
                 ++second) {
                for (const auto& a : first->second) {
                    for (const auto& b : second->second) {
                        sum += vec::cosine(a, b);
                        ++pairs;
                    }
                }
            }
        }
        stats.mean_inter_cosine = sum / static_cast<double>(pairs);
    }
    return stats;
}

struct PlotPoint {
    std::string id;
    std::string modality;
    double x = 0.0;
    double y = 0.0;
    bool centered = false;
};

/// Figure-style scatter data as CSV for external plotting.
inline void emit_plot_data(const std::vector<PlotPoint>& points,
                           const std::filesystem::path& path) {
    csv::Table table;
    table.header = {"id", "modality", "x", "y", "centered"};
    for (const auto& p : points) {
        table.rows.push_back({p.id, p.modality, io::format_double(p.x),
                              io::format_double(p.y), p.centered ? "1" : "0"});
    }
    io::atomic_write_file(path, csv::format_table(table));
}

inline std::vector<PlotPoint> load_plot_data(
    const std::filesystem::path& path) {
    const auto table = csv::read_file(path);
    const auto id_col = table.column("id");
    const auto modality_col = table.column("modality");
    const auto x_col = table.column("x");
    const auto y_col = table.column("y");
    const auto centered_col = table.column("centered");
    std::vector<PlotPoint> out;
    out.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        out.push_back(PlotPoint{row[id_col], row[modality_col],
                                io::parse_double(row[x_col], "plot x"),
                                io::parse_double(row[y_col], "plot y"),
                                row[centered_col] == "1"});
    }
    return out;
}

}  // namespace nudgekit
