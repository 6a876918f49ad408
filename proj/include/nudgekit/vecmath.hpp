#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "nudgekit/errors.hpp"

namespace nudgekit::vec {

inline void require_same_dimension(std::span<const double> a,
                                   std::span<const double> b,
                                   const char* where) {
    if (a.size() != b.size()) {
        throw ValidationError(std::string(where) + ": dimension mismatch (" +
                              std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + ")");
    }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    require_same_dimension(a, b, "dot");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

inline double l2_norm(std::span<const double> v) {
    double sum = 0.0;
    for (double x : v) sum += x * x;
    return std::sqrt(sum);
}

inline void scale_in_place(std::vector<double>& v, double factor) {
    for (double& x : v) x *= factor;
}

/// y += a * x
inline void axpy(double a, std::span<const double> x, std::vector<double>& y) {
    require_same_dimension(x, y, "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline void normalize_in_place(std::vector<double>& v) {
    const double norm = l2_norm(v);
    if (norm == 0.0) {
        throw NumericalError("normalize: zero vector");
    }
    scale_in_place(v, 1.0 / norm);
}

inline std::vector<double> normalized(std::vector<double> v) {
    normalize_in_place(v);
    return v;
}

inline double cosine(std::span<const double> a, std::span<const double> b) {
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot(a, b) / (na * nb);
}

inline std::vector<double> mean(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) {
        throw ValidationError("mean: empty input");
    }
    std::vector<double> out(rows.front().size(), 0.0);
    for (const auto& row : rows) {
        require_same_dimension(row, out, "mean");
        for (std::size_t i = 0; i < row.size(); ++i) out[i] += row[i];
    }
    scale_in_place(out, 1.0 / static_cast<double>(rows.size()));
    return out;
}

inline std::vector<double> subtract(std::span<const double> a,
                                    std::span<const double> b) {
    require_same_dimension(a, b, "subtract");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

}  // namespace nudgekit::vec
