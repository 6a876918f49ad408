#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "nudgekit/vecmath.hpp"

namespace nudgekit {

/// Engine-wide default embedding dimension (matches the remote model family
/// the wire protocol targets).
inline constexpr std::size_t kDefaultDimension = 1536;

/// Unit-norm semantic embedding of one text, the atom of all scoring.
struct EmbeddingVector {
    std::vector<double> values;
    std::string provenance;  // backend identifier + model name

    std::size_t dimension() const { return values.size(); }
};

inline bool is_unit_norm(const EmbeddingVector& v, double tolerance = 1e-6) {
    return std::abs(vec::l2_norm(v.values) - 1.0) <= tolerance;
}

}  // namespace nudgekit
