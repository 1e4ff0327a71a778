#pragma once

#include "torusflow/graph.hpp"

namespace torusflow {

/// D-weighted cycle projection P_D = I - D A B^T (B D A B^T)^dagger B.
///
/// P_D is an oblique projector onto Ker(B) along Img(D A B^T); it is the
/// orthogonal projector onto the cycle space when D A is a multiple of I.
struct CycleProjection {
    Matrix matrix;
    /// Diagonal of the positive weighting D.
    Vector weight;
};

/// Throws WeightError if any entry of `d` is not strictly positive.
[[nodiscard]] CycleProjection cycle_projection(const WeightedGraph& g, const Vector& d);

}  // namespace torusflow
