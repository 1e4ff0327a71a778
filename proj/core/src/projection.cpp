#include "torusflow/projection.hpp"

#include <string>

#include "torusflow/errors.hpp"

namespace torusflow {

CycleProjection cycle_projection(const WeightedGraph& g, const Vector& d) {
    if (d.size() != g.edge_count()) throw WeightError("weighting has the wrong length");
    for (Eigen::Index e = 0; e < d.size(); ++e) {
        if (!(d[e] > 0.0)) throw WeightError("weighting entry " + std::to_string(e) + " is not positive");
    }
    const Matrix b = incidence_matrix(g);
    const Vector da = d.cwiseProduct(g.weights());
    const Matrix da_bt = da.asDiagonal() * b.transpose();
    // B D A B^T is a weighted Laplacian, so its kernel is span{1}.
    const Matrix lap_pinv = pinv_with_ones_kernel(b * da_bt);
    const auto m = g.edge_count();
    return {Matrix::Identity(m, m) - da_bt * lap_pinv * b, d};
}

}  // namespace torusflow
