#include "torusflow/torus.hpp"

#include <algorithm>
#include <cmath>

#include "torusflow/errors.hpp"

namespace torusflow {

namespace {

constexpr double kPunctureTolerance = 1e-12;
constexpr double kIntegerTolerance = 1e-6;

}  // namespace

double wrap_angle(double x) noexcept {
    double r = x - kTwoPi * std::floor((x + kPi) / kTwoPi);
    // floor can land exactly on the excluded endpoint through rounding
    if (r >= kPi) r -= kTwoPi;
    if (r < -kPi) r += kTwoPi;
    return r;
}

double ccw_difference(double alpha, double beta) noexcept { return wrap_angle(alpha - beta); }

PhaseVector::PhaseVector(const Vector& angles) : theta_(angles.unaryExpr([](double a) { return wrap_angle(a); })) {}

PhaseVector PhaseVector::rotated(double s) const {
    return PhaseVector(theta_.array() + s);
}

PhaseVector PhaseVector::canonical() const {
    if (theta_.size() == 0) return *this;
    return rotated(-theta_[0]);
}

double distance_modulo_rotation(const PhaseVector& a, const PhaseVector& b) {
    const Vector ca = a.canonical().values();
    const Vector cb = b.canonical().values();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < ca.size(); ++i) worst = std::max(worst, std::abs(ccw_difference(ca[i], cb[i])));
    return worst;
}

EdgeDifferenceVector edge_differences(const WeightedGraph& g, const PhaseVector& theta) {
    if (theta.size() != g.node_count()) throw InputError("phase vector has the wrong length");
    Vector delta(g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto& ed = g.edge(e);
        delta[e] = ccw_difference(theta[ed.to], theta[ed.from]);
        if (std::abs(delta[e]) > kPi - kPunctureTolerance)
            throw PuncturedTorusError("edge " + std::to_string(e) + " has an antipodal phase difference");
    }
    return {delta};
}

double winding_number_raw(const Cycle& cycle, const PhaseVector& theta) {
    const auto& nodes = cycle.nodes();
    double total = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const int a = nodes[k];
        const int b = nodes[(k + 1) % nodes.size()];
        if (a >= theta.size() || b >= theta.size()) throw InputError("phase vector is shorter than the cycle's nodes");
        const double d = ccw_difference(theta[b], theta[a]);
        if (std::abs(d) > kPi - kPunctureTolerance)
            throw PuncturedTorusError("cycle edge has an antipodal phase difference");
        total += d;
    }
    return total / kTwoPi;
}

int winding_number(const Cycle& cycle, const PhaseVector& theta) {
    const double raw = winding_number_raw(cycle, theta);
    const double rounded = std::round(raw);
    if (std::abs(raw - rounded) > kIntegerTolerance)
        throw NonIntegerWindingError("winding number " + std::to_string(raw) + " is not an integer");
    return static_cast<int>(rounded);
}

WindingVector winding_vector(const CycleBasis& basis, const PhaseVector& theta) {
    WindingVector w;
    w.basis_fingerprint = basis.fingerprint();
    w.values.reserve(basis.cycles.size());
    for (const auto& c : basis.cycles) w.values.push_back(winding_number(c, theta));
    return w;
}

int max_winding_magnitude(int cycle_length) noexcept { return (cycle_length + 1) / 2 - 1; }

int candidate_bound(int cycle_length, double gamma) noexcept {
    return static_cast<int>(std::floor(gamma * cycle_length / kTwoPi));
}

WindingEnumerator::WindingEnumerator(const CycleBasis& basis, double gamma) : fingerprint_(basis.fingerprint()) {
    bounds_.reserve(basis.cycles.size());
    for (const auto& c : basis.cycles) {
        const int b = std::max(0, candidate_bound(c.length(), gamma));
        bounds_.push_back(b);
        count_ *= static_cast<std::size_t>(2 * b + 1);
    }
}

WindingVector WindingEnumerator::operator[](std::size_t index) const {
    WindingVector w;
    w.basis_fingerprint = fingerprint_;
    w.values.assign(bounds_.size(), 0);
    // last coordinate varies fastest
    for (std::size_t k = bounds_.size(); k-- > 0;) {
        const auto width = static_cast<std::size_t>(2 * bounds_[k] + 1);
        w.values[k] = static_cast<int>(index % width) - bounds_[k];
        index /= width;
    }
    return w;
}

std::vector<WindingVector> WindingEnumerator::all() const {
    std::vector<WindingVector> out;
    out.reserve(count_);
    for (std::size_t i = 0; i < count_; ++i) out.push_back((*this)[i]);
    return out;
}

WindingGeometry::WindingGeometry(const WeightedGraph& g, CycleBasis basis)
    : graph_(g), basis_(std::move(basis)), b_(incidence_matrix(g)) {
    if (basis_.node_count != g.node_count() || basis_.edge_count != g.edge_count())
        throw InputError("cycle basis does not belong to this graph");
    c_pinv_ = basis_.size() > 0 ? cycle_edge_pinv(basis_) : Matrix(g.edge_count(), 0);
    unweighted_lap_pinv_ = pinv_with_ones_kernel(b_ * b_.transpose());
}

Vector WindingGeometry::offset(const IntVector& u) const {
    if (static_cast<int>(u.size()) != basis_.size()) throw InputError("winding vector has the wrong length");
    Vector uv(static_cast<Eigen::Index>(u.size()));
    for (std::size_t i = 0; i < u.size(); ++i) uv[static_cast<Eigen::Index>(i)] = u[i];
    return kTwoPi * (c_pinv_ * uv);
}

bool WindingGeometry::in_polytope(const Vector& x, const IntVector& u) const {
    if (x.size() != graph_.node_count()) return false;
    if (std::abs(x.sum()) > 1e-9 * std::max(1.0, x.cwiseAbs().maxCoeff()) * static_cast<double>(x.size())) return false;
    const Vector y = b_.transpose() * x + offset(u);
    return y.size() == 0 || y.cwiseAbs().maxCoeff() < kPi;
}

Vector WindingGeometry::potential(const Vector& w) const { return unweighted_lap_pinv_ * (b_ * w); }

PolytopePoint WindingGeometry::torus_to_polytope(const PhaseVector& theta) const {
    const auto delta = edge_differences(graph_, theta);
    WindingVector u = winding_vector(basis_, theta);
    const Vector x = potential(delta.values - offset(u.values));
    return {x, std::move(u)};
}

PhaseVector WindingGeometry::polytope_to_torus(const Vector& x, const IntVector& u) const {
    if (!in_polytope(x, u)) throw PolytopeMembershipError("point is not in the winding polytope P_u");
    if (basis_.size() == 0) return PhaseVector(x);
    const IntVector z = shift_solve(graph_, basis_, u);
    Vector w(graph_.edge_count());
    for (int e = 0; e < graph_.edge_count(); ++e) w[e] = z[static_cast<std::size_t>(e)];
    Vector uv(static_cast<Eigen::Index>(u.size()));
    for (std::size_t i = 0; i < u.size(); ++i) uv[static_cast<Eigen::Index>(i)] = u[i];
    w -= c_pinv_ * uv;
    // w lies in Ker(C) = Img(B^T); alpha is its potential
    const Vector alpha = potential(w);
    return PhaseVector(x - kTwoPi * alpha);
}

PolytopePoint torus_to_polytope(const WeightedGraph& g, const CycleBasis& basis, const PhaseVector& theta) {
    return WindingGeometry(g, basis).torus_to_polytope(theta);
}

PhaseVector polytope_to_torus(const WeightedGraph& g, const CycleBasis& basis, const Vector& x, const IntVector& u) {
    return WindingGeometry(g, basis).polytope_to_torus(x, u);
}

}  // namespace torusflow
