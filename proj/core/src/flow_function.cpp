#include "torusflow/flow_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "torusflow/errors.hpp"
#include "torusflow/torus.hpp"

namespace torusflow {

std::string to_string(FlowFamily family) {
    switch (family) {
        case FlowFamily::sin: return "sin";
        case FlowFamily::linear: return "linear";
        case FlowFamily::custom: return "custom";
    }
    return "?";
}

FlowFamily flow_family_from_string(const std::string& name) {
    if (name == "sin") return FlowFamily::sin;
    if (name == "linear") return FlowFamily::linear;
    if (name == "custom") return FlowFamily::custom;
    throw InputError("unknown flow family '" + name + "' (expected sin, linear or custom)");
}

FlowFunction FlowFunction::fourier(std::vector<double> coefficients) {
    const bool nonzero = std::any_of(coefficients.begin(), coefficients.end(), [](double c) { return c != 0.0; });
    if (!nonzero) throw InputError("custom flow function needs at least one nonzero coefficient");
    for (double c : coefficients)
        if (!std::isfinite(c)) throw InputError("custom flow function coefficient is not finite");
    return FlowFunction(FlowFamily::custom, std::move(coefficients));
}

double FlowFunction::value(double y) const {
    switch (family_) {
        case FlowFamily::sin: return sign_ * std::sin(y);
        case FlowFamily::linear: return sign_ * wrap_angle(y);
        case FlowFamily::custom: {
            double s = 0.0;
            for (std::size_t k = 0; k < coeffs_.size(); ++k) s += coeffs_[k] * std::sin(static_cast<double>(k + 1) * y);
            return s;
        }
    }
    return 0.0;
}

double FlowFunction::derivative(double y) const {
    switch (family_) {
        case FlowFamily::sin: return sign_ * std::cos(y);
        case FlowFamily::linear: return sign_;
        case FlowFamily::custom: {
            double s = 0.0;
            for (std::size_t k = 0; k < coeffs_.size(); ++k) {
                const double kk = static_cast<double>(k + 1);
                s += kk * coeffs_[k] * std::cos(kk * y);
            }
            return s;
        }
    }
    return 0.0;
}

SlopeBounds FlowFunction::slope_bounds(double gamma) const {
    if (!(gamma >= 0.0 && gamma < kPi)) throw GammaError("gamma must lie in [0, pi)");
    switch (family_) {
        case FlowFamily::sin:
            // cos is even and decreasing on [0, pi)
            return sign_ > 0 ? SlopeBounds{std::cos(gamma), 1.0} : SlopeBounds{-1.0, -std::cos(gamma)};
        case FlowFamily::linear: return {sign_, sign_};
        case FlowFamily::custom: break;
    }
    constexpr int kGrid = 1001;
    const double spacing = 2.0 * gamma / (kGrid - 1);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i = 0; i < kGrid; ++i) {
        const double d = derivative(-gamma + spacing * i);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    // |h''| <= sum k^2 |c_k| bounds the derivative between grid points
    double curvature = 0.0;
    for (std::size_t k = 0; k < coeffs_.size(); ++k)
        curvature += static_cast<double>((k + 1) * (k + 1)) * std::abs(coeffs_[k]);
    const double slack = curvature * spacing / 2.0;
    return {lo - slack, hi + slack};
}

FlowFunction FlowFunction::negated() const {
    FlowFunction out = *this;
    if (family_ == FlowFamily::custom) {
        for (double& c : out.coeffs_) c = -c;
    } else {
        out.sign_ = -sign_;
    }
    return out;
}

ExtendedFlowFunction::ExtendedFlowFunction(FlowFunction base, double gamma)
    : base_(std::move(base)), gamma_(gamma), bounds_(base_.slope_bounds(gamma)) {
    if (bounds_.lmin < kMinimumSlope)
        throw MonotonicityError("flow function " + to_string(base_.family()) +
                                " is not certified strictly increasing on [-gamma, gamma] (min slope " +
                                std::to_string(bounds_.lmin) + "); try a smaller gamma");
    h_gamma_ = base_.value(gamma_);
    slope_gamma_ = base_.derivative(gamma_);
}

double ExtendedFlowFunction::value(double y) const {
    if (y > gamma_) return h_gamma_ + slope_gamma_ * (y - gamma_);
    if (y < -gamma_) return -h_gamma_ + slope_gamma_ * (y + gamma_);
    return base_.value(y);
}

double ExtendedFlowFunction::inverse(double v) const {
    if (v > h_gamma_) return gamma_ + (v - h_gamma_) / slope_gamma_;
    if (v < -h_gamma_) return -gamma_ + (v + h_gamma_) / slope_gamma_;
    switch (base_.family()) {
        case FlowFamily::sin: return std::asin(std::clamp(v, -1.0, 1.0));
        case FlowFamily::linear: return v;
        case FlowFamily::custom: break;
    }
    double lo = -gamma_;
    double hi = gamma_;
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (base_.value(mid) < v ? lo : hi) = mid;
    }
    double y = 0.5 * (lo + hi);
    for (int k = 0; k < 2; ++k) {
        const double step = (base_.value(y) - v) / base_.derivative(y);
        y = std::clamp(y - step, -gamma_, gamma_);
    }
    return y;
}

double extended_inverse(const ExtendedFlowFunction& h, double v) { return h.inverse(v); }

}  // namespace torusflow
