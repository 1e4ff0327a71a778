#pragma once

#include <string>
#include <vector>

namespace torusflow {

enum class FlowFamily { sin, linear, custom };

[[nodiscard]] std::string to_string(FlowFamily family);
[[nodiscard]] FlowFamily flow_family_from_string(const std::string& name);

/// Slope bounds of h on [-gamma, gamma].
struct SlopeBounds {
    double lmin = 0.0;
    double lmax = 0.0;
};

/// Odd, 2pi-periodic, C^1 edge flow function h.
///   sin     h(y) = sin y
///   linear  h(y) = wrap(y), the sawtooth (identity on (-pi, pi))
///   custom  h(y) = sum_k c_k sin(k y), k = 1, 2, ...
class FlowFunction {
public:
    FlowFunction() = default;

    [[nodiscard]] static FlowFunction sine() { return FlowFunction(FlowFamily::sin, {}); }
    [[nodiscard]] static FlowFunction linear() { return FlowFunction(FlowFamily::linear, {}); }
    /// coefficients[k-1] multiplies sin(k y). Throws InputError on an empty or all-zero series.
    [[nodiscard]] static FlowFunction fourier(std::vector<double> coefficients);

    [[nodiscard]] FlowFamily family() const noexcept { return family_; }
    [[nodiscard]] const std::vector<double>& coefficients() const noexcept { return coeffs_; }

    [[nodiscard]] double value(double y) const;
    [[nodiscard]] double derivative(double y) const;

    /// Certified slope range over [-gamma, gamma].
    [[nodiscard]] SlopeBounds slope_bounds(double gamma) const;

    /// -h, same family.
    [[nodiscard]] FlowFunction negated() const;

    friend bool operator==(const FlowFunction&, const FlowFunction&) = default;

private:
    FlowFunction(FlowFamily family, std::vector<double> coeffs) : family_(family), coeffs_(std::move(coeffs)) {}

    FlowFamily family_ = FlowFamily::sin;
    std::vector<double> coeffs_;
    // sin and linear carry an overall sign here; custom folds it into coeffs_
    double sign_ = 1.0;
};

/// h restricted to [-gamma, gamma] and continued linearly with the boundary
/// slope outside; strictly increasing on all of R when lmin > 0.
class ExtendedFlowFunction {
public:
    ExtendedFlowFunction(FlowFunction base, double gamma);

    [[nodiscard]] const FlowFunction& base() const noexcept { return base_; }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    [[nodiscard]] const SlopeBounds& bounds() const noexcept { return bounds_; }
    /// h(gamma), the largest flow the edge carries inside the constraint.
    [[nodiscard]] double capacity() const noexcept { return h_gamma_; }

    [[nodiscard]] double value(double y) const;
    [[nodiscard]] double inverse(double v) const;

private:
    FlowFunction base_;
    double gamma_;
    SlopeBounds bounds_;
    double h_gamma_;
    double slope_gamma_;
};

/// Monotonicity certificates below this slope are refused.
inline constexpr double kMinimumSlope = 1e-9;

[[nodiscard]] double extended_inverse(const ExtendedFlowFunction& h, double v);

}  // namespace torusflow
