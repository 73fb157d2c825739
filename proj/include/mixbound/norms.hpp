// Dependence-adapted norms built on mu_q(u) = sum_{i<=q} 1{u <= theta(i)/2}.
#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mixbound/profile.hpp"
#include "mixbound/quantile.hpp"

namespace mixbound {

template <typename C>
concept SquareIntegrableCurve = requires(const C& c, double a) {
    { c.partial_square_integral(a) } -> std::convertible_to<double>;
};

/// mu_q(u); an integer in {0, ..., q+1}.
inline std::int64_t mu_q(double u, std::int64_t q, const MixingProfile& profile) {
    if (!(u > 0.0)) throw std::invalid_argument("mu_q: u must be positive");
    if (q < 0) throw std::invalid_argument("mu_q: q must be non-negative");
    // theta is non-increasing, so the indicator is a prefix of 0..q
    std::int64_t count = 0;
    for (std::int64_t i = 0; i <= q; ++i) {
        if (u <= 0.5 * profile.theta(i)) ++count;
        else break;
    }
    return count;
}

/// Distinct jump locations of mu_q, descending: 0.5 theta(0) >= 0.5 theta(1) >= ...
/// Zero is dropped (mu_q vanishes only at u = 0, which has no mass).
inline std::vector<double> mu_breakpoints(std::int64_t q, const MixingProfile& profile) {
    std::vector<double> out;
    for (std::int64_t i = 0; i <= q; ++i) {
        const double b = 0.5 * profile.theta(i);
        if (b == 0.0) break;
        if (out.empty() || out.back() != b) out.push_back(b);
    }
    return out;
}

/// ||f||_q = sqrt(2 int_0^1 mu_q(u) Q_f(u)^2 du).
///
/// Since mu_q = sum_i 1{u <= theta(i)/2}, the integral is the finite sum
/// sum_i int_0^{theta(i)/2} Q^2, evaluated through the curve's exact partial
/// integrals.
template <SquareIntegrableCurve Curve>
double q_norm(const Curve& curve, std::int64_t q, const MixingProfile& profile) {
    if (q < 0) throw std::invalid_argument("q_norm: q must be non-negative");
    double s = 0.0;
    for (std::int64_t i = 0; i <= q; ++i) {
        const double a = 0.5 * profile.theta(i);
        if (a == 0.0) break;
        s += curve.partial_square_integral(a);
    }
    return std::sqrt(2.0 * s);
}

/// The aggregate norm sqrt(2 int (theta^{-1}(2u)+1) Q^2 du); only defined when
/// sum theta(i) converges. Returns +inf otherwise.
template <SquareIntegrableCurve Curve>
double norm_2theta(const Curve& curve, const MixingProfile& profile, std::int64_t max_lag = 10000000) {
    if (!std::isfinite(profile.tail_sum())) return std::numeric_limits<double>::infinity();
    // theta^{-1}(2u) + 1 = #{i >= 0 : theta(i) > 2u} + 1 and the extra 1 covers (0,1/2]
    double s = curve.partial_square_integral(0.5);
    for (std::int64_t i = 0; i < max_lag; ++i) {
        const double a = 0.5 * profile.theta(i);
        if (a == 0.0) break;
        s += curve.partial_square_integral(a);
    }
    return std::sqrt(2.0 * s);
}

/// int_0^1 mu_q(u)^power du as the exact step-function sum.
inline double mu_power_integral(std::int64_t q, double power, const MixingProfile& profile) {
    // mu = j+1 on (theta(j+1)/2, theta(j)/2] and q+1 on (0, theta(q)/2]
    long double s = 0.0L;
    double prev = profile.theta(0);
    for (std::int64_t j = 0; j < q; ++j) {
        const double next = profile.theta(j + 1);
        if (prev == 0.0) break;
        if (next != prev)
            s += std::pow(static_cast<long double>(j + 1), static_cast<long double>(power)) * 0.5L *
                 (static_cast<long double>(prev) - next);
        prev = next;
    }
    if (prev > 0.0)
        s += std::pow(static_cast<long double>(q + 1), static_cast<long double>(power)) * 0.5L * prev;
    return static_cast<double>(s);
}

/// Separation factor B_r(q) = sqrt(2) (int mu_q^{r/(r-2)})^{(r-2)/(2r)}; r may be +inf.
inline double b_r(std::int64_t q, double r, const MixingProfile& profile) {
    if (!(r > 2.0)) throw std::invalid_argument("b_r: r must exceed 2");
    if (q < 0) throw std::invalid_argument("b_r: q must be non-negative");
    const double p = std::isinf(r) ? 1.0 : r / (r - 2.0);
    const double e = std::isinf(r) ? 0.5 : (r - 2.0) / (2.0 * r);
    return std::sqrt(2.0) * std::pow(mu_power_integral(q, p, profile), e);
}

/// E[|f| 1{|f| > t}] for a step curve: int_0^{H(t)} Q(u) du.
inline double tail_first_moment(const QuantileCurve& curve, double t) {
    const auto& cum = curve.breakpoints();
    const auto& vals = curve.values();
    double s = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i)
        if (vals[i] > t) s += vals[i] * (cum[i + 1] - cum[i]);
    return s;
}

}  // namespace mixbound
