// Quantile functions of |f(X)|.
//
// A curve exposes Q(u) for u in [0,1] and the partial integrals
// int_0^a Q(u)^p du. Every norm in this library is assembled from those
// partial integrals, so no numerical quadrature is involved.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

namespace mixbound {

/// Right-continuous non-increasing step function u -> Q_f(u).
///
/// Segment i covers [cum_[i], cum_[i+1]) with value values_[i]. The last
/// breakpoint is 1; beyond the mass of the positive atoms Q is 0.
class QuantileCurve {
public:
    QuantileCurve() = default;

    /// Exact curve of |X| for a finite discrete law. Weights are normalized.
    static QuantileCurve from_discrete(std::span<const double> values, std::span<const double> weights) {
        if (values.size() != weights.size() || values.empty())
            throw std::invalid_argument("QuantileCurve: values and weights must be non-empty and equal length");
        double total = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0)) throw std::invalid_argument("QuantileCurve: negative weight");
            total += w;
        }
        if (!(total > 0.0)) throw std::invalid_argument("QuantileCurve: weights sum to zero");
        std::vector<std::pair<double, double>> atoms;
        atoms.reserve(values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            if (weights[i] > 0.0) atoms.emplace_back(std::abs(values[i]), weights[i] / total);
        std::sort(atoms.begin(), atoms.end(), [](auto& a, auto& b) { return a.first > b.first; });

        QuantileCurve c;
        c.cum_.push_back(0.0);
        double acc = 0.0;
        for (std::size_t i = 0; i < atoms.size();) {
            const double x = atoms[i].first;
            if (x == 0.0) break;
            double mass = 0.0;
            for (; i < atoms.size() && atoms[i].first == x; ++i) mass += atoms[i].second;
            acc += mass;
            c.values_.push_back(x);
            c.cum_.push_back(std::min(acc, 1.0));
        }
        if (c.cum_.back() < 1.0) {
            c.values_.push_back(0.0);
            c.cum_.push_back(1.0);
        }
        c.cum_.back() = 1.0;
        return c;
    }

    /// Empirical curve: every sample carries mass 1/N.
    static QuantileCurve from_sample(std::span<const double> sample) {
        std::vector<double> w(sample.size(), 1.0);
        return from_discrete(sample, w);
    }

    /// Breakpoints 0 = u_0 < u_1 < ... < u_K = 1.
    const std::vector<double>& breakpoints() const noexcept { return cum_; }
    /// Value on [u_i, u_{i+1}).
    const std::vector<double>& values() const noexcept { return values_; }

    double operator()(double u) const {
        if (u < 0.0 || u > 1.0) throw std::invalid_argument("QuantileCurve: u outside [0,1]");
        const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
        const auto idx = static_cast<std::size_t>(std::distance(cum_.begin(), it));
        return idx == 0 || idx > values_.size() ? 0.0 : values_[idx - 1];
    }

    /// int_0^a Q(u)^p du for a in [0,1].
    double partial_power_integral(double a, double p) const {
        a = std::clamp(a, 0.0, 1.0);
        double s = 0.0;
        for (std::size_t i = 0; i < values_.size() && cum_[i] < a; ++i) {
            const double width = std::min(a, cum_[i + 1]) - cum_[i];
            if (values_[i] != 0.0) s += std::pow(values_[i], p) * width;
        }
        return s;
    }

    double partial_square_integral(double a) const {
        a = std::clamp(a, 0.0, 1.0);
        double s = 0.0;
        for (std::size_t i = 0; i < values_.size() && cum_[i] < a; ++i) {
            const double width = std::min(a, cum_[i + 1]) - cum_[i];
            s += values_[i] * values_[i] * width;
        }
        return s;
    }

    double lr_norm(double r) const {
        if (std::isinf(r)) return values_.empty() ? 0.0 : values_.front();
        return std::pow(partial_power_integral(1.0, r), 1.0 / r);
    }
    double l2_norm() const { return std::sqrt(partial_square_integral(1.0)); }
    double sup() const { return values_.empty() ? 0.0 : values_.front(); }

private:
    std::vector<double> cum_;
    std::vector<double> values_;
};

/// Q for |X| with X ~ N(0, scale^2), in closed form.
class HalfNormalCurve {
public:
    explicit HalfNormalCurve(double scale) : scale_(scale) {
        if (!(scale >= 0.0)) throw std::invalid_argument("HalfNormalCurve: negative scale");
    }

    double operator()(double u) const {
        if (u <= 0.0) return std::numeric_limits<double>::infinity();
        if (u >= 1.0) return 0.0;
        return scale_ * std::sqrt(2.0) * boost::math::erfc_inv(u);
    }

    /// int_0^a Q^2 = scale^2 (a + 2 z phi(z)) with z = Q(a)/scale.
    double partial_square_integral(double a) const {
        if (a <= 0.0) return 0.0;
        if (a >= 1.0) return scale_ * scale_;
        const double z = std::sqrt(2.0) * boost::math::erfc_inv(a);
        const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
        return scale_ * scale_ * (a + 2.0 * z * phi);
    }

    double l2_norm() const { return scale_; }
    double scale() const noexcept { return scale_; }

private:
    double scale_;
};

}  // namespace mixbound
