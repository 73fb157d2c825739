// Block moments sigma_m(f, q) = || q^{-1/2} sum_{l<q} (f(X_l) - E f) ||_{L^m}.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "mixbound/parallel.hpp"
#include "mixbound/processes.hpp"
#include "mixbound/rng.hpp"

namespace mixbound {

struct BlockMoment {
    double value = 0.0;
    double std_error = 0.0;
    bool exact = false;
};

/// E|Z|^m for Z ~ N(0,1).
inline double gaussian_abs_moment(double m) {
    return std::pow(2.0, m / 2.0) * boost::math::tgamma((m + 1.0) / 2.0) / std::sqrt(M_PI);
}

/// Var(sum_{l<q} X_l) / q for the Gaussian kinds.
inline double linear_block_variance(const ProcessModel& model, std::int64_t q) {
    double s = q * model.autocovariance(0);
    for (std::int64_t k = 1; k < q; ++k) s += 2.0 * static_cast<double>(q - k) * model.autocovariance(k);
    return s / static_cast<double>(q);
}

inline bool is_linear(const TestFunction& f) { return f.name == "x" || f.name == "neg_x"; }

/// sigma_m(f, q). Exact for linear f under the Gaussian kinds (the block sum
/// is Gaussian) and for constants; order = inf gives sqrt(q) ||f||_inf;
/// otherwise Monte Carlo over `reps` independent stationary blocks.
inline BlockMoment sigma_m(const ProcessModel& model, const TestFunction& f, std::int64_t q, double order,
                           int reps = 20000, std::uint64_t seed = default_seed, int workers = 1) {
    if (q < 1) throw std::invalid_argument("sigma_m: q must be >= 1");
    if (!(order >= 1.0)) throw std::invalid_argument("sigma_m: order must be >= 1");
    if (std::isinf(order)) return {std::sqrt(static_cast<double>(q)) * f.sup, 0.0, true};
    if (f.name == "one") return {0.0, 0.0, true};
    if (model.gaussian() && is_linear(f)) {
        const double s2 = std::sqrt(linear_block_variance(model, q));
        return {s2 * std::pow(gaussian_abs_moment(order), 1.0 / order), 0.0, true};
    }
    if (reps < 30) throw std::invalid_argument("sigma_m: reps must be >= 30");
    TestClass single{"single", {f}};
    const double mean = class_means(model, single)[0];
    auto vals = parallel_map<double>(static_cast<std::size_t>(reps), workers, [&](std::size_t i) {
        const auto block = simulate(model, q, derive_seed(seed, i));
        double s = 0.0;
        for (double x : block.values) s += f.fn(x) - mean;
        return std::pow(std::abs(s / std::sqrt(static_cast<double>(q))), order);
    });
    const auto e = jackknife_mean(std::move(vals));
    const double value = std::pow(e.estimate, 1.0 / order);
    // delta method for x -> x^{1/m}
    const double se = value > 0.0 ? value / (order * e.estimate) * e.std_error : 0.0;
    return {value, se, false};
}

}  // namespace mixbound
