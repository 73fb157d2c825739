// Empirical alpha and tau coefficients from simulated paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixbound/parallel.hpp"
#include "mixbound/processes.hpp"
#include "mixbound/rng.hpp"

namespace mixbound {

struct MixingEstimate {
    std::int64_t q = 0;
    double value = 0.0;
    double std_error = 0.0;
    std::string method;
    double normalizer = 1.0;  // tau: class envelope divided out of value
};

/// Empirical deciles of the path (the default threshold grid).
inline std::vector<double> decile_thresholds(std::vector<double> path) {
    if (path.empty()) throw std::invalid_argument("decile_thresholds: empty path");
    std::sort(path.begin(), path.end());
    std::vector<double> t;
    for (int d = 1; d <= 9; ++d) {
        const auto idx = static_cast<std::size_t>(std::floor(d / 10.0 * static_cast<double>(path.size() - 1)));
        t.push_back(path[idx]);
    }
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

/// max_{s,t} |P(X_0 >= t, X_{-q} >= s) - P(X_0 >= t) P(X_{-q} >= s)| over all lag-q pairs.
inline MixingEstimate estimate_alpha(const std::vector<double>& path, std::int64_t q, std::vector<double> thresholds = {}) {
    if (q < 0) throw std::invalid_argument("estimate_alpha: q must be >= 0");
    if (static_cast<std::int64_t>(path.size()) <= q + 1) throw std::invalid_argument("estimate_alpha: path too short for lag q");
    if (thresholds.empty()) thresholds = decile_thresholds(path);
    const auto pairs = static_cast<std::int64_t>(path.size()) - q;
    const std::size_t k = thresholds.size();
    std::vector<double> past(k, 0.0), now(k, 0.0), joint(k * k, 0.0);
    std::vector<char> pi(k), ni(k);
    for (std::int64_t t = q; t < static_cast<std::int64_t>(path.size()); ++t) {
        const double a = path[static_cast<std::size_t>(t - q)], b = path[static_cast<std::size_t>(t)];
        for (std::size_t i = 0; i < k; ++i) {
            pi[i] = a >= thresholds[i];
            ni[i] = b >= thresholds[i];
            past[i] += pi[i];
            now[i] += ni[i];
        }
        for (std::size_t i = 0; i < k; ++i)
            if (pi[i])
                for (std::size_t j = 0; j < k; ++j) joint[i * k + j] += ni[j];
    }
    const double np = static_cast<double>(pairs);
    double best = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            best = std::max(best, std::abs(joint[i * k + j] / np - (past[i] / np) * (now[j] / np)));
    return {q, best, 0.0, "alpha_empirical", 1.0};
}

/// estimate_alpha averaged over independent paths, with the replication std error.
inline MixingEstimate estimate_alpha_replicated(const ProcessModel& model, std::int64_t n, std::int64_t q, int reps,
                                                std::uint64_t seed, int workers = 1) {
    if (reps < 2) throw std::invalid_argument("estimate_alpha_replicated: reps must be >= 2");
    auto vals = parallel_map<double>(static_cast<std::size_t>(reps), workers, [&](std::size_t i) {
        return estimate_alpha(simulate(model, n, derive_seed(seed, i)).values, q).value;
    });
    const auto e = jackknife_mean(std::move(vals));
    return {q, e.estimate, e.std_error, "alpha_empirical", 1.0};
}

/// E sup_f |E[f(X_0) | X_{-q}] - E f| by nested simulation, divided by the
/// class envelope when it is finite. Markov models only.
inline MixingEstimate estimate_tau(const ProcessModel& model, const TestClass& cls, std::int64_t q, int outer_reps,
                                   int inner_reps, std::uint64_t seed, int workers = 1) {
    if (!model.markov()) throw std::invalid_argument("estimate_tau: unsupported for non-Markov models");
    if (inner_reps < 2) throw std::invalid_argument("estimate_tau: inner_reps must be >= 2");
    if (outer_reps < 2) throw std::invalid_argument("estimate_tau: outer_reps must be >= 2");
    if (q < 0) throw std::invalid_argument("estimate_tau: q must be >= 0");
    const auto means = class_means(model, cls);
    const double env = cls.envelope();
    const double norm = std::isfinite(env) && env > 0.0 ? env : 1.0;
    auto vals = parallel_map<double>(static_cast<std::size_t>(outer_reps), workers, [&](std::size_t o) {
        Sampler rng(derive_seed(seed, o));
        const double start = stationary_draw(model, rng);
        std::vector<double> acc(cls.size(), 0.0);
        for (int i = 0; i < inner_reps; ++i) {
            double x = start;
            for (std::int64_t s = 0; s < q; ++s) x = step(model, x, draw_innovation(model, rng));
            for (std::size_t f = 0; f < cls.size(); ++f) acc[f] += cls.members[f].fn(x);
        }
        double sup = 0.0;
        for (std::size_t f = 0; f < cls.size(); ++f) sup = std::max(sup, std::abs(acc[f] / inner_reps - means[f]));
        return sup / norm;
    });
    const auto e = jackknife_mean(std::move(vals));
    return {q, e.estimate, e.std_error, "tau_nested_mc", norm};
}

}  // namespace mixbound
