// Block-independent replicas built by reusing stored innovations, the
// coupling gap, a Bernstein tail check, and the Gaussian coupling experiment.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "mixbound/grid.hpp"
#include "mixbound/mixing_est.hpp"
#include "mixbound/moments.hpp"
#include "mixbound/norms.hpp"
#include "mixbound/parallel.hpp"
#include "mixbound/processes.hpp"
#include "mixbound/quantile.hpp"
#include "mixbound/rng.hpp"

namespace mixbound {

struct ReplicaPath {
    std::int64_t q = 0;
    std::vector<double> values;
    std::vector<std::uint64_t> lead_in;  // seed of the fresh start of block j (unused for j = 0)
};

/// Block 0 is the true block. Block j >= 1 restarts at time q(j-1) from a fresh
/// stationary state (own seed) and runs on the stored innovations of times
/// q(j-1)+1 .. qj+q-1; only its block-j stretch is kept. Same-parity blocks
/// therefore use disjoint randomness.
inline ReplicaPath build_replica(const PathBundle& path, std::int64_t q, std::uint64_t seed) {
    if (q < 1 || path.n % q != 0) throw std::invalid_argument("build_replica: q must divide n");
    const auto& model = path.model;
    const std::int64_t blocks = path.n / q;
    ReplicaPath rep;
    rep.q = q;
    rep.values.resize(static_cast<std::size_t>(path.n));
    rep.lead_in.assign(static_cast<std::size_t>(blocks), 0);
    std::copy(path.values.begin(), path.values.begin() + q, rep.values.begin());
    if (model.kind == ProcessKind::iid) {
        rep.values = path.values;
        return rep;
    }
    for (std::int64_t j = 1; j < blocks; ++j) {
        const std::uint64_t s_seed = derive_seed(seed, static_cast<std::uint64_t>(j));
        rep.lead_in[static_cast<std::size_t>(j)] = s_seed;
        Sampler rng(s_seed);
        const std::int64_t start = q * (j - 1);
        if (model.kind == ProcessKind::ma) {
            // fresh eps_{start-memory+2..start}; stored ones after start
            std::vector<double> fresh(static_cast<std::size_t>(std::max(model.memory - 1, 0)));
            for (auto& e : fresh) e = draw_innovation(model, rng);
            auto eps = [&](std::int64_t idx) {
                if (idx > start) return path.innovations[static_cast<std::size_t>(idx)];
                return fresh[static_cast<std::size_t>(start - idx)];
            };
            for (std::int64_t t = q * j; t < q * (j + 1); ++t)
                rep.values[static_cast<std::size_t>(t)] = ma_value(model, eps, t);
            continue;
        }
        double x = stationary_draw(model, rng);
        for (std::int64_t t = start + 1; t < q * (j + 1); ++t) {
            x = step(model, x, path.innovations[static_cast<std::size_t>(t)]);
            if (t >= q * j) rep.values[static_cast<std::size_t>(t)] = x;
        }
    }
    return rep;
}

struct CouplingGap {
    double gap = 0.0;                 // sup_f |G_n[f] - G*_n[f]|
    std::vector<double> per_member;
};

inline CouplingGap coupling_gap(const std::vector<double>& path, const std::vector<double>& replica, const TestClass& cls) {
    if (path.size() != replica.size()) throw std::invalid_argument("coupling_gap: length mismatch");
    CouplingGap g;
    const double rn = std::sqrt(static_cast<double>(path.size()));
    for (const auto& f : cls.members) {
        double s = 0.0;
        for (std::size_t t = 0; t < path.size(); ++t) s += f.fn(path[t]) - f.fn(replica[t]);
        g.per_member.push_back(std::abs(s) / rn);
        g.gap = std::max(g.gap, g.per_member.back());
    }
    return g;
}

/// Seeds of repetition i: path and replica streams.
inline std::uint64_t path_seed(std::uint64_t seed, std::size_t i) { return derive_seed(derive_seed(seed, i), 0); }
inline std::uint64_t replica_seed(std::uint64_t seed, std::size_t i) { return derive_seed(derive_seed(seed, i), 1); }

struct TauSettings {
    int outer = 400;
    int inner = 400;
};

/// tau_F(q) without the envelope normalization. Exact zero for iid and for ma
/// at lags beyond the memory; nested Monte Carlo for the other Markov kinds.
inline MixingEstimate class_tau(const ProcessModel& model, const TestClass& cls, std::int64_t q, std::uint64_t seed,
                                TauSettings ts = {}, int workers = 1) {
    if (model.kind == ProcessKind::iid || (model.kind == ProcessKind::ma && q >= model.memory))
        return {q, 0.0, 0.0, "exact", 1.0};
    auto e = estimate_tau(model, cls, q, ts.outer, ts.inner, seed, workers);
    e.value *= e.normalizer;
    e.std_error *= e.normalizer;
    e.normalizer = 1.0;
    return e;
}

struct CouplingReport {
    std::int64_t n = 0, q = 0;
    int reps = 0;
    double mean_gap = 0.0, std_error = 0.0, median_gap = 0.0, max_gap = 0.0;
    MixingEstimate tau;
    double root_n_tau = 0.0;
    double ratio = std::numeric_limits<double>::quiet_NaN();  // mean_gap / (sqrt(n) tau)
    std::vector<double> gaps;
};

inline CouplingReport coupling_experiment(const ProcessModel& model, const TestClass& cls, std::int64_t n, std::int64_t q,
                                          int reps, std::uint64_t seed, int workers = 1, bool with_tau = true,
                                          TauSettings ts = {}) {
    if (reps < 2) throw std::invalid_argument("coupling_experiment: reps must be >= 2");
    CouplingReport r;
    r.n = n;
    r.q = q;
    r.reps = reps;
    auto gaps = parallel_map<double>(static_cast<std::size_t>(reps), workers, [&](std::size_t i) {
        const auto p = simulate(model, n, path_seed(seed, i));
        const auto rep = build_replica(p, q, replica_seed(seed, i));
        return coupling_gap(p.values, rep.values, cls).gap;
    });
    auto sorted = gaps;
    std::sort(sorted.begin(), sorted.end());
    r.median_gap = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                     : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
    r.max_gap = sorted.back();
    const auto e = jackknife_mean(gaps);
    r.mean_gap = e.estimate;
    r.std_error = e.std_error;
    r.gaps = std::move(gaps);
    if (with_tau) {
        r.tau = class_tau(model, cls, q, derive_seed(seed, 0x7461750000ULL + static_cast<std::uint64_t>(q)), ts, workers);
        r.root_n_tau = std::sqrt(static_cast<double>(n)) * r.tau.value;
        if (r.root_n_tau > 0.0) r.ratio = r.mean_gap / r.root_n_tau;
    }
    return r;
}

// ---------------------------------------------------------------------------
// block independence

/// Sums of f over consecutive blocks of length q.
inline std::vector<double> block_sums(const std::vector<double>& values, std::int64_t q, const TestFunction& f) {
    if (q < 1 || values.size() % static_cast<std::size_t>(q) != 0) throw std::invalid_argument("block_sums: q must divide n");
    std::vector<double> out(values.size() / static_cast<std::size_t>(q), 0.0);
    for (std::size_t t = 0; t < values.size(); ++t) out[t / static_cast<std::size_t>(q)] += f.fn(values[t]);
    return out;
}

struct IndependenceReport {
    int parity = 0;
    std::int64_t blocks = 0;  // blocks of this parity, all reps
    std::int64_t pairs = 0;
    double corr = 0.0;
    double threshold = 0.0;  // 3 / sqrt(pairs)
    bool pass = false;
};

/// Pooled correlation of (S_j, S_{j+2}) over same-parity j and all reps.
inline IndependenceReport block_independence_test(const std::vector<std::vector<double>>& sums_per_rep, int parity = 0) {
    IndependenceReport r;
    r.parity = parity;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (const auto& s : sums_per_rep) {
        for (std::size_t j = static_cast<std::size_t>(parity); j < s.size(); j += 2) ++r.blocks;
        for (std::size_t j = static_cast<std::size_t>(parity); j + 2 < s.size(); j += 2) {
            const double x = s[j], y = s[j + 2];
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
            ++r.pairs;
        }
    }
    if (r.blocks < 30 || r.pairs < 3) throw std::invalid_argument("block_independence_test: need at least 30 blocks of the family");
    const double np = static_cast<double>(r.pairs);
    const double cov = sxy / np - (sx / np) * (sy / np);
    const double vx = sxx / np - (sx / np) * (sx / np);
    const double vy = syy / np - (sy / np) * (sy / np);
    r.corr = vx > 0 && vy > 0 ? cov / std::sqrt(vx * vy) : 0.0;
    r.threshold = 3.0 / std::sqrt(np);
    r.pass = std::abs(r.corr) < r.threshold;
    return r;
}

/// Block sums of f over `reps` replicas (or raw paths when raw = true).
inline std::vector<std::vector<double>> replica_block_sums(const ProcessModel& model, const TestFunction& f, std::int64_t n,
                                                           std::int64_t q, int reps, std::uint64_t seed, bool raw,
                                                           int workers = 1) {
    return parallel_map<std::vector<double>>(static_cast<std::size_t>(reps), workers, [&](std::size_t i) {
        const auto p = simulate(model, n, path_seed(seed, i));
        if (raw) return block_sums(p.values, q, f);
        return block_sums(build_replica(p, q, replica_seed(seed, i)).values, q, f);
    });
}

// ---------------------------------------------------------------------------
// Bernstein tail

/// One-sided upper confidence limit for a binomial proportion (Clopper-Pearson).
inline double clopper_pearson_upper(std::int64_t successes, std::int64_t trials, double level = 0.95) {
    if (trials <= 0) throw std::invalid_argument("clopper_pearson_upper: trials must be positive");
    if (successes >= trials) return 1.0;
    if (successes == 0) return 1.0 - std::pow(1.0 - level, 1.0 / static_cast<double>(trials));
    return boost::math::ibeta_inv(static_cast<double>(successes + 1), static_cast<double>(trials - successes), level);
}

/// Quantile curve of |f(X)| under the stationary law: closed form for linear f
/// under Gaussian kinds, else the empirical curve of `samples` draws.
inline QuantileCurve function_curve(const ProcessModel& model, const TestFunction& f, int samples = 200000,
                                    std::uint64_t seed = 0x637572766573ULL) {
    Sampler rng(seed);
    std::vector<double> v(static_cast<std::size_t>(samples));
    const double sd = model.gaussian() ? model.marginal_sd() : 1.0;
    for (auto& x : v) x = f.fn(model.gaussian() ? sd * rng.normal() : stationary_draw(model, rng));
    return QuantileCurve::from_sample(v);
}

struct BernsteinRow {
    double u = 0.0;
    int k = 0;
    bool applicable = false;
    std::string note;
    double threshold = 0.0;  // u sqrt(2^k) b 16/3
    double bound = 0.0;      // 2 exp(-u 2^k)
    std::int64_t exceed = 0;
    std::int64_t reps = 0;
    double freq = 0.0;
    double ucl = 0.0;
    bool pass = true;
};

struct BernsteinReport {
    std::int64_t n = 0, q = 0;
    double b = 0.0;      // ||f||_q
    double sup_f = 0.0;  // ||f||_inf
    std::int64_t reps = 0;
    std::vector<BernsteinRow> rows;
    bool pass = true;
};

/// Repetitions needed for zero exceedances to put the UCL under `bound`.
inline std::int64_t reps_to_resolve(double bound, double level = 0.95) {
    return static_cast<std::int64_t>(std::ceil(std::log(1.0 - level) / std::log1p(-bound)));
}

/// Empirical tail of |G*_n[f]| against 2 exp(-u 2^k). b = ||f||_q under
/// `profile`. Rows whose preconditions fail are reported as inapplicable. The
/// repetition count is raised above min_reps when min_reps could not resolve
/// the smallest applicable bound.
inline BernsteinReport bernstein_check(const ProcessModel& model, const TestFunction& f, std::int64_t n, std::int64_t q,
                                       const MixingProfile& profile, const std::vector<double>& us,
                                       const std::vector<int>& ks, std::int64_t min_reps, std::uint64_t seed,
                                       int workers = 1, double b_override = -1.0) {
    if (n % q != 0) throw std::invalid_argument("bernstein_check: q must divide n");
    BernsteinReport rep;
    rep.n = n;
    rep.q = q;
    rep.sup_f = f.sup;
    rep.b = b_override > 0.0 ? b_override : q_norm(function_curve(model, f), q, profile);
    const double rn = std::sqrt(static_cast<double>(n));
    std::int64_t reps = min_reps;
    for (int k : ks)
        for (double u : us) {
            BernsteinRow row;
            row.u = u;
            row.k = k;
            const double sk = std::sqrt(std::ldexp(1.0, k));
            row.threshold = u * sk * rep.b * 16.0 / 3.0;
            row.bound = 2.0 * std::exp(-u * std::ldexp(1.0, k));
            const bool sup_ok = f.sup <= 2.0 * rn / (static_cast<double>(q) * sk) * rep.b;
            row.applicable = sup_ok && u >= 1.0;
            if (!row.applicable) row.note = "preconditions not met";
            else reps = std::max(reps, reps_to_resolve(row.bound));
            rep.rows.push_back(row);
        }
    rep.reps = reps;
    TestClass single{"single", {f}};
    const double mean = class_means(model, single)[0];
    constexpr std::int64_t chunk = 20000;
    const auto chunks = static_cast<std::size_t>((reps + chunk - 1) / chunk);
    auto counts = parallel_map<std::vector<std::int64_t>>(chunks, workers, [&](std::size_t c) {
        std::vector<std::int64_t> cnt(rep.rows.size(), 0);
        const auto lo = static_cast<std::int64_t>(c) * chunk;
        const auto hi = std::min(reps, lo + chunk);
        for (std::int64_t i = lo; i < hi; ++i) {
            const auto p = simulate(model, n, path_seed(seed, static_cast<std::size_t>(i)));
            const auto star = build_replica(p, q, replica_seed(seed, static_cast<std::size_t>(i)));
            double s = 0.0;
            for (double x : star.values) s += f.fn(x) - mean;
            const double g = std::abs(s) / rn;
            for (std::size_t r = 0; r < rep.rows.size(); ++r)
                if (g >= rep.rows[r].threshold) ++cnt[r];
        }
        return cnt;
    });
    for (std::size_t r = 0; r < rep.rows.size(); ++r) {
        auto& row = rep.rows[r];
        row.reps = reps;
        for (const auto& c : counts) row.exceed += c[r];
        row.freq = static_cast<double>(row.exceed) / static_cast<double>(reps);
        row.ucl = clopper_pearson_upper(row.exceed, reps);
        row.pass = !row.applicable || row.ucl <= row.bound;
        rep.pass = rep.pass && row.pass;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Gaussian coupling

inline double normal_quantile(double p) { return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p); }
inline double normal_cdf(double x) { return 0.5 * boost::math::erfc(-x / std::sqrt(2.0)); }

/// Quantile transform x -> sigma2 Phi^{-1}(F(x)) for normalized block sums
/// x = q^{-1/2} sum (f - E f). F is Phi(./sigma2) when the block sum is exactly
/// Gaussian (linear f, Gaussian kinds), else the mid-rank empirical cdf of
/// independent calibration blocks.
struct GaussianCouple {
    std::string member;
    std::int64_t q = 0;
    double sigma2 = 0.0;
    bool exact = false;
    std::vector<double> calibration;  // sorted

    double transform(double x) const {
        if (exact) return x;
        if (sigma2 == 0.0) return 0.0;
        const auto lo = std::lower_bound(calibration.begin(), calibration.end(), x);
        const auto hi = std::upper_bound(lo, calibration.end(), x);
        const double less = static_cast<double>(lo - calibration.begin());
        const double eq = static_cast<double>(hi - lo);
        const double u = (less + 0.5 * eq + 0.5) / (static_cast<double>(calibration.size()) + 1.0);
        return sigma2 * normal_quantile(u);
    }
};

inline GaussianCouple gaussian_couple(const ProcessModel& model, const TestFunction& f, double mean, std::int64_t q,
                                      int calibration_blocks, std::uint64_t seed, int workers = 1) {
    GaussianCouple g;
    g.member = f.name;
    g.q = q;
    if (f.name == "one") {
        g.exact = true;
        return g;
    }
    if (model.gaussian() && is_linear(f)) {
        g.exact = true;
        g.sigma2 = std::sqrt(linear_block_variance(model, q));
        return g;
    }
    const double rq = std::sqrt(static_cast<double>(q));
    g.calibration = parallel_map<double>(static_cast<std::size_t>(calibration_blocks), workers, [&](std::size_t i) {
        const auto b = simulate(model, q, derive_seed(seed, i));
        double s = 0.0;
        for (double x : b.values) s += f.fn(x) - mean;
        return s / rq;
    });
    double ss = 0.0;
    for (double v : g.calibration) ss += v * v;
    g.sigma2 = std::sqrt(ss / static_cast<double>(g.calibration.size()));
    std::sort(g.calibration.begin(), g.calibration.end());
    return g;
}

struct StrongApproxSettings {
    int reps = 300;
    int calibration_blocks = 200000;
    double gamma_order = std::numeric_limits<double>::infinity();
    int moment_reps = 20000;
    TauSettings tau{};
};

struct StrongApproxPoint {
    std::int64_t n = 0, q = 0;
    double mean_gap = 0.0, std_error = 0.0;
    // right side with the constant set to 1 (the cover is the class itself, so
    // both chaining terms vanish)
    double moment_term = 0.0;  // (q/n)^{(g-2)/(2g)} sum_f sigma_g(f,q)
    double tau_term = 0.0;     // sqrt(n) tau_F(q)
    double rhs = 0.0;
    double implied_constant = 0.0;  // mean_gap / rhs
    MixingEstimate tau;
    std::vector<double> sigma2;          // per member
    std::vector<double> z_variance;      // sample Var(Z_n[f]) over reps
    std::vector<double> z_block_variance;  // sample Var of the block-level Gaussians
};

inline StrongApproxPoint strong_approx_experiment(const ProcessModel& model, const TestClass& cls, std::int64_t n,
                                                  std::int64_t q, std::uint64_t seed, const StrongApproxSettings& st = {},
                                                  int workers = 1) {
    if (q < 1 || n % q != 0) throw std::invalid_argument("strong_approx_experiment: q must divide n");
    StrongApproxPoint pt;
    pt.n = n;
    pt.q = q;
    const auto means = class_means(model, cls);
    std::vector<GaussianCouple> couples;
    for (std::size_t i = 0; i < cls.size(); ++i) {
        couples.push_back(gaussian_couple(model, cls.members[i], means[i], q, st.calibration_blocks,
                                          derive_seed(seed, {0x63616cULL, static_cast<std::uint64_t>(q), i}), workers));
        pt.sigma2.push_back(couples.back().sigma2);
    }
    const double rn = std::sqrt(static_cast<double>(n));
    const double rq = std::sqrt(static_cast<double>(q));
    const double scale = std::sqrt(static_cast<double>(q) / static_cast<double>(n));
    struct Rep {
        double gap = 0.0;
        std::vector<double> z, zb2;
    };
    auto reps = parallel_map<Rep>(static_cast<std::size_t>(st.reps), workers, [&](std::size_t r) {
        const auto p = simulate(model, n, path_seed(seed, r));
        const auto star = build_replica(p, q, replica_seed(seed, r));
        const auto g = empirical_process(p.values, cls, means);
        Rep out;
        for (std::size_t i = 0; i < cls.size(); ++i) {
            const auto sums = block_sums(star.values, q, cls.members[i]);
            double z = 0.0, zb2 = 0.0;
            for (double s : sums) {
                const double zj = couples[i].transform((s - rq * rq * means[i]) / rq);
                z += zj;
                zb2 += zj * zj;
            }
            z *= scale;
            out.z.push_back(z);
            out.zb2.push_back(zb2 / static_cast<double>(sums.size()));
            out.gap = std::max(out.gap, std::abs(g[i] - z));
        }
        return out;
    });
    std::vector<double> gaps;
    for (const auto& r : reps) gaps.push_back(r.gap);
    const auto e = jackknife_mean(std::move(gaps));
    pt.mean_gap = e.estimate;
    pt.std_error = e.std_error;
    for (std::size_t i = 0; i < cls.size(); ++i) {
        double s2 = 0.0, b2 = 0.0;
        for (const auto& r : reps) {
            s2 += r.z[i] * r.z[i];
            b2 += r.zb2[i];
        }
        pt.z_variance.push_back(s2 / static_cast<double>(reps.size()));
        pt.z_block_variance.push_back(b2 / static_cast<double>(reps.size()));
    }
    const double g = st.gamma_order;
    const double power = std::isinf(g) ? 0.5 : (g - 2.0) / (2.0 * g);
    double msum = 0.0;
    for (std::size_t i = 0; i < cls.size(); ++i)
        msum += sigma_m(model, cls.members[i], q, g, st.moment_reps, derive_seed(seed, {0x6d6f6dULL, static_cast<std::uint64_t>(q), i}),
                        workers).value;
    pt.moment_term = std::pow(static_cast<double>(q) / static_cast<double>(n), power) * msum;
    pt.tau = class_tau(model, cls, q, derive_seed(seed, {0x746175ULL, static_cast<std::uint64_t>(q)}), st.tau, workers);
    pt.tau_term = rn * pt.tau.value;
    pt.rhs = pt.moment_term + pt.tau_term;
    pt.implied_constant = pt.rhs > 0.0 ? pt.mean_gap / pt.rhs : 0.0;
    return pt;
}

/// Consecutive means never increase beyond 1.96 standard errors of the difference.
inline bool non_increasing_95(const std::vector<StrongApproxPoint>& pts) {
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double diff = pts[i].mean_gap - pts[i - 1].mean_gap;
        const double se = std::hypot(pts[i].std_error, pts[i - 1].std_error);
        if (diff > 1.96 * se) return false;
    }
    return true;
}

}  // namespace mixbound
