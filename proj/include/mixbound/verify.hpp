// End-to-end checks grouped into suites. Each check returns pass/fail plus the
// numbers behind it; the report carries no timings so it is reproducible.
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "mixbound/chaining.hpp"
#include "mixbound/coupling.hpp"
#include "mixbound/grid.hpp"
#include "mixbound/moments.hpp"
#include "mixbound/norms.hpp"
#include "mixbound/processes.hpp"
#include "mixbound/profile.hpp"
#include "mixbound/rates.hpp"
#include "mixbound/report.hpp"
#include "mixbound/rng.hpp"

namespace mixbound {

namespace tol {
inline constexpr std::int64_t lattice_limit = 1'000'000;
inline constexpr int schedule_points = 50;
inline constexpr int mu_grid = 1000;
inline constexpr double envelope_slack = 1e-12;
inline constexpr std::int64_t envelope_qmax = 1'000'000;
inline constexpr int envelope_points = 40;
inline constexpr double rate_nmin = 1e3, rate_nmax = 1e7;
inline constexpr double slope_tol = 0.05;
inline constexpr double critical_band = 3.0;
inline constexpr double critical_tail_from = 1e5;
inline constexpr double iid_norm_rel = 1e-12;
inline constexpr int gamma_classes_per_size = 10;
inline constexpr int greedy_classes = 100;
inline constexpr double greedy_slack = 1e-12;
inline constexpr int chain_tuples = 100;
inline constexpr double chain_residual = 1e-12;
inline constexpr int halfnormal_reps = 2000;
inline constexpr double halfnormal_se = 3.0;
inline constexpr int coupling_reps = 200;
inline constexpr double coupling_slope_rel = 0.30;
inline constexpr int independence_reps = 200;
inline constexpr std::int64_t bernstein_min_reps = 5000;
inline constexpr int strong_reps = 300;
}  // namespace tol

struct VerifyOptions {
    std::uint64_t seed = 7;
    int workers = 1;
    std::ostream* log = nullptr;  // progress and timings
};

struct CriterionResult {
    int id = 0;
    std::string suite;
    std::string title;
    bool pass = false;
    Json detail;
};

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<CriterionResult> results;

    bool pass() const {
        for (const auto& r : results)
            if (!r.pass) return false;
        return true;
    }
    Json to_json() const {
        Json j;
        j["suite"] = suite;
        j["seed"] = seed;
        j["pass"] = pass();
        j["criteria"] = Json::array();
        for (const auto& r : results)
            j["criteria"].push_back({{"id", r.id}, {"suite", r.suite}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}});
        return j;
    }
};

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"grid", "norms", "rates", "chaining", "coupling", "all"};
    return names;
}

namespace verify_detail {

inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(y.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

inline std::vector<MixingProfile> four_profiles() {
    return {MixingProfile::iid(), MixingProfile::m_dependent(5), MixingProfile::polynomial(1.0),
            MixingProfile::exponential(0.7)};
}

// ---- random finite classes (chaining checks)

inline FunctionClass random_class(Engine& rng, std::size_t size, std::size_t support = 5) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<Vec> m(size, Vec(support));
    for (auto& v : m)
        for (auto& x : v) x = g(rng);
    Vec w(support);
    double t = 0;
    for (auto& x : w) t += (x = u(rng));
    for (auto& x : w) x /= t;
    return FunctionClass(m, w);
}

inline NormFamily random_family(Engine& rng, const Vec& w) {
    switch (rng() % 4) {
    case 0: return NormFamily::l2(w);
    case 1: return NormFamily::lr(w, 3.0);
    case 2: return NormFamily::linf(w);
    default: {
        const std::int64_t n = std::vector<std::int64_t>{96, 384, 1536}[rng() % 3];
        const auto p = std::vector<MixingProfile>{MixingProfile::polynomial(0.7), MixingProfile::exponential(0.6),
                                                  MixingProfile::m_dependent(3)}[rng() % 3];
        return NormFamily::schedule(w, n, p);
    }
    }
}

inline PartitionSequence random_sequence(Engine& rng, std::size_t n) {
    PartitionSequence s;
    s.levels.push_back(Partition(n, 0));
    for (std::size_t l = 1;; ++l) {
        Partition p = s.levels.back();
        const auto cap = level_cap(l);
        for (std::size_t i = 0; i < n; ++i)
            if (cell_count(canonical(p)) < cap && rng() % 3 == 0) p[i] = static_cast<int>(n + i);
        p = canonical(p);
        s.levels.push_back(p);
        if (cell_count(p) == static_cast<int>(n)) break;
        if (l > 6) {
            for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<int>(i);
            s.levels.push_back(p);
            break;
        }
    }
    return s;
}

// ---- brute-force gamma: every chain of restricted-growth partitions

inline void all_partitions(std::size_t n, std::int64_t cap, Partition& cur, std::vector<Partition>& out) {
    if (cur.size() == n) {
        out.push_back(cur);
        return;
    }
    int mx = -1;
    for (int v : cur) mx = std::max(mx, v);
    for (int v = 0; v <= mx + 1 && v < cap; ++v) {
        cur.push_back(v);
        all_partitions(n, cap, cur, out);
        cur.pop_back();
    }
}

inline bool nested(const Partition& fine, const Partition& coarse) {
    for (std::size_t i = 0; i < fine.size(); ++i)
        for (std::size_t j = 0; j < fine.size(); ++j)
            if (fine[i] == fine[j] && coarse[i] != coarse[j]) return false;
    return true;
}

inline Vec spread(const FunctionClass& c, std::size_t f, const Partition& p) {
    Vec d(c.support_size(), 0.0);
    for (std::size_t x = 0; x < d.size(); ++x) {
        double lo = c.member(f)[x], hi = lo;
        for (std::size_t g = 0; g < c.size(); ++g)
            if (p[g] == p[f]) {
                lo = std::min(lo, c.member(g)[x]);
                hi = std::max(hi, c.member(g)[x]);
            }
        d[x] = hi - lo;
    }
    return d;
}

inline double brute_gamma(const FunctionClass& c, const NormFamily& fam) {
    const auto n = c.size();
    if (n == 1) return 0.0;
    const auto depth = gamma_search_depth(n);
    std::vector<std::vector<Partition>> per_level(depth + 1);
    per_level[0] = {Partition(n, 0)};
    for (std::size_t l = 1; l < depth; ++l) {
        Partition cur;
        all_partitions(n, level_cap(l), cur, per_level[l]);
    }
    Partition singles(n);
    for (std::size_t i = 0; i < n; ++i) singles[i] = static_cast<int>(i);
    per_level[depth] = {singles};
    double best = std::numeric_limits<double>::infinity();
    std::vector<Partition> chain{per_level[0][0]};
    std::function<void(std::size_t)> rec = [&](std::size_t l) {
        if (l > depth) {
            double worst = 0.0;
            for (std::size_t f = 0; f < n; ++f) {
                double s = 0.0;
                for (std::size_t k = 0; k <= depth; ++k)
                    s += std::sqrt(std::ldexp(1.0, static_cast<int>(k))) * fam(k, spread(c, f, chain[k]));
                worst = std::max(worst, s);
            }
            best = std::min(best, worst);
            return;
        }
        for (const auto& p : per_level[l])
            if (nested(p, chain.back())) {
                chain.push_back(p);
                rec(l + 1);
                chain.pop_back();
            }
    };
    rec(1);
    return std::sqrt(2.0) * best;
}

}  // namespace verify_detail

// ---------------------------------------------------------------------------
// grid

inline CriterionResult criterion_1(const VerifyOptions&) {
    CriterionResult r{1, "grid", "Lattice gap: consecutive divisors satisfy q' <= 2q for every lattice n up to 1e6", true, {}};
    const auto ns = lattice_members(default_basis_size, tol::lattice_limit);
    std::int64_t bad = 0;
    double worst = 0.0;
    for (auto n : ns) {
        const auto d = divisors(n);
        for (std::size_t i = 1; i < d.size(); ++i) {
            const double ratio = static_cast<double>(d[i]) / static_cast<double>(d[i - 1]);
            worst = std::max(worst, ratio);
            if (d[i] > 2 * d[i - 1]) ++bad;
        }
    }
    r.pass = bad == 0;
    r.detail = {{"lattice_members", ns.size()}, {"violations", bad}, {"max_ratio", worst}};
    return r;
}

inline CriterionResult criterion_2(const VerifyOptions&) {
    CriterionResult r{2, "grid", "Schedule: IID gives q=1, m-dependent gives smallest divisor >= n/4, non-increasing", true, {}};
    const auto all = lattice_members(default_basis_size, tol::lattice_limit);
    std::vector<std::int64_t> ns;
    for (int i = 0; i < tol::schedule_points; ++i)
        ns.push_back(all[static_cast<std::size_t>(i) * (all.size() - 1) / (tol::schedule_points - 1)]);
    std::int64_t iid_bad = 0, mdep_bad = 0, mono_bad = 0, general_bad = 0;
    for (auto n : ns) {
        const auto si = block_schedule(n, MixingProfile::iid());
        for (auto q : si.q_seq) iid_bad += q != 1;
        const auto divs = divisors(n);
        // memory at least n/4: the closed form [n/4]
        const auto sm = block_schedule(n, MixingProfile::m_dependent(n));
        mdep_bad += sm.at(0) != smallest_divisor_at_least(divs, static_cast<double>(n) / 4.0);
        // general memory: smallest divisor >= min(m, n/4)
        for (std::int64_t m : {2, 7, 40}) {
            const auto s = block_schedule(n, MixingProfile::m_dependent(m));
            general_bad += s.at(0) != smallest_divisor_at_least(divs, std::min(static_cast<double>(m), n / 4.0));
        }
        for (const auto& p : verify_detail::four_profiles()) {
            const auto s = block_schedule(n, p);
            for (std::size_t k = 1; k < s.q_seq.size(); ++k) mono_bad += s.q_seq[k] > s.q_seq[k - 1];
        }
    }
    r.pass = iid_bad == 0 && mdep_bad == 0 && mono_bad == 0 && general_bad == 0;
    r.detail = {{"n_count", ns.size()}, {"iid_violations", iid_bad}, {"mdep_quarter_violations", mdep_bad},
                {"mdep_general_violations", general_bad}, {"monotone_violations", mono_bad}};
    return r;
}

// ---------------------------------------------------------------------------
// norms

inline CriterionResult criterion_3(const VerifyOptions&) {
    CriterionResult r{3, "norms", "mu_q sandwich on a 1e3-point u-grid, 4 profiles, q in {1,10,100,1000}", true, {}};
    std::int64_t checks = 0, bad = 0;
    for (const auto& p : verify_detail::four_profiles())
        for (std::int64_t q : {1, 10, 100, 1000})
            for (int i = 1; i <= tol::mu_grid; ++i) {
                const double u = 0.5 * (i - 0.5) / tol::mu_grid;
                const auto mu = mu_q(u, q, p);
                const auto inv = p.theta_inverse(2.0 * u);
                ++checks;
                if (!(std::min(inv, q + 1) <= mu && mu <= std::min(inv + 1, q + 1))) ++bad;
            }
    r.pass = bad == 0;
    r.detail = {{"checks", checks}, {"violations", bad}, {"grid", "u = (i - 1/2) / 2000, i = 1..1000"}};
    return r;
}

inline CriterionResult criterion_6(const VerifyOptions& o) {
    CriterionResult r{6, "norms", "IID norm identity ||f||_q = ||f||_L2 for 20 random quantile curves", true, {}};
    Engine rng(derive_seed(o.seed, 6));
    std::uniform_real_distribution<double> v(-3.0, 3.0), w(0.0, 1.0);
    double worst = 0.0, worst_half = 0.0;
    for (int t = 0; t < 20; ++t) {
        std::vector<double> vals, wts;
        for (int i = 0; i < 6; ++i) {
            vals.push_back(v(rng));
            wts.push_back(w(rng));
        }
        const auto c = QuantileCurve::from_discrete(vals, wts);
        const double qn = q_norm(c, 10, MixingProfile::iid());
        worst = std::max(worst, std::abs(qn - c.l2_norm()) / c.l2_norm());
        const double half = std::sqrt(2.0 * c.partial_square_integral(0.5));
        worst_half = std::max(worst_half, std::abs(qn - half) / half);
    }
    r.pass = worst <= tol::iid_norm_rel;
    r.detail = {{"max_rel_error_vs_l2", worst},
                {"max_rel_error_vs_2_int_0_half_Q2", worst_half},
                {"tolerance", tol::iid_norm_rel}};
    return r;
}

inline CriterionResult criterion_13(const VerifyOptions&) {
    CriterionResult r{13, "norms", "Variance bound sigma_2(f,q)^2 <= 2||f||_q^2 for AR(1), identity, q in {4,8,16,32}", true, {}};
    Json rows = Json::array();
    bool ok = true;
    for (double rho : {0.5, 0.9}) {
        const auto m = ProcessModel::ar1(rho);
        const auto prof = MixingProfile::exponential(rho);
        for (std::int64_t q : {4, 8, 16, 32}) {
            const double s2 = linear_block_variance(m, q);
            const double nq = q_norm(HalfNormalCurve(m.marginal_sd()), q, prof);
            const bool pass = s2 <= 2.0 * nq * nq;
            ok = ok && pass;
            rows.push_back({{"rho", rho}, {"q", q}, {"sigma2_sq", s2}, {"two_qnorm_sq", 2.0 * nq * nq}, {"pass", pass}});
        }
    }
    r.pass = ok;
    r.detail = {{"rows", rows}};
    return r;
}

// ---------------------------------------------------------------------------
// rates

inline CriterionResult criterion_4(const VerifyOptions&) {
    CriterionResult r{4, "rates", "Envelope inequalities for B_r(q), all four cases, q log-spaced to 1e6", true, {}};
    std::vector<std::int64_t> qs;
    for (int i = 0; i < tol::envelope_points; ++i) {
        const auto q = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(tol::envelope_qmax), i / double(tol::envelope_points - 1))));
        if (qs.empty() || qs.back() != q) qs.push_back(q);
    }
    struct Pair { double m, r; int c; };
    std::vector<Pair> pairs{{3, 4, 2}, {5, 3, 2}, {6, 2.5, 2}, {2.5, 4, 2}, {2, 4, 3}, {1.5, 6, 3},
                            {0.5, 4, 4}, {1, 3, 4}, {1, 4, 4}, {0.2, 2.5, 4}, {0.5, 3, 4}};
    for (double m : {1.0, 3.0, 8.0})
        for (double rr : {2.5, 4.0, 7.0}) pairs.push_back({m, rr, 1});
    Json rows = Json::array();
    bool ok = true;
    for (const auto& pr : pairs) {
        const auto prof = pr.c == 1 ? MixingProfile::m_dependent(static_cast<std::int64_t>(pr.m)) : MixingProfile::polynomial(pr.m);
        std::int64_t lo_bad = 0, hi_bad = 0;
        for (auto q : qs) {
            const double b = b_r(q, pr.r, prof);
            const auto env = closed_form_envelopes(q, pr.m, pr.r, pr.c);
            lo_bad += !(env.lower <= b * (1 + tol::envelope_slack));
            hi_bad += !(b <= env.upper * (1 + tol::envelope_slack));
        }
        ok = ok && lo_bad == 0 && hi_bad == 0;
        rows.push_back({{"case", pr.c}, {"m", pr.m}, {"r", pr.r}, {"lower_violations", lo_bad}, {"upper_violations", hi_bad}});
    }
    r.pass = ok;
    r.detail = {{"q_points", qs.size()}, {"pairs", rows}};
    return r;
}

inline CriterionResult criterion_5(const VerifyOptions&) {
    CriterionResult r{5, "rates", "Rate regimes: slopes of frak_n over lattice n in [1e3, 1e7] and the critical band", true, {}};
    std::vector<std::int64_t> ns;
    for (auto n : lattice_members(default_basis_size, static_cast<std::int64_t>(tol::rate_nmax)))
        if (n >= tol::rate_nmin) ns.push_back(n);
    auto fit = [&](double m, double rr) {
        std::vector<double> x, y;
        for (auto n : ns) {
            x.push_back(std::log(static_cast<double>(n)));
            y.push_back(std::log(frak_n(n, rr, MixingProfile::polynomial(m))));
        }
        return verify_detail::ols_slope(x, y);
    };
    Json rows = Json::array();
    bool ok = true;
    {
        const double s = fit(3.0, 4.0);
        const bool pass = std::abs(s) <= tol::slope_tol;
        ok = ok && pass;
        rows.push_back({{"regime", "fast"}, {"m", 3.0}, {"r", 4.0}, {"slope", s}, {"target", 0.0}, {"pass", pass}});
    }
    for (auto [m, rr] : std::vector<std::pair<double, double>>{{0.5, 4.0}, {1.0, 3.0}}) {
        const double s = fit(m, rr);
        const double target = regime_classify(m, rr).exponent;
        const bool pass = std::abs(s - target) <= tol::slope_tol;
        ok = ok && pass;
        rows.push_back({{"regime", "slow"}, {"m", m}, {"r", rr}, {"slope", s}, {"target", target}, {"pass", pass}});
    }
    {
        const double m = 2.0, rr = 4.0;
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (auto n : ns)
            if (n >= tol::critical_tail_from) {
                const double ratio = frak_n(n, rr, MixingProfile::polynomial(m)) / std::pow(std::log(static_cast<double>(n)), 1.0 / m);
                lo = std::min(lo, ratio);
                hi = std::max(hi, ratio);
            }
        const bool pass = hi / lo <= tol::critical_band;
        ok = ok && pass;
        rows.push_back({{"regime", "critical"}, {"m", m}, {"r", rr}, {"ratio_min", lo}, {"ratio_max", hi}, {"band", hi / lo}, {"pass", pass}});
    }
    r.pass = ok;
    r.detail = {{"n_count", ns.size()}, {"fits", rows}};
    return r;
}

// ---------------------------------------------------------------------------
// chaining

inline CriterionResult criterion_7(const VerifyOptions& o) {
    CriterionResult r{7, "chaining", "gamma_exact equals brute force for sizes <= 6; greedy >= exact on 100 classes of size 8", true, {}};
    Engine rng(derive_seed(o.seed, 7));
    std::int64_t exact_checks = 0, exact_bad = 0, greedy_bad = 0;
    for (std::size_t size = 1; size <= 6; ++size)
        for (int t = 0; t < tol::gamma_classes_per_size; ++t) {
            const auto c = verify_detail::random_class(rng, size);
            const auto fam = verify_detail::random_family(rng, c.weights());
            ++exact_checks;
            exact_bad += gamma_exact(c, fam).value != verify_detail::brute_gamma(c, fam);
        }
    double min_ratio = std::numeric_limits<double>::infinity();
    for (int t = 0; t < tol::greedy_classes; ++t) {
        const auto c = verify_detail::random_class(rng, 8);
        const auto fam = verify_detail::random_family(rng, c.weights());
        const double g = gamma_greedy(c, fam).value, e = gamma_exact(c, fam).value;
        if (e > 0) min_ratio = std::min(min_ratio, g / e);
        greedy_bad += !(g >= e * (1 - tol::greedy_slack));
    }
    r.pass = exact_bad == 0 && greedy_bad == 0;
    r.detail = {{"exact_checks", exact_checks}, {"exact_mismatches", exact_bad}, {"greedy_checks", tol::greedy_classes},
                {"greedy_violations", greedy_bad}, {"min_greedy_over_exact", min_ratio}};
    return r;
}

inline CriterionResult criterion_8(const VerifyOptions& o) {
    CriterionResult r{8, "chaining", "Chain identity residual < 1e-12 on 100 random tuples with binding thresholds", true, {}};
    Engine rng(derive_seed(o.seed, 8));
    double worst = 0.0;
    std::int64_t binding = 0, xi_bad = 0;
    const std::vector<MixingProfile> profs{MixingProfile::iid(), MixingProfile::polynomial(0.5),
                                           MixingProfile::exponential(0.8), MixingProfile::m_dependent(4)};
    for (int t = 0; t < tol::chain_tuples; ++t) {
        const std::size_t size = 2 + rng() % 7;
        const auto c = verify_detail::random_class(rng, size, 12);
        const auto seq = verify_detail::random_sequence(rng, size);
        const auto& p = profs[static_cast<std::size_t>(t) % profs.size()];
        const std::int64_t n = std::vector<std::int64_t>{6, 12, 96, 1536}[rng() % 4];
        const auto f = rng() % size, f0 = rng() % size;
        const auto dec = chain_decomposition(c, f, f0, seq, p, n);
        worst = std::max(worst, dec.residual);
        for (auto m : dec.stop) binding += m >= 0;
        for (std::size_t k = 0; k < dec.levels; ++k)
            for (std::size_t x = 0; x < c.support_size(); ++x) xi_bad += std::abs(dec.xi[k][x]) > dec.diam[k][x];
    }
    r.pass = worst < tol::chain_residual && binding > 0 && xi_bad == 0;
    r.detail = {{"tuples", tol::chain_tuples}, {"max_residual", worst}, {"binding_points", binding}, {"xi_exceeds_diameter", xi_bad}};
    return r;
}

// ---------------------------------------------------------------------------
// coupling

inline CriterionResult criterion_9(const VerifyOptions& o) {
    CriterionResult r{9, "coupling", "Half-normal calibration: IID N(0,1), identity, n=384: mean |G_n| = sqrt(2/pi) within 3 SE", true, {}};
    const auto m = ProcessModel::iid();
    const auto cls = builtin_class("identity");
    const auto means = class_means(m, cls);
    const std::uint64_t s = derive_seed(o.seed, 9);
    auto vals = parallel_map<double>(tol::halfnormal_reps, o.workers, [&](std::size_t i) {
        return std::abs(empirical_process(simulate(m, 384, derive_seed(s, i)).values, cls, means)[0]);
    });
    const auto e = jackknife_mean(std::move(vals));
    const double target = std::sqrt(2.0 / M_PI);
    r.pass = std::abs(e.estimate - target) <= tol::halfnormal_se * e.std_error;
    r.detail = {{"estimate", e.estimate}, {"std_error", e.std_error}, {"target", target}, {"z", (e.estimate - target) / e.std_error}};
    return r;
}

inline CriterionResult criterion_10(const VerifyOptions& o) {
    CriterionResult r{10, "coupling", "Coupling gap: zero for iid and ma(3) at q in {6,12}; ar1 0.9 decreasing in q with slope log 0.9 +-30%", true, {}};
    const auto cls = builtin_class("lipschitz5");
    const std::uint64_t s = derive_seed(o.seed, 10);
    double exact_max = 0.0;
    Json exact = Json::array();
    for (const auto& m : {ProcessModel::iid(), ProcessModel::ma(3)})
        for (std::int64_t q : {6, 12}) {
            const auto rep = coupling_experiment(m, cls, 1536, q, tol::coupling_reps, s, o.workers, false);
            exact_max = std::max(exact_max, rep.max_gap);
            exact.push_back({{"process", m.id()}, {"q", q}, {"max_gap", rep.max_gap}});
        }
    Json rows = Json::array();
    std::vector<double> xs, ys;
    bool decreasing = true;
    double prev = std::numeric_limits<double>::infinity();
    for (std::int64_t q : {8, 16, 32}) {
        const auto rep = coupling_experiment(ProcessModel::ar1(0.9), cls, 1536, q, tol::coupling_reps, s, o.workers, true);
        decreasing = decreasing && rep.mean_gap < prev;
        prev = rep.mean_gap;
        xs.push_back(static_cast<double>(q));
        ys.push_back(std::log(rep.mean_gap));
        rows.push_back({{"q", q}, {"mean_gap", rep.mean_gap}, {"std_error", rep.std_error}, {"median_gap", rep.median_gap},
                        {"tau_hat", rep.tau.value}, {"tau_std_error", rep.tau.std_error}, {"root_n_tau", rep.root_n_tau},
                        {"gap_over_root_n_tau", rep.ratio}});
    }
    const double slope = verify_detail::ols_slope(xs, ys);
    const double target = std::log(0.9);
    const bool slope_ok = std::abs(slope - target) <= tol::coupling_slope_rel * std::abs(target);
    r.pass = exact_max == 0.0 && decreasing && slope_ok;
    r.detail = {{"exact_cases", exact}, {"ar1", rows}, {"slope", slope}, {"target_slope", target},
                {"slope_ok", slope_ok}, {"decreasing", decreasing}};
    return r;
}

inline CriterionResult criterion_11(const VerifyOptions& o) {
    CriterionResult r{11, "coupling", "Block independence: ar1 0.9 replica even blocks pass at q=8; raw even blocks fail at q=2", true, {}};
    const auto m = ProcessModel::ar1(0.9);
    const auto f = builtin_function("x");
    const std::uint64_t s = derive_seed(o.seed, 11);
    const auto rep = block_independence_test(replica_block_sums(m, f, 1536, 8, tol::independence_reps, s, false, o.workers), 0);
    const auto odd = block_independence_test(replica_block_sums(m, f, 1536, 8, tol::independence_reps, s, false, o.workers), 1);
    const auto raw = block_independence_test(replica_block_sums(m, f, 1536, 2, tol::independence_reps, s, true, o.workers), 0);
    auto js = [](const IndependenceReport& x) {
        return Json{{"corr", x.corr}, {"pairs", x.pairs}, {"threshold", x.threshold}, {"pass", x.pass}};
    };
    r.pass = rep.pass && !raw.pass;
    r.detail = {{"replica_even_q8", js(rep)}, {"replica_odd_q8", js(odd)}, {"raw_even_q2", js(raw)}};
    return r;
}

inline CriterionResult criterion_12(const VerifyOptions& o) {
    CriterionResult r{12, "coupling", "Bernstein tail: exceedance UCL <= 2exp(-u 2^k) for u in {1,1.5,2}, k in {2,3}", true, {}};
    const auto m = ProcessModel::ar1(0.5);
    const auto rep = bernstein_check(m, builtin_function("tanh"), 48, 4, MixingProfile::exponential(0.5), {1.0, 1.5, 2.0},
                                     {2, 3}, tol::bernstein_min_reps, derive_seed(o.seed, 12), o.workers);
    Json rows = Json::array();
    int applicable = 0;
    for (const auto& w : rep.rows) {
        applicable += w.applicable;
        rows.push_back({{"u", w.u}, {"k", w.k}, {"applicable", w.applicable}, {"note", w.note}, {"threshold", w.threshold},
                        {"exceed", w.exceed}, {"freq", w.freq}, {"ucl", w.ucl}, {"bound", w.bound}, {"pass", w.pass}});
    }
    r.pass = rep.pass && applicable > 0;
    r.detail = {{"process", m.id()}, {"n", rep.n}, {"q", rep.q}, {"b", rep.b}, {"sup_f", rep.sup_f}, {"reps", rep.reps},
                {"min_reps", tol::bernstein_min_reps}, {"rows", rows}};
    return r;
}

inline CriterionResult criterion_14(const VerifyOptions& o) {
    CriterionResult r{14, "coupling", "Strong approximation: ar1 0.5, lipschitz4, n in {384,1536,6144}: gap non-increasing and below the assembled bound", true, {}};
    const auto m = ProcessModel::ar1(0.5);
    const auto cls = builtin_class("lipschitz4");
    StrongApproxSettings st;
    st.reps = tol::strong_reps;
    std::vector<StrongApproxPoint> pts;
    Json rows = Json::array();
    bool below = true;
    for (std::int64_t n : {384, 1536, 6144}) {
        const auto q = nearest_divisor(n, std::sqrt(static_cast<double>(n)));
        pts.push_back(strong_approx_experiment(m, cls, n, q, derive_seed(o.seed, 14), st, o.workers));
        const auto& p = pts.back();
        below = below && p.mean_gap <= p.rhs;
        rows.push_back({{"n", n}, {"q", q}, {"mean_gap", p.mean_gap}, {"std_error", p.std_error}, {"moment_term", p.moment_term},
                        {"tau_term", p.tau_term}, {"tau_hat", p.tau.value}, {"rhs_constant_one", p.rhs},
                        {"implied_constant", p.implied_constant}, {"sigma2", p.sigma2}, {"z_variance", p.z_variance},
                        {"z_block_variance", p.z_block_variance}});
    }
    const bool mono = non_increasing_95(pts);
    r.pass = mono && below;
    r.detail = {{"gamma_order", "inf"}, {"points", rows}, {"non_increasing_95", mono}, {"below_rhs", below}};
    return r;
}

// ---------------------------------------------------------------------------

using CriterionFn = CriterionResult (*)(const VerifyOptions&);

struct CriterionEntry {
    int id;
    const char* suite;
    CriterionFn fn;
};

inline const std::vector<CriterionEntry>& criteria_table() {
    static const std::vector<CriterionEntry> t{
        {1, "grid", criterion_1},       {2, "grid", criterion_2},         {3, "norms", criterion_3},
        {4, "rates", criterion_4},      {5, "rates", criterion_5},        {6, "norms", criterion_6},
        {7, "chaining", criterion_7},   {8, "chaining", criterion_8},     {9, "coupling", criterion_9},
        {10, "coupling", criterion_10}, {11, "coupling", criterion_11},   {12, "coupling", criterion_12},
        {13, "norms", criterion_13},    {14, "coupling", criterion_14},
    };
    return t;
}

inline CriterionResult run_criterion(const CriterionEntry& e, const VerifyOptions& o) {
    const auto t0 = std::chrono::steady_clock::now();
    auto res = e.fn(o);
    if (o.log) {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        *o.log << "criterion " << e.id << ": " << (res.pass ? "pass" : "FAIL") << " (" << secs << " s)\n";
    }
    return res;
}

/// Criterion 15: rerun every parallel criterion under another worker count
/// and compare the serialized results byte for byte.
inline CriterionResult criterion_15(const VerifyOptions& o, const std::vector<CriterionResult>& first) {
    CriterionResult r{15, "all", "Determinism: identical report across worker counts 1 and 4", true, {}};
    VerifyOptions other = o;
    other.workers = o.workers == 1 ? 4 : 1;
    Json compared = Json::array();
    bool same = true;
    for (const auto& e : criteria_table()) {
        if (std::string(e.suite) != "coupling") continue;
        const auto again = run_criterion(e, other);
        for (const auto& f : first)
            if (f.id == e.id) {
                const bool eq = to_stable_json(f.detail) == to_stable_json(again.detail) && f.pass == again.pass;
                same = same && eq;
                compared.push_back({{"id", e.id}, {"identical", eq}});
            }
    }
    r.pass = same;
    r.detail = {{"worker_counts", {1, 4}}, {"compared", compared}};
    return r;
}

/// Runs a suite; unknown names throw with the list of suites.
inline SuiteReport verify_suite(const std::string& name, const VerifyOptions& o) {
    bool known = false;
    for (const auto& s : suite_names()) known = known || s == name;
    if (!known) {
        std::string list;
        for (const auto& s : suite_names()) list += (list.empty() ? "" : ", ") + s;
        throw std::invalid_argument("unknown suite '" + name + "' (available: " + list + ")");
    }
    SuiteReport rep;
    rep.suite = name;
    rep.seed = o.seed;
    for (const auto& e : criteria_table())
        if (name == "all" || name == e.suite) rep.results.push_back(run_criterion(e, o));
    std::sort(rep.results.begin(), rep.results.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    if (name == "all") {
        const auto t0 = std::chrono::steady_clock::now();
        rep.results.push_back(criterion_15(o, rep.results));
        if (o.log)
            *o.log << "criterion 15: " << (rep.results.back().pass ? "pass" : "FAIL") << " ("
                   << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s)\n";
    }
    return rep;
}

}  // namespace mixbound
