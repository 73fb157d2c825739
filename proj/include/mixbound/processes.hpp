// Stationary processes driven by stored innovations, test-function classes
// over them, and the empirical process G_n[f].
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mixbound/parallel.hpp"
#include "mixbound/profile.hpp"
#include "mixbound/rng.hpp"

namespace mixbound {

enum class ProcessKind { iid, ma, ar1, lazy_renewal };

/// Gaussian innovations throughout; the renewal chain is driven by uniforms.
struct ProcessModel {
    ProcessKind kind = ProcessKind::iid;
    double rho = 0.0;            // ar1
    int memory = 1;              // ma: X_t = sum_{i<memory} w_i eps_{t-i}
    std::vector<double> weights; // ma
    double tail = 1.0;           // lazy_renewal: P(V >= k) = k^{-(tail+1)}
    double sigma = 1.0;          // innovation sd (iid: marginal sd)

    static ProcessModel iid(double sigma = 1.0) {
        if (!(sigma > 0.0)) throw std::invalid_argument("iid: sigma must be positive");
        ProcessModel m;
        m.sigma = sigma;
        return m;
    }
    /// Equal weights 1/sqrt(memory), so the marginal is N(0, sigma^2).
    static ProcessModel ma(int memory, double sigma = 1.0) {
        if (memory < 1) throw std::invalid_argument("ma: memory must be >= 1");
        if (!(sigma > 0.0)) throw std::invalid_argument("ma: sigma must be positive");
        ProcessModel m;
        m.kind = ProcessKind::ma;
        m.memory = memory;
        m.weights.assign(static_cast<std::size_t>(memory), 1.0 / std::sqrt(static_cast<double>(memory)));
        m.sigma = sigma;
        return m;
    }
    static ProcessModel ar1(double rho, double sigma = 1.0) {
        if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("ar1: |rho| must be < 1");
        if (!(sigma > 0.0)) throw std::invalid_argument("ar1: sigma must be positive");
        ProcessModel m;
        m.kind = ProcessKind::ar1;
        m.rho = rho;
        m.sigma = sigma;
        return m;
    }
    static ProcessModel lazy_renewal(double tail) {
        if (!(tail > 0.0)) throw std::invalid_argument("renewal: m must be positive");
        ProcessModel m;
        m.kind = ProcessKind::lazy_renewal;
        m.tail = tail;
        return m;
    }

    bool markov() const { return kind != ProcessKind::ma; }
    bool gaussian() const { return kind != ProcessKind::lazy_renewal; }

    /// Stationary marginal variance (Gaussian kinds only).
    double marginal_variance() const {
        switch (kind) {
        case ProcessKind::iid: return sigma * sigma;
        case ProcessKind::ar1: return sigma * sigma / (1.0 - rho * rho);
        case ProcessKind::ma: {
            double s = 0.0;
            for (double w : weights) s += w * w;
            return sigma * sigma * s;
        }
        default: return std::numeric_limits<double>::quiet_NaN();
        }
    }
    double marginal_sd() const { return std::sqrt(marginal_variance()); }

    /// Autocovariance at lag k (Gaussian kinds only).
    double autocovariance(std::int64_t k) const {
        k = std::abs(k);
        switch (kind) {
        case ProcessKind::iid: return k == 0 ? sigma * sigma : 0.0;
        case ProcessKind::ar1: return marginal_variance() * std::pow(rho, static_cast<double>(k));
        case ProcessKind::ma: {
            double s = 0.0;
            for (std::int64_t i = 0; i + k < memory; ++i) s += weights[i] * weights[i + k];
            return sigma * sigma * s;
        }
        default: throw std::invalid_argument("autocovariance: not available for renewal chains");
        }
    }

    std::string id() const {
        std::ostringstream os;
        os.precision(12);
        switch (kind) {
        case ProcessKind::iid: os << "iid"; if (sigma != 1.0) os << ":sigma=" << sigma; break;
        case ProcessKind::ma: os << "ma:m=" << memory; break;
        case ProcessKind::ar1: os << "ar1:rho=" << rho; break;
        case ProcessKind::lazy_renewal: os << "renewal:m=" << tail; break;
        }
        return os.str();
    }
};

/// `iid`, `ma:m=<int>`, `ar1:rho=<float>`, `renewal:m=<float>` (alias `lazy_renewal`).
inline ProcessModel parse_process(std::string_view spec) {
    if (spec == "iid") return ProcessModel::iid();
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) throw std::invalid_argument("unknown process spec '" + std::string(spec) + "'");
    const auto head = spec.substr(0, colon);
    const auto body = spec.substr(colon + 1);
    if (head == "iid") return ProcessModel::iid(detail::parse_named_value(body, "sigma"));
    if (head == "ma") {
        const double m = detail::parse_named_value(body, "m");
        if (m != std::floor(m)) throw std::invalid_argument("ma:m must be an integer");
        return ProcessModel::ma(static_cast<int>(m));
    }
    if (head == "ar1") return ProcessModel::ar1(detail::parse_named_value(body, "rho"));
    if (head == "renewal" || head == "lazy_renewal") return ProcessModel::lazy_renewal(detail::parse_named_value(body, "m"));
    throw std::invalid_argument("unknown process kind '" + std::string(head) + "'");
}

namespace detail {

/// Zeta(s) variate on {1,2,...} (Devroye, Non-Uniform Random Variate Generation, X.6.1).
template <typename R>
std::int64_t sample_zeta(double s, R& rng) {
    const double b = std::pow(2.0, s - 1.0);
    for (;;) {
        const double u = rng.uniform();
        const double v = rng.uniform();
        const double x = std::floor(std::pow(u, -1.0 / (s - 1.0)));
        if (!(x < 4.0e18)) continue;
        const double t = std::pow(1.0 + 1.0 / x, s - 1.0);
        if (v * x * (t - 1.0) / (b - 1.0) <= t / b) return static_cast<std::int64_t>(x);
    }
}

/// V with P(V >= k) = k^{-(m+1)}, from a uniform on (0,1].
inline double renewal_jump(double u, double tail) {
    const double v = std::floor(std::pow(u, -1.0 / (tail + 1.0)));
    return std::min(v, 4.0e18);
}

}  // namespace detail

/// Draw from the stationary law (ar1, iid, renewal).
template <typename R>
double stationary_draw(const ProcessModel& m, R& rng) {
    switch (m.kind) {
    case ProcessKind::iid:
    case ProcessKind::ar1: return m.marginal_sd() * rng.normal();
    case ProcessKind::lazy_renewal: return static_cast<double>(detail::sample_zeta(m.tail + 1.0, rng) - 1);
    case ProcessKind::ma: break;
    }
    throw std::invalid_argument("stationary_draw: ma has no scalar state");
}

template <typename R>
double draw_innovation(const ProcessModel& m, R& rng) {
    if (m.kind == ProcessKind::lazy_renewal) return rng.uniform();
    return m.sigma * rng.normal();
}

/// X_{t+1} = F(X_t, eps_{t+1}) for the Markov kinds.
inline double step(const ProcessModel& m, double x, double eps) {
    switch (m.kind) {
    case ProcessKind::iid: return eps;
    case ProcessKind::ar1: return m.rho * x + eps;
    case ProcessKind::lazy_renewal: return x >= 1.0 ? x - 1.0 : detail::renewal_jump(eps, m.tail) - 1.0;
    case ProcessKind::ma: break;
    }
    throw std::invalid_argument("step: ma is not Markov in X");
}

/// values[t] for t in [0, n). innovations[t] drives values[t] (unused at t = 0
/// for the Markov kinds, whose start is values[0]). For ma, presample holds
/// eps_{-memory+1..-1}, oldest first.
struct PathBundle {
    ProcessModel model;
    std::int64_t n = 0;
    std::uint64_t seed = 0;
    std::vector<double> values;
    std::vector<double> innovations;
    std::vector<double> presample;

    /// eps_t for t >= -(memory-1) (ma only).
    double ma_innovation(std::int64_t t) const {
        if (t >= 0) return innovations[static_cast<std::size_t>(t)];
        return presample[presample.size() + static_cast<std::size_t>(t)];
    }
};

inline double ma_value(const ProcessModel& m, const std::function<double(std::int64_t)>& eps, std::int64_t t) {
    double s = 0.0;
    for (int i = 0; i < m.memory; ++i) s += m.weights[static_cast<std::size_t>(i)] * eps(t - i);
    return s;
}

/// Stationary path. Every kind has an exact stationary start, so burn_in only
/// advances the chain before recording (the recorded innovations start after it).
inline PathBundle simulate(const ProcessModel& model, std::int64_t n, std::uint64_t seed, std::int64_t burn_in = 0) {
    if (n < 1) throw std::invalid_argument("simulate: n must be >= 1");
    if (burn_in < 0) throw std::invalid_argument("simulate: burn_in must be >= 0");
    Sampler eng(seed);
    PathBundle p;
    p.model = model;
    p.n = n;
    p.seed = seed;
    p.values.resize(static_cast<std::size_t>(n));
    p.innovations.assign(static_cast<std::size_t>(n), 0.0);
    if (model.kind == ProcessKind::ma) {
        std::vector<double> window(static_cast<std::size_t>(model.memory - 1));
        for (auto& e : window) e = draw_innovation(model, eng);
        for (std::int64_t b = 0; b < burn_in; ++b) {
            if (!window.empty()) {
                window.erase(window.begin());
                window.push_back(draw_innovation(model, eng));
            }
        }
        p.presample = window;
        for (auto& e : p.innovations) e = draw_innovation(model, eng);
        auto eps = [&p](std::int64_t t) { return p.ma_innovation(t); };
        for (std::int64_t t = 0; t < n; ++t) p.values[static_cast<std::size_t>(t)] = ma_value(model, eps, t);
        return p;
    }
    double x = stationary_draw(model, eng);
    for (std::int64_t b = 0; b < burn_in; ++b) x = step(model, x, draw_innovation(model, eng));
    p.values[0] = x;
    for (std::int64_t t = 1; t < n; ++t) {
        const double e = draw_innovation(model, eng);
        p.innovations[static_cast<std::size_t>(t)] = e;
        x = step(model, x, e);
        p.values[static_cast<std::size_t>(t)] = x;
    }
    if (model.kind == ProcessKind::iid) p.innovations = p.values;
    return p;
}

// ---------------------------------------------------------------------------
// test functions

struct TestFunction {
    std::string name;
    std::function<double(double)> fn;
    double sup = std::numeric_limits<double>::infinity();  // sup |f|
    double lipschitz = std::numeric_limits<double>::infinity();
};

inline TestFunction builtin_function(std::string_view name) {
    const double inf = std::numeric_limits<double>::infinity();
    if (name == "x") return {"x", [](double x) { return x; }, inf, 1.0};
    if (name == "neg_x") return {"neg_x", [](double x) { return -x; }, inf, 1.0};
    if (name == "abs") return {"abs", [](double x) { return std::abs(x); }, inf, 1.0};
    if (name == "tanh") return {"tanh", [](double x) { return std::tanh(x); }, 1.0, 1.0};
    if (name == "clip") return {"clip", [](double x) { return std::clamp(x, -1.0, 1.0); }, 1.0, 1.0};
    if (name == "sin") return {"sin", [](double x) { return std::sin(x); }, 1.0, 1.0};
    if (name == "cos") return {"cos", [](double x) { return std::cos(x); }, 1.0, 1.0};
    if (name == "softsign") return {"softsign", [](double x) { return x / (1.0 + std::abs(x)); }, 1.0, 1.0};
    if (name == "one") return {"one", [](double) { return 1.0; }, 1.0, 0.0};
    throw std::invalid_argument("unknown test function '" + std::string(name) + "'");
}

/// Finite class of test functions.
struct TestClass {
    std::string name;
    std::vector<TestFunction> members;

    std::size_t size() const { return members.size(); }
    /// Largest finite sup bound, or +inf when some member is unbounded.
    double envelope() const {
        double e = 0.0;
        for (const auto& f : members) e = std::max(e, f.sup);
        return e;
    }
};

/// Built-ins: identity, pm_identity, lipschitz4, lipschitz5, constant; or
/// `fn:<name>,<name>,...` with names from builtin_function.
inline TestClass builtin_class(std::string_view spec) {
    auto make = [&](std::initializer_list<const char*> names) {
        TestClass c;
        c.name = std::string(spec);
        for (const char* nm : names) c.members.push_back(builtin_function(nm));
        return c;
    };
    if (spec == "identity") return make({"x"});
    if (spec == "pm_identity") return make({"x", "neg_x"});
    if (spec == "lipschitz4") return make({"tanh", "clip", "sin", "cos"});
    if (spec == "lipschitz5") return make({"tanh", "clip", "sin", "cos", "softsign"});
    if (spec == "constant") return make({"one"});
    if (spec.substr(0, 3) == "fn:") {
        TestClass c;
        c.name = std::string(spec);
        std::string body(spec.substr(3));
        std::istringstream is(body);
        std::string tok;
        while (std::getline(is, tok, ',')) c.members.push_back(builtin_function(tok));
        if (c.members.empty()) throw std::invalid_argument("class spec: empty function list");
        return c;
    }
    throw std::invalid_argument("unknown class '" + std::string(spec) +
                                "' (known: identity, pm_identity, lipschitz4, lipschitz5, constant, fn:<f>,...)");
}

inline constexpr std::int64_t mean_mc_samples = 10'000'000;

namespace detail {

/// E f(X) for X ~ N(0, s^2) where a closed form exists.
inline bool gaussian_mean(const std::string& name, double s, double& out) {
    if (name == "x" || name == "neg_x" || name == "tanh" || name == "clip" || name == "sin" || name == "softsign") {
        out = 0.0;  // odd functions
        return true;
    }
    if (name == "cos") {
        out = std::exp(-0.5 * s * s);
        return true;
    }
    if (name == "abs") {
        out = s * std::sqrt(2.0 / M_PI);
        return true;
    }
    if (name == "one") {
        out = 1.0;
        return true;
    }
    return false;
}

inline std::mutex& mean_cache_mutex() {
    static std::mutex m;
    return m;
}
inline std::map<std::string, double>& mean_cache() {
    static std::map<std::string, double> c;
    return c;
}

}  // namespace detail

/// Stationary means E_P f. Closed forms under Gaussian marginals; otherwise a
/// 10^7-draw pass from the stationary law with a fixed seed, cached per (model, f).
inline std::vector<double> class_means(const ProcessModel& model, const TestClass& cls) {
    std::vector<double> out(cls.size(), 0.0);
    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < cls.size(); ++i) {
        const auto& f = cls.members[i];
        if (model.gaussian() && detail::gaussian_mean(f.name, model.marginal_sd(), out[i])) continue;
        if (f.name == "one") {
            out[i] = 1.0;
            continue;
        }
        std::lock_guard<std::mutex> lock(detail::mean_cache_mutex());
        const auto it = detail::mean_cache().find(model.id() + "|" + f.name);
        if (it != detail::mean_cache().end())
            out[i] = it->second;
        else
            missing.push_back(i);
    }
    if (missing.empty()) return out;
    Sampler eng(derive_seed(0x6D65616E73ULL, 0));
    std::vector<long double> sums(missing.size(), 0.0L);
    // Gaussian kinds (ma included) have an N(0, marginal variance) marginal
    const double sd = model.gaussian() ? model.marginal_sd() : 1.0;
    for (std::int64_t s = 0; s < mean_mc_samples; ++s) {
        const double x = model.gaussian() ? sd * eng.normal() : stationary_draw(model, eng);
        for (std::size_t j = 0; j < missing.size(); ++j) sums[j] += cls.members[missing[j]].fn(x);
    }
    std::lock_guard<std::mutex> lock(detail::mean_cache_mutex());
    for (std::size_t j = 0; j < missing.size(); ++j) {
        out[missing[j]] = static_cast<double>(sums[j] / mean_mc_samples);
        detail::mean_cache()[model.id() + "|" + cls.members[missing[j]].name] = out[missing[j]];
    }
    return out;
}

/// G_n[f] = n^{-1/2} sum_t (f(X_t) - E f) for each member.
inline std::vector<double> empirical_process(const std::vector<double>& values, const TestClass& cls,
                                             const std::vector<double>& means) {
    if (means.size() != cls.size()) throw std::invalid_argument("empirical_process: means do not match the class");
    const double rn = std::sqrt(static_cast<double>(values.size()));
    std::vector<double> g(cls.size());
    for (std::size_t i = 0; i < cls.size(); ++i) {
        double s = 0.0;
        for (double x : values) s += cls.members[i].fn(x) - means[i];
        g[i] = s / rn;
    }
    return g;
}

/// sup_{f,f0} |G_n[f] - G_n[f0]| = max - min over the class.
inline double sup_pair(const std::vector<double>& g) {
    if (g.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
    return *hi - *lo;
}

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::vector<double> samples;
};

/// Mean with jackknife standard error (leave-one-out means).
inline McEstimate jackknife_mean(std::vector<double> samples) {
    McEstimate e;
    const auto r = static_cast<double>(samples.size());
    double total = 0.0;
    for (double v : samples) total += v;
    e.estimate = total / r;
    double ss = 0.0;
    for (double v : samples) {
        const double loo = (total - v) / (r - 1.0);
        ss += (loo - e.estimate) * (loo - e.estimate);
    }
    e.std_error = std::sqrt((r - 1.0) / r * ss);
    e.samples = std::move(samples);
    return e;
}

/// E sup_{f,f0}|G_n[f - f0]| over `reps` independent paths; rep i uses seed
/// derive_seed(seed, i).
inline McEstimate mc_expected_sup(const ProcessModel& model, const TestClass& cls, std::int64_t n, int reps,
                                  std::uint64_t seed, int workers = 1) {
    if (reps < 30) throw std::invalid_argument("mc_expected_sup: reps must be >= 30");
    const auto means = class_means(model, cls);
    auto vals = parallel_map<double>(static_cast<std::size_t>(reps), workers, [&](std::size_t i) {
        const auto path = simulate(model, n, derive_seed(seed, i));
        return sup_pair(empirical_process(path.values, cls, means));
    });
    return jackknife_mean(std::move(vals));
}

}  // namespace mixbound
