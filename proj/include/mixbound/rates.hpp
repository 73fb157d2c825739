// Rate factor frak_n(n), its closed-form envelopes and assembled bounds.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "mixbound/grid.hpp"
#include "mixbound/norms.hpp"
#include "mixbound/profile.hpp"

namespace mixbound {

enum class Regime { iid, m_dependent, fast, critical, slow };

inline std::string to_string(Regime r) {
    switch (r) {
    case Regime::iid: return "iid";
    case Regime::m_dependent: return "m_dependent";
    case Regime::fast: return "fast";
    case Regime::critical: return "critical";
    case Regime::slow: return "slow";
    }
    return "?";
}

struct RegimeInfo {
    Regime regime = Regime::fast;
    /// Power of n in frak_n(n) (slow), or power of log n (critical); 0 for fast.
    double exponent = 0.0;
    bool logarithmic = false;
};

/// Phase transition at m = r/(r-2) for theta(q) = (1+q)^{-m}.
inline RegimeInfo regime_classify(double m, double r) {
    if (!(m > 0.0)) throw std::invalid_argument("regime_classify: m must be positive");
    if (!(r > 2.0)) throw std::invalid_argument("regime_classify: r must exceed 2");
    const double boundary = std::isinf(r) ? 1.0 : r / (r - 2.0);
    if (std::abs(m - boundary) <= 1e-12 * boundary) return {Regime::critical, 1.0 / m, true};
    if (m > boundary) return {Regime::fast, 0.0, false};
    const double expo = std::isinf(r) ? (1.0 - m) / (m + 1.0) : (r - m * (r - 2.0)) / (r * (m + 1.0));
    return {Regime::slow, expo, false};
}

inline RegimeInfo regime_of(const MixingProfile& profile, double r) {
    switch (profile.kind()) {
    case ProfileKind::iid: return {Regime::iid, 0.0, false};
    case ProfileKind::m_dependent: return {Regime::m_dependent, 0.0, false};
    case ProfileKind::polynomial: return regime_classify(profile.parameter(), r);
    default: return {Regime::fast, 0.0, false};
    }
}

inline double frak_n(std::int64_t n, double r, const MixingProfile& profile) {
    const auto sched = block_schedule(n, profile);
    const double b = b_r(sched.at(0), r, profile);
    return b * b;
}

struct Envelope {
    double lower = 0.0;
    double upper = 0.0;
};

/// Closed-form bracket for B_r(q).
///
/// case 1: theta = 1{q < m};  cases 2/3/4: theta = (1+q)^{-m} with m above,
/// at, or below r/(r-2). The case-2 upper side carries the sqrt(2) prefactor
/// of B_r itself (without it the bracket fails for every q); its lower side is
/// kept without it. A lower bound whose inner term is negative is reported as 0.
inline Envelope closed_form_envelopes(std::int64_t q, double m, double r, int which) {
    if (!(r > 2.0) || std::isinf(r)) throw std::invalid_argument("envelopes: need finite r > 2");
    if (!(m > 0.0)) throw std::invalid_argument("envelopes: m must be positive");
    const double p = r / (r - 2.0);
    const double e = (r - 2.0) / (2.0 * r);
    const double qd = static_cast<double>(q);
    const double rs2 = std::sqrt(2.0);
    auto root = [](double base, double expo) { return base > 0.0 ? std::pow(base, expo) : 0.0; };
    const auto info = regime_classify(m, r);

    switch (which) {
    case 1: {
        const double c = std::pow(2.0, 1.0 / r);
        return {c * std::sqrt(std::min(1.0 + qd, m)), c * std::sqrt(std::min(1.0 + qd, 1.0 + m))};
    }
    case 2: {
        if (info.regime != Regime::fast) throw std::invalid_argument("envelopes: case 2 needs m > r/(r-2)");
        const double c = 0.5 / (1.0 - p / m);
        return {root(c * (1.0 - std::pow(2.0, p - m)) - 0.5, e),
                rs2 * root(std::pow(2.0, 1.0 + p - m) + c, e)};
    }
    case 3: {
        if (info.regime != Regime::critical) throw std::invalid_argument("envelopes: case 3 needs m = r/(r-2)");
        return {rs2 * root(0.5 * m * std::log(2.0 + qd) - 0.5, 1.0 / (2.0 * m)),
                rs2 * root(2.0 + 0.5 * m * std::log(1.0 + qd), 1.0 / (2.0 * m))};
    }
    case 4: {
        if (info.regime != Regime::slow) throw std::invalid_argument("envelopes: case 4 needs m < r/(r-2)");
        const double c = 0.5 / (p / m - 1.0);
        return {rs2 * root(c * std::pow(2.0 + qd, p - m) - 0.5, e),
                rs2 * root(2.0 * std::pow(1.0 + qd, p - m) + c * std::pow(1.0 + qd, p - m), e)};
    }
    default: throw std::invalid_argument("envelopes: case must be 1..4");
    }
}

/// Envelope case matching a profile, or 0 when none applies.
inline int envelope_case(const MixingProfile& profile, double r) {
    if (profile.kind() == ProfileKind::m_dependent) return 1;
    if (profile.kind() != ProfileKind::polynomial || std::isinf(r)) return 0;
    switch (regime_classify(profile.parameter(), r).regime) {
    case Regime::fast: return 2;
    case Regime::critical: return 3;
    case Regime::slow: return 4;
    default: return 0;
    }
}

/// f_m(n) = n^{(1-m)/(2(m+1))} for m != 1 and sqrt(log n) at m = 1.
inline double strong_rate(double n, double m) {
    if (!(n >= 2.0)) throw std::invalid_argument("strong_rate: n must be >= 2");
    if (!(m > 0.0)) throw std::invalid_argument("strong_rate: m must be positive");
    if (m == 1.0) return std::pow(std::log(n), 1.0 / (2.0 * m));
    return std::pow(n, (1.0 - m) / (2.0 * (m + 1.0)));
}

struct UniversalConstants {
    double C0 = 0.0;
    double L0 = 0.0;
    double L = 0.0;
};

inline UniversalConstants universal_constants() {
    UniversalConstants k;
    const double base = 2.0 / std::exp(1.0);
    double sum = 0.0;
    for (int j = 1; j < 64; ++j) {
        const double term = std::pow(base, std::ldexp(1.0, j - 1));
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    k.C0 = 2.0 * sum;
    k.L0 = 16.0 / 3.0 * k.C0 * 1.0 + 2.0;  // int_0^inf 2 e^{-2t} dt = 1
    k.L = 2.0 * k.L0 + std::pow(2.0, 2.5);
    return k;
}

/// sqrt(frak_n(n)) * L * complexity.
inline double maximal_bound(double complexity, std::int64_t n, double r, const MixingProfile& profile) {
    if (!(complexity >= 0.0)) throw std::invalid_argument("maximal_bound: complexity must be >= 0");
    if (complexity == 0.0) return 0.0;
    return std::sqrt(frak_n(n, r, profile)) * universal_constants().L * complexity;
}

struct RateReport {
    std::int64_t n = 0;
    double r = 0.0;
    std::string profile;
    std::int64_t q_n0 = 0;
    double b_r_q_n0 = 0.0;  // B_r(q_{n,0}) itself
    double frak_n = 0.0;    // B_r(q_{n,0})^2
    double effective_n = 0.0;
    Regime regime = Regime::fast;
    double lower_env = std::numeric_limits<double>::quiet_NaN();
    double upper_env = std::numeric_limits<double>::quiet_NaN();
    double strong_rate = std::numeric_limits<double>::quiet_NaN();
};

inline RateReport rate_report(std::int64_t n, double r, const MixingProfile& profile) {
    RateReport rep;
    rep.n = n;
    rep.r = r;
    rep.profile = profile.to_string();
    rep.q_n0 = block_schedule(n, profile).at(0);
    rep.b_r_q_n0 = b_r(rep.q_n0, r, profile);
    rep.frak_n = rep.b_r_q_n0 * rep.b_r_q_n0;
    rep.effective_n = static_cast<double>(n) / rep.frak_n;
    rep.regime = regime_of(profile, r).regime;
    if (const int c = envelope_case(profile, r); c != 0) {
        const auto env = closed_form_envelopes(rep.q_n0, profile.parameter(), r, c);
        rep.lower_env = env.lower;
        rep.upper_env = env.upper;
    }
    if (profile.kind() == ProfileKind::polynomial)
        rep.strong_rate = strong_rate(static_cast<double>(n), profile.parameter());
    return rep;
}

}  // namespace mixbound
