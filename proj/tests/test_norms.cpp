#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mixbound/grid.hpp"
#include "mixbound/norms.hpp"

using namespace mixbound;

namespace {

// oracle: midpoint rule on a fine u-grid, mu counted directly from theta
double brute_mu(double u, std::int64_t q, const MixingProfile& p) {
    std::int64_t c = 0;
    for (std::int64_t i = 0; i <= q; ++i) c += (u <= 0.5 * p.theta(i)) ? 1 : 0;
    return static_cast<double>(c);
}

template <typename F>
double midpoint(F f, int points = 1000000) {
    double s = 0.0;
    for (int i = 0; i < points; ++i) s += f((i + 0.5) / points);
    return s / points;
}

QuantileCurve random_curve(std::mt19937_64& rng, int atoms) {
    std::uniform_real_distribution<double> v(-3.0, 3.0), w(0.0, 1.0);
    std::vector<double> vals, wts;
    for (int i = 0; i < atoms; ++i) {
        vals.push_back(v(rng));
        wts.push_back(w(rng));
    }
    return QuantileCurve::from_discrete(vals, wts);
}

std::vector<MixingProfile> profiles() {
    return {MixingProfile::iid(), MixingProfile::m_dependent(5), MixingProfile::polynomial(1.0),
            MixingProfile::exponential(0.7)};
}

}  // namespace

TEST(Quantile, DiscreteCurve) {
    const std::vector<double> v{0.0, 1.0, -2.0}, w{0.5, 0.25, 0.25};
    const auto c = QuantileCurve::from_discrete(v, w);
    EXPECT_EQ(c(0.0), 2.0);
    EXPECT_EQ(c(0.25), 1.0);  // right-continuous
    EXPECT_EQ(c(0.4), 1.0);
    EXPECT_EQ(c(0.6), 0.0);
    EXPECT_DOUBLE_EQ(c.partial_square_integral(1.0), 0.25 * 4 + 0.25);
    EXPECT_DOUBLE_EQ(c.partial_square_integral(0.3), 0.25 * 4 + 0.05);
    EXPECT_DOUBLE_EQ(c.lr_norm(INFINITY), 2.0);
}

TEST(Quantile, HalfNormalPartialIntegral) {
    const HalfNormalCurve h(1.5);
    for (double a : {0.01, 0.2, 0.5, 0.9}) {
        const double brute = midpoint([&](double t) { return std::pow(h(t * a), 2); }, 400000) * a;
        EXPECT_NEAR(h.partial_square_integral(a), brute, 2e-3 * brute) << a;
    }
    EXPECT_DOUBLE_EQ(h.partial_square_integral(1.0), 2.25);
}

TEST(Mu, Examples) {
    EXPECT_EQ(mu_q(0.3, 10, MixingProfile::iid()), 1);
    EXPECT_EQ(mu_q(0.2, 3, MixingProfile::polynomial(1.0)), 2);
    for (const auto& p : profiles()) EXPECT_EQ(mu_q(0.6, 7, p), 0);
    EXPECT_THROW(mu_q(0.0, 3, MixingProfile::iid()), std::invalid_argument);
}

TEST(Mu, Sandwich) {
    for (const auto& p : profiles())
        for (std::int64_t q : {1, 10, 100}) {
            for (int i = 1; i <= 500; ++i) {
                const double u = 0.5 * (i - 0.5) / 500.0;
                const auto mu = mu_q(u, q, p);
                EXPECT_EQ(static_cast<double>(mu), brute_mu(u, q, p));
                const auto inv = p.theta_inverse(2.0 * u);
                EXPECT_LE(std::min(inv, q + 1), mu);
                EXPECT_LE(mu, std::min(inv + 1, q + 1));
            }
        }
}

// On a plateau theta(i) = theta(i+1) = 2u the upper side overshoots; such u
// form a finite set and carry no mass.
TEST(Mu, SandwichTieOnPlateau) {
    const auto p = MixingProfile::m_dependent(5);
    EXPECT_EQ(mu_q(0.5, 10, p), 5);
    EXPECT_EQ(p.theta_inverse(1.0), 0);
}

TEST(QNorm, MatchesBruteForceIntegration) {
    std::mt19937_64 rng(11);
    for (const auto& p : profiles())
        for (std::int64_t q : {0, 3, 12}) {
            const auto c = random_curve(rng, 7);
            const double brute = std::sqrt(2.0 * midpoint([&](double u) { return brute_mu(u, q, p) * c(u) * c(u); }));
            EXPECT_NEAR(q_norm(c, q, p), brute, 1e-4 * brute) << p.to_string() << " q=" << q;
        }
}

TEST(QNorm, IidTwoPoint) {
    // |f| in {0,1} with P(|f|=1) = p: the integral runs over (0, 1/2]
    for (double p : {0.1, 0.3, 0.5}) {
        const std::vector<double> v{1.0, 0.0}, w{p, 1.0 - p};
        const auto c = QuantileCurve::from_discrete(v, w);
        EXPECT_DOUBLE_EQ(q_norm(c, 5, MixingProfile::iid()), std::sqrt(2.0 * p));
    }
}

TEST(QNorm, IidReducesToHalfIntegral) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        const auto c = random_curve(rng, 5);
        const double expect = std::sqrt(2.0 * c.partial_square_integral(0.5));
        EXPECT_NEAR(q_norm(c, 9, MixingProfile::iid()), expect, 1e-14 * expect);
    }
}

TEST(QNorm, ConstantCurve) {
    const std::vector<double> v{2.0}, w{1.0};
    const auto c = QuantileCurve::from_discrete(v, w);
    for (const auto& p : profiles()) {
        const double expect = std::sqrt(2.0 * 4.0 * mu_power_integral(6, 1.0, p));
        EXPECT_NEAR(q_norm(c, 6, p), expect, 1e-13);
    }
}

TEST(QNorm, MonotoneInQ) {
    std::mt19937_64 rng(5);
    const auto c = random_curve(rng, 9);
    for (const auto& p : profiles()) {
        double prev = 0.0;
        for (std::int64_t q = 0; q < 60; ++q) {
            const double v = q_norm(c, q, p);
            EXPECT_GE(v, prev);
            prev = v;
        }
    }
}

TEST(BR, IidValue) {
    for (double r : {2.5, 3.0, 4.0, 10.0})
        EXPECT_NEAR(b_r(17, r, MixingProfile::iid()), std::sqrt(2.0) * std::pow(0.5, (r - 2) / (2 * r)), 1e-15);
    EXPECT_THROW(b_r(3, 2.0, MixingProfile::iid()), std::invalid_argument);
}

TEST(BR, MatchesBruteForceIntegration) {
    for (const auto& p : profiles())
        for (double r : {3.0, 4.0})
            for (std::int64_t q : {1, 7, 30}) {
                const double pw = r / (r - 2.0);
                const double integral = midpoint([&](double u) { return std::pow(brute_mu(u, q, p), pw); });
                const double brute = std::sqrt(2.0) * std::pow(integral, (r - 2.0) / (2.0 * r));
                EXPECT_NEAR(b_r(q, r, p), brute, 1e-4 * brute);
            }
}

TEST(BR, HolderStep) {
    std::mt19937_64 rng(8);
    for (const auto& p : profiles())
        for (double r : {3.0, 5.0})
            for (int t = 0; t < 10; ++t) {
                const auto c = random_curve(rng, 6);
                const std::int64_t q = 1 + t * 5;
                EXPECT_LE(q_norm(c, q, p), b_r(q, r, p) * c.lr_norm(r) * (1 + 1e-12));
            }
}

TEST(Norm2Theta, OnlyWhenSummable) {
    const HalfNormalCurve h(1.0);
    EXPECT_TRUE(std::isinf(norm_2theta(h, MixingProfile::polynomial(0.8))));
    const double v = norm_2theta(h, MixingProfile::exponential(0.5));
    EXPECT_TRUE(std::isfinite(v));
    // dominates every ||f||_q in the summable case
    EXPECT_GE(v, q_norm(h, 50, MixingProfile::exponential(0.5)));
}

TEST(TailBound, TruncatedFirstMoment) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> v(0.0, 5.0), w(0.0, 1.0);
    for (const auto& p : profiles())
        for (auto n : {96LL, 384LL, 1536LL}) {
            const auto sched = block_schedule(n, p);
            for (int t = 0; t < 20; ++t) {
                std::vector<double> vals, wts;
                for (int i = 0; i < 8; ++i) {
                    vals.push_back(v(rng) * (i == 0 ? 20 : 1));
                    wts.push_back(w(rng) * (i == 0 ? 0.01 : 1));
                }
                const auto c = QuantileCurve::from_discrete(vals, wts);
                for (std::size_t k = 0; k <= sched.depth(); ++k) {
                    const auto q = sched.at(k);
                    const double nq = q_norm(c, q, p);
                    const double b = 2.0 * std::sqrt(static_cast<double>(n)) * nq / std::sqrt(std::ldexp(1.0, k + 2));
                    const double lhs = tail_first_moment(c, b / static_cast<double>(q));
                    const double rhs = std::sqrt(2.0) * nq * std::sqrt(std::ldexp(1.0, k + 1) / static_cast<double>(n));
                    EXPECT_LE(lhs, rhs * (1 + 1e-12));
                }
            }
        }
}
