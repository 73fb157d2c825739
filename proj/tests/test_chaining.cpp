#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mixbound/chaining.hpp"

using namespace mixbound;

namespace {

FunctionClass random_class(std::mt19937_64& rng, std::size_t size, std::size_t support = 5) {
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

NormFamily random_family(std::mt19937_64& rng, const Vec& w) {
    switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
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

// oracle: all restricted-growth strings of length n with at most `cap` blocks
void all_partitions(std::size_t n, std::int64_t cap, Partition& cur, std::vector<Partition>& out) {
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

Vec oracle_diameter(const FunctionClass& c, std::size_t f, const Partition& p) {
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

bool nested(const Partition& fine, const Partition& coarse) {
    for (std::size_t i = 0; i < fine.size(); ++i)
        for (std::size_t j = 0; j < fine.size(); ++j)
            if (fine[i] == fine[j] && coarse[i] != coarse[j]) return false;
    return true;
}

// brute force over every chain of partitions between level 0 and the forced
// singleton level gamma_search_depth(n)
double brute_gamma(const FunctionClass& c, const NormFamily& fam) {
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

    double best = INFINITY;
    std::vector<Partition> chain{per_level[0][0]};
    std::function<void(std::size_t)> rec = [&](std::size_t l) {
        if (l > depth) {
            double worst = 0.0;
            for (std::size_t f = 0; f < n; ++f) {
                double s = 0.0;
                for (std::size_t k = 0; k <= depth; ++k)
                    s += std::sqrt(std::ldexp(1.0, static_cast<int>(k))) * fam(k, oracle_diameter(c, f, chain[k]));
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

PartitionSequence random_sequence(std::mt19937_64& rng, std::size_t n) {
    PartitionSequence s;
    s.levels.push_back(Partition(n, 0));
    for (std::size_t l = 1;; ++l) {
        Partition p = s.levels.back();
        const auto cap = level_cap(l);
        // split random cells while respecting the cap
        for (std::size_t i = 0; i < n; ++i) {
            if (cell_count(canonical(p)) < cap && rng() % 3 == 0) p[i] = static_cast<int>(n + i);
        }
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

}  // namespace

TEST(Diameter, Examples) {
    const FunctionClass c({{1, 2}, {3, 0}, {2, 5}}, {0.5, 0.5});
    EXPECT_EQ(cell_diameter(c, 0, {0, 1, 2}), (Vec{0, 0}));
    EXPECT_EQ(cell_diameter(c, 0, {0, 0, 1}), (Vec{2, 2}));
    EXPECT_EQ(cell_diameter(c, 2, {0, 0, 0}), (Vec{2, 5}));
}

TEST(Sequence, Validation) {
    EXPECT_NO_THROW(validate({{{0, 0, 0}, {0, 1, 2}}}, 3));
    EXPECT_THROW(validate({{{0, 1, 0}, {0, 1, 2}}}, 3), std::invalid_argument);        // level 0
    EXPECT_THROW(validate({{{0, 0, 0}, {0, 0, 1}}}, 3), std::invalid_argument);        // not singletons
    EXPECT_THROW(validate({{{0, 0, 0, 0, 0}, {0, 1, 2, 3, 4}}}, 5), std::invalid_argument);  // cap 4
    EXPECT_THROW(validate({{{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {0, 1, 2}}}, 3), std::invalid_argument);
}

TEST(Gamma, SingletonAndPair) {
    const FunctionClass one({{1, 2, 3}}, {});
    EXPECT_EQ(gamma_exact(one, NormFamily::l2(one.weights())).value, 0.0);
    EXPECT_EQ(gamma_greedy(one, NormFamily::l2(one.weights())).value, 0.0);

    const FunctionClass two({{1, 2}, {3, -1}}, {0.25, 0.75});
    const auto fam = NormFamily::l2(two.weights());
    const double expect = std::sqrt(2.0) * fam(0, Vec{2, 3});
    EXPECT_DOUBLE_EQ(gamma_exact(two, fam).value, expect);
    EXPECT_DOUBLE_EQ(gamma_greedy(two, fam).value, expect);
}

TEST(Gamma, ExactMatchesBruteForce) {
    std::mt19937_64 rng(42);
    for (std::size_t size = 1; size <= 6; ++size)
        for (int t = 0; t < 6; ++t) {
            const auto c = random_class(rng, size);
            const auto fam = random_family(rng, c.weights());
            const auto res = gamma_exact(c, fam);
            EXPECT_EQ(res.value, brute_gamma(c, fam)) << "size " << size << " trial " << t << " " << fam.label();
            if (size > 1) {
                EXPECT_EQ(sequence_value(c, fam, res.witness), res.value);
            }
        }
}

TEST(Gamma, ExactBelowRandomSequences) {
    std::mt19937_64 rng(7);
    const auto c = random_class(rng, 6);
    const auto fam = NormFamily::l2(c.weights());
    const double g = gamma_exact(c, fam).value;
    for (int t = 0; t < 1000; ++t) EXPECT_LE(g, sequence_value(c, fam, random_sequence(rng, 6)) * (1 + 1e-12));
}

TEST(Gamma, GreedyAboveExact) {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 10; ++t) {
        const auto c = random_class(rng, 8);
        const auto fam = random_family(rng, c.weights());
        EXPECT_GE(gamma_greedy(c, fam).value, gamma_exact(c, fam).value * (1 - 1e-12));
    }
    EXPECT_THROW(gamma_exact(random_class(rng, 9), NormFamily::l2(Vec(5, 0.2))), std::invalid_argument);
}

TEST(Gamma, HomogeneousAndMonotone) {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 5; ++t) {
        const auto c = random_class(rng, 5);
        const auto fam = NormFamily::lr(c.weights(), 3.0);
        const double g = gamma_exact(c, fam).value;
        EXPECT_NEAR(gamma_exact(c.scaled(2.5), fam).value, 2.5 * g, 1e-12 * g);
        EXPECT_LE(gamma_exact(c.subset({0, 2, 4}), fam).value, g * (1 + 1e-12));
    }
}

TEST(Covering, Examples) {
    std::vector<Vec> pts;
    for (int i = 0; i < 5; ++i) pts.push_back({1.0 * i});
    const FunctionClass c(pts, {1.0});
    const auto d = lr_seminorm({1.0}, 2.0);
    EXPECT_EQ(covering_number(c, d, 10.0), 1U);
    EXPECT_EQ(covering_number(c, d, 1e-6), 5U);
    // points 0..4 spaced 1 apart; radius 1/2 balls capture one point each
    EXPECT_EQ(covering_number_exact(c, d, 0.5), 5U);
    EXPECT_EQ(covering_number_exact(c, d, 1.0), 2U);
    EXPECT_GE(covering_number_greedy(c, d, 1.0), covering_number_exact(c, d, 1.0));
    EXPECT_LE(covering_number_greedy(c, d, 1.0), 3U);
}

TEST(Covering, EntropyIntegral) {
    std::vector<Vec> pts{{0.0}, {1.0}};
    const FunctionClass c(pts, {1.0});
    const auto d = lr_seminorm({1.0}, 2.0);
    // N = 2 for eps < 1 and 1 beyond
    EXPECT_NEAR(entropy_integral(c, d, 3.0), std::sqrt(std::log(2.0)), 0.02);
    EXPECT_EQ(entropy_integral(FunctionClass({{1.0}}, {1.0}), d, 1.0), 0.0);
}

TEST(Chain, IdentityOnRandomTuples) {
    std::mt19937_64 rng(99);
    int binding = 0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t size = 2 + rng() % 7;
        auto c = random_class(rng, size, 12);
        const auto seq = random_sequence(rng, size);
        const auto p = std::vector<MixingProfile>{MixingProfile::iid(), MixingProfile::polynomial(0.5),
                                                  MixingProfile::exponential(0.8), MixingProfile::m_dependent(4)}[t % 4];
        const std::int64_t n = std::vector<std::int64_t>{6, 12, 96, 1536}[rng() % 4];
        const auto f = rng() % size, f0 = rng() % size;
        const auto dec = chain_decomposition(c, f, f0, seq, p, n);
        EXPECT_LT(dec.residual, 1e-12);
        for (auto m : dec.stop) binding += (m >= 0) ? 1 : 0;
        for (std::size_t k = 0; k < dec.levels; ++k)
            for (std::size_t x = 0; x < c.support_size(); ++x) EXPECT_LE(std::abs(dec.xi[k][x]), dec.diam[k][x]);
    }
    EXPECT_GT(binding, 0);
}

TEST(Chain, TrivialCases) {
    const FunctionClass two({{1, 2}, {3, -1}}, {0.5, 0.5});
    PartitionSequence seq{{{0, 0}, {0, 1}}};
    const auto same = chain_decomposition(two, 1, 1, seq, MixingProfile::iid(), 1536);
    EXPECT_EQ(same.residual, 0.0);
    const auto d = chain_decomposition(two, 1, 0, seq, MixingProfile::iid(), 1536);
    EXPECT_EQ(d.delta[1], (Vec{2, -3}));  // pi_1 f - pi_0 f = f - f0
}
