#include <gtest/gtest.h>

#include <cstdint>
#include <vector>

#include "mixbound/grid.hpp"

using namespace mixbound;

namespace {

// oracle: factor out the basis primes by hand
bool oracle_member(std::int64_t n, std::vector<std::int64_t> basis) {
    if (n % 2 != 0 || n % 3 != 0) return false;
    for (auto p : basis)
        while (n % p == 0) n /= p;
    return n == 1;
}

std::vector<std::int64_t> oracle_divisors(std::int64_t n) {
    std::vector<std::int64_t> d;
    for (std::int64_t s = 1; s <= n; ++s)
        if (n % s == 0) d.push_back(s);
    return d;
}

}  // namespace

TEST(Lattice, SmallBasis) {
    EXPECT_EQ(lattice_members(2, 40), (std::vector<std::int64_t>{6, 12, 18, 24, 36}));
    EXPECT_EQ(lattice_members(2, 6), (std::vector<std::int64_t>{6}));
    const auto m = lattice_members(3, 30);
    EXPECT_NE(std::find(m.begin(), m.end(), 30), m.end());
}

TEST(Lattice, Errors) {
    EXPECT_THROW(lattice_members(1, 100), std::invalid_argument);
    EXPECT_THROW(lattice_members(3, 5), std::domain_error);
}

TEST(Lattice, MatchesBruteForce) {
    for (int basis : {2, 3, 4}) {
        const auto primes = first_primes(basis);
        std::vector<std::int64_t> expect;
        for (std::int64_t n = 1; n <= 5000; ++n)
            if (oracle_member(n, primes)) expect.push_back(n);
        EXPECT_EQ(lattice_members(basis, 5000), expect) << "basis " << basis;
    }
}

TEST(Lattice, NearestMember) {
    EXPECT_EQ(nearest_lattice_member(100), 96);
    EXPECT_EQ(nearest_lattice_member(384), 384);
    EXPECT_TRUE(is_lattice_member(nearest_lattice_member(1000)));
}

TEST(Divisors, Examples) {
    EXPECT_EQ(divisor_chain(12).divisors, (std::vector<std::int64_t>{1, 2, 3, 4, 6, 12}));
    EXPECT_EQ(divisor_chain(6).divisors, (std::vector<std::int64_t>{1, 2, 3, 6}));
    EXPECT_EQ(divisor_chain(36).divisors, (std::vector<std::int64_t>{1, 2, 3, 4, 6, 9, 12, 18, 36}));
    EXPECT_TRUE(divisor_chain(36).gap_property);
    EXPECT_THROW(divisor_chain(10), std::invalid_argument);
}

TEST(Divisors, MatchBruteForceAndGap) {
    for (auto n : lattice_members(3, 20000)) {
        const auto c = divisor_chain(n);
        ASSERT_EQ(c.divisors, oracle_divisors(n)) << n;
        EXPECT_TRUE(c.gap_property) << n;
        EXPECT_LE(c.max_ratio, 2.0);
    }
}

TEST(Schedule, PolyExample) {
    const auto s = block_schedule(12, MixingProfile::polynomial(1.0));
    EXPECT_EQ(s.q_seq.front(), 2);
    EXPECT_EQ(s.q_seq.back(), 1);
}

TEST(Schedule, IidIsAllOnes) {
    for (auto n : lattice_members(3, 5000)) {
        const auto s = block_schedule(n, MixingProfile::iid());
        EXPECT_EQ(s.q_seq, (std::vector<std::int64_t>{1}));
        EXPECT_EQ(s.at(7), 1);
    }
}

TEST(Schedule, MinimalAndNonIncreasing) {
    const std::vector<MixingProfile> profiles{MixingProfile::polynomial(0.5), MixingProfile::polynomial(2.0),
                                              MixingProfile::exponential(0.8), MixingProfile::m_dependent(7)};
    for (const auto& p : profiles)
        for (auto n : {6LL, 96LL, 384LL, 1536LL, 6000LL, 43740LL}) {
            const auto s = block_schedule(n, p);
            const auto divs = oracle_divisors(n);
            for (std::size_t k = 0; k < s.q_seq.size(); ++k) {
                // oracle: scan every divisor ascending
                std::int64_t expect = n;
                for (auto d : divs)
                    if (0.5 * p.theta(d) * static_cast<double>(n) <= static_cast<double>(d) * std::ldexp(1.0, k + 1)) {
                        expect = d;
                        break;
                    }
                EXPECT_EQ(s.q_seq[k], expect) << p.to_string() << " n=" << n << " k=" << k;
                if (k > 0) {
                    EXPECT_LE(s.q_seq[k], s.q_seq[k - 1]);
                }
            }
            EXPECT_EQ(s.q_seq.back(), 1);
        }
}

TEST(Schedule, MDependentFirstEntry) {
    // q_{n,0} = smallest divisor >= min(m, n/4)
    for (std::int64_t m : {1, 3, 10, 50, 400})
        for (auto n : lattice_members(3, 3000)) {
            const auto s = block_schedule(n, MixingProfile::m_dependent(m));
            const double target = std::min(static_cast<double>(m), static_cast<double>(n) / 4.0);
            EXPECT_EQ(s.at(0), smallest_divisor_at_least(oracle_divisors(n), target)) << "m=" << m << " n=" << n;
        }
}

TEST(Divisors, NearestDivisor) {
    EXPECT_EQ(nearest_divisor(384, std::sqrt(384.0)), 16);
    EXPECT_EQ(nearest_divisor(1536, std::sqrt(1536.0)), 32);
    EXPECT_EQ(nearest_divisor(6144, std::sqrt(6144.0)), 64);
}
