#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "mixbound/profile.hpp"

using namespace mixbound;

TEST(Profile, Values) {
    const auto md = MixingProfile::m_dependent(3);
    EXPECT_EQ(md.theta(2), 1.0);
    EXPECT_EQ(md.theta(3), 0.0);
    EXPECT_EQ(MixingProfile::polynomial(2.0).theta(1), 0.25);
    EXPECT_EQ(MixingProfile::iid().theta(7), 0.0);
    EXPECT_EQ(MixingProfile::iid().theta(0), 1.0);
    EXPECT_DOUBLE_EQ(MixingProfile::exponential(0.5).theta(3), 0.125);
}

TEST(Profile, InvalidParameters) {
    EXPECT_THROW(MixingProfile::m_dependent(0), std::invalid_argument);
    EXPECT_THROW(MixingProfile::polynomial(-1.0), std::invalid_argument);
    EXPECT_THROW(MixingProfile::exponential(1.0), std::invalid_argument);
    EXPECT_THROW(MixingProfile::tabulated({1.0, 0.5, 0.7}), std::invalid_argument);
    EXPECT_THROW(MixingProfile::tabulated({1.0, 1.5}), std::invalid_argument);
}

TEST(Profile, Inverse) {
    EXPECT_EQ(MixingProfile::polynomial(1.0).theta_inverse(0.2), 4);
    EXPECT_EQ(MixingProfile::m_dependent(5).theta_inverse(0.5), 5);
    for (const auto& p : {MixingProfile::iid(), MixingProfile::polynomial(0.7), MixingProfile::exponential(0.3)})
        EXPECT_EQ(p.theta_inverse(1.0), 0);
    const auto t = MixingProfile::tabulated({1.0, 0.6, 0.4}, TailRule::none);
    EXPECT_EQ(t.theta_inverse(0.5), 2);
    EXPECT_THROW(t.theta_inverse(0.1), std::domain_error);
    EXPECT_EQ(MixingProfile::tabulated({1.0, 0.6}, TailRule::zero).theta_inverse(0.1), 2);
}

TEST(Profile, InverseConsistencyScan) {
    const std::vector<MixingProfile> profiles{MixingProfile::iid(), MixingProfile::m_dependent(4),
                                              MixingProfile::polynomial(0.5), MixingProfile::polynomial(3.0),
                                              MixingProfile::exponential(0.9)};
    for (const auto& p : profiles) {
        for (std::int64_t q = 1; q < 200; ++q) {
            EXPECT_LE(p.theta(q), p.theta(q - 1));
            if (p.theta(q) > 0.0) {
                EXPECT_LE(p.theta_inverse(p.theta(q)), q);
            }
        }
        for (int i = 1; i <= 1000; ++i) {
            const double u = i / 1000.0;
            const auto s = p.theta_inverse(u);
            EXPECT_LE(p.theta(s), u);
            if (s > 0) {
                EXPECT_GT(p.theta(s - 1), u);  // minimality
            }
        }
    }
}

TEST(Envelope, Examples) {
    EXPECT_EQ(monotone_envelope({1, 0.2, 0.5, 0.1}).table(), (std::vector<double>{1, 0.5, 0.5, 0.1}));
    EXPECT_EQ(monotone_envelope({1, 0.5, 0.25}).table(), (std::vector<double>{1, 0.5, 0.25}));
    const auto z = monotone_envelope({1, 0.5}, TailRule::zero);
    EXPECT_EQ(z.theta(5), 0.0);
    EXPECT_THROW(monotone_envelope({1, 1.2}), std::invalid_argument);
}

TEST(Envelope, DominatesAndMonotone) {
    std::vector<double> raw{1.0, 0.3, 0.35, 0.0, 0.2, 0.05, 0.1, 0.0};
    const auto env = monotone_envelope(raw);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        EXPECT_GE(env.table()[i], raw[i]);
        if (i > 0) {
            EXPECT_LE(env.table()[i], env.table()[i - 1]);
        }
    }
}

TEST(Parse, Grammar) {
    EXPECT_EQ(parse_profile("iid").kind(), ProfileKind::iid);
    EXPECT_EQ(parse_profile("mdep:m=3").theta(2), 1.0);
    EXPECT_EQ(parse_profile("poly:m=2").theta(1), 0.25);
    EXPECT_DOUBLE_EQ(parse_profile("expo:l=0.5").theta(2), 0.25);
    EXPECT_THROW(parse_profile("mdep:m=2.5"), std::invalid_argument);
    EXPECT_THROW(parse_profile("poly:k=2"), std::invalid_argument);
    EXPECT_THROW(parse_profile("weird"), std::invalid_argument);

    const char* path = "profile_table_test.csv";
    {
        std::ofstream out(path);
        out << "theta\n1\n0.4\n0.5\n0.1\n";
    }
    const auto t = parse_profile(std::string("table:") + path);
    EXPECT_EQ(t.table(), (std::vector<double>{1, 0.5, 0.5, 0.1}));
    EXPECT_EQ(t.theta(10), 0.1);
    std::remove(path);
}
