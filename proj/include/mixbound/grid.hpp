// Admissible sample sizes, their divisor sets and the block-length schedule.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixbound/profile.hpp"

namespace mixbound {

inline constexpr int default_basis_size = 3;

/// The first `count` primes, ascending.
inline std::vector<std::int64_t> first_primes(int count) {
    std::vector<std::int64_t> primes;
    for (std::int64_t c = 2; static_cast<int>(primes.size()) < count; ++c) {
        bool prime = true;
        for (auto p : primes) {
            if (p * p > c) break;
            if (c % p == 0) { prime = false; break; }
        }
        if (prime) primes.push_back(c);
    }
    return primes;
}

/// Members of the lattice: n = prod p_i^{m_i} over the first `basis_size`
/// primes with the exponents of 2 and 3 at least one.
inline std::vector<std::int64_t> lattice_members(int basis_size, std::int64_t limit) {
    if (basis_size < 2) throw std::invalid_argument("lattice_members: basis_size must be >= 2");
    if (limit < 6) throw std::domain_error("lattice_members: no admissible n below 6");
    const auto primes = first_primes(basis_size);
    std::vector<std::int64_t> out{6};
    // multiply in each prime in turn; starting from 6 keeps a,b >= 1
    for (auto p : primes) {
        const std::size_t count = out.size();
        for (std::size_t i = 0; i < count; ++i) {
            std::int64_t v = out[i];
            while (v <= limit / p) {
                v *= p;
                out.push_back(v);
            }
        }
    }
    out.erase(std::remove_if(out.begin(), out.end(), [&](auto v) { return v > limit; }), out.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline bool is_lattice_member(std::int64_t n, int basis_size = default_basis_size) {
    if (n < 6 || n % 6 != 0) return false;
    for (auto p : first_primes(basis_size))
        while (n % p == 0) n /= p;
    return n == 1;
}

/// Closest lattice member to n (ties resolved downwards).
inline std::int64_t nearest_lattice_member(std::int64_t n, int basis_size = default_basis_size) {
    if (n <= 6) return 6;
    std::int64_t below = n, above = n;
    while (!is_lattice_member(below, basis_size)) --below;
    while (!is_lattice_member(above, basis_size)) ++above;
    return (n - below <= above - n) ? below : above;
}

/// All divisors of n, ascending. Trial division; fine for n up to ~1e12.
inline std::vector<std::int64_t> divisors(std::int64_t n) {
    if (n < 1) throw std::invalid_argument("divisors: n must be positive");
    std::vector<std::int64_t> small, large;
    for (std::int64_t d = 1; d * d <= n; ++d) {
        if (n % d != 0) continue;
        small.push_back(d);
        if (d != n / d) large.push_back(n / d);
    }
    small.insert(small.end(), large.rbegin(), large.rend());
    return small;
}

struct DivisorChain {
    std::int64_t n = 0;
    std::vector<std::int64_t> divisors;
    /// Largest q'/q over consecutive divisors.
    double max_ratio = 0.0;
    bool gap_property = false;  // every consecutive pair has q' <= 2q
};

inline DivisorChain divisor_chain(std::int64_t n, int basis_size = default_basis_size) {
    if (!is_lattice_member(n, basis_size))
        throw std::invalid_argument("divisor_chain: " + std::to_string(n) + " is not a lattice member");
    DivisorChain chain;
    chain.n = n;
    chain.divisors = divisors(n);
    chain.gap_property = true;
    for (std::size_t i = 1; i < chain.divisors.size(); ++i) {
        const auto lo = chain.divisors[i - 1], hi = chain.divisors[i];
        chain.max_ratio = std::max(chain.max_ratio, static_cast<double>(hi) / static_cast<double>(lo));
        if (hi > 2 * lo) chain.gap_property = false;
    }
    return chain;
}

struct BlockSchedule {
    std::int64_t n = 0;
    std::vector<std::int64_t> divisors;
    /// q_{n,0}, q_{n,1}, ..., q_{n,K}; q_{n,K} == 1 and every later entry is 1.
    std::vector<std::int64_t> q_seq;

    std::size_t depth() const noexcept { return q_seq.empty() ? 0 : q_seq.size() - 1; }

    /// q_{n,k} for any k, using the constant tail.
    std::int64_t at(std::size_t k) const { return k < q_seq.size() ? q_seq[k] : 1; }
};

/// Smallest s in `divs` (ascending) with 0.5 * theta(s) * n <= s * 2^{k+1}.
inline std::int64_t schedule_entry(const std::vector<std::int64_t>& divs, std::int64_t n,
                                   const MixingProfile& profile, std::size_t k) {
    const double scale = std::ldexp(1.0, static_cast<int>(k) + 1);
    for (auto s : divs)
        if (0.5 * profile.theta(s) * static_cast<double>(n) <= static_cast<double>(s) * scale) return s;
    return divs.back();  // unreachable: s = n always qualifies
}

inline BlockSchedule block_schedule(std::int64_t n, const MixingProfile& profile,
                                    int basis_size = default_basis_size) {
    BlockSchedule sched;
    sched.n = n;
    sched.divisors = divisor_chain(n, basis_size).divisors;
    for (std::size_t k = 0;; ++k) {
        const auto q = schedule_entry(sched.divisors, n, profile, k);
        sched.q_seq.push_back(q);
        if (q == 1) break;
    }
    return sched;
}

/// Smallest element of `divs` that is >= x; the bracket operator [x].
inline std::int64_t smallest_divisor_at_least(const std::vector<std::int64_t>& divs, double x) {
    for (auto d : divs)
        if (static_cast<double>(d) >= x) return d;
    return divs.back();
}

/// Divisor of n closest to `target` (ties resolved downwards).
inline std::int64_t nearest_divisor(std::int64_t n, double target) {
    const auto divs = divisors(n);
    std::int64_t best = divs.front();
    for (auto d : divs)
        if (std::abs(static_cast<double>(d) - target) < std::abs(static_cast<double>(best) - target)) best = d;
    return best;
}

}  // namespace mixbound
