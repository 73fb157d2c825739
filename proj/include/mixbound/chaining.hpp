// Talagrand-type complexity of finite classes under a family of seminorms.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mixbound/grid.hpp"
#include "mixbound/norms.hpp"
#include "mixbound/profile.hpp"
#include "mixbound/quantile.hpp"

namespace mixbound {

using Vec = std::vector<double>;

/// Finite class: every member is an evaluation vector on a shared support
/// carrying probability weights.
class FunctionClass {
public:
    FunctionClass() = default;

    FunctionClass(std::vector<Vec> members, Vec weights, std::vector<std::string> names = {})
        : members_(std::move(members)), weights_(std::move(weights)), names_(std::move(names)) {
        if (members_.empty()) throw std::invalid_argument("FunctionClass: empty class");
        const auto len = members_.front().size();
        if (len == 0) throw std::invalid_argument("FunctionClass: empty support");
        for (const auto& m : members_)
            if (m.size() != len) throw std::invalid_argument("FunctionClass: members differ in length");
        if (weights_.empty()) weights_.assign(len, 1.0 / static_cast<double>(len));
        if (weights_.size() != len) throw std::invalid_argument("FunctionClass: weight length mismatch");
        double total = 0.0;
        for (double w : weights_) {
            if (!(w >= 0.0)) throw std::invalid_argument("FunctionClass: negative weight");
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("FunctionClass: weights must sum to 1");
        if (names_.empty())
            for (std::size_t i = 0; i < members_.size(); ++i) names_.push_back("f" + std::to_string(i));
        if (names_.size() != members_.size()) throw std::invalid_argument("FunctionClass: name count mismatch");
    }

    std::size_t size() const noexcept { return members_.size(); }
    std::size_t support_size() const noexcept { return weights_.size(); }
    const Vec& member(std::size_t i) const { return members_.at(i); }
    const std::vector<Vec>& members() const noexcept { return members_; }
    const Vec& weights() const noexcept { return weights_; }
    const std::vector<std::string>& names() const noexcept { return names_; }

    double sup_bound() const {
        double s = 0.0;
        for (const auto& m : members_)
            for (double v : m) s = std::max(s, std::abs(v));
        return s;
    }

    FunctionClass scaled(double c) const {
        auto copy = members_;
        for (auto& m : copy)
            for (double& v : m) v *= c;
        return FunctionClass(std::move(copy), weights_, names_);
    }

    FunctionClass subset(const std::vector<std::size_t>& idx) const {
        std::vector<Vec> m;
        std::vector<std::string> n;
        for (auto i : idx) {
            m.push_back(members_.at(i));
            n.push_back(names_.at(i));
        }
        return FunctionClass(std::move(m), weights_, std::move(n));
    }

private:
    std::vector<Vec> members_;
    Vec weights_;
    std::vector<std::string> names_;
};

using Seminorm = std::function<double(const Vec&)>;

/// Weighted L^r seminorm, r in [1, inf].
inline Seminorm lr_seminorm(Vec weights, double r) {
    if (!(r >= 1.0)) throw std::invalid_argument("lr_seminorm: r must be >= 1");
    return [w = std::move(weights), r](const Vec& v) {
        if (std::isinf(r)) {
            double s = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i)
                if (w[i] > 0.0) s = std::max(s, std::abs(v[i]));
            return s;
        }
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * std::pow(std::abs(v[i]), r);
        return std::pow(s, 1.0 / r);
    };
}

/// The dependence-adapted norm ||.||_q for a discrete law.
inline Seminorm q_seminorm(Vec weights, std::int64_t q, MixingProfile profile) {
    return [w = std::move(weights), q, p = std::move(profile)](const Vec& v) {
        return q_norm(QuantileCurve::from_discrete(v, w), q, p);
    };
}

/// Ordered seminorms d_0, d_1, ...; levels past the end reuse the last one.
class NormFamily {
public:
    NormFamily() = default;
    NormFamily(std::vector<Seminorm> levels, std::string label)
        : levels_(std::move(levels)), label_(std::move(label)) {
        if (levels_.empty()) throw std::invalid_argument("NormFamily: no levels");
    }

    static NormFamily constant(Seminorm d, std::string label = "constant") {
        return NormFamily({std::move(d)}, std::move(label));
    }
    static NormFamily l2(const Vec& weights) { return constant(lr_seminorm(weights, 2.0), "constant:l2"); }
    static NormFamily lr(const Vec& weights, double r) {
        return constant(lr_seminorm(weights, r), "constant:lr");
    }
    static NormFamily linf(const Vec& weights) {
        return constant(lr_seminorm(weights, std::numeric_limits<double>::infinity()), "constant:linf");
    }
    /// d_l = ||.||_{q_{n,l}} along the block schedule of n.
    static NormFamily schedule(const Vec& weights, std::int64_t n, const MixingProfile& profile) {
        const auto sched = block_schedule(n, profile);
        std::vector<Seminorm> lv;
        for (std::size_t l = 0; l < sched.q_seq.size(); ++l) lv.push_back(q_seminorm(weights, sched.q_seq[l], profile));
        return NormFamily(std::move(lv), "schedule:n=" + std::to_string(n) + ",profile=" + profile.to_string());
    }

    const Seminorm& at(std::size_t l) const { return levels_[std::min(l, levels_.size() - 1)]; }
    double operator()(std::size_t l, const Vec& v) const { return at(l)(v); }
    const std::string& label() const noexcept { return label_; }

private:
    std::vector<Seminorm> levels_;
    std::string label_;
};

/// Partition of {0..N-1} as cell labels; labels are in restricted-growth form.
using Partition = std::vector<int>;

inline int cell_count(const Partition& p) {
    int c = 0;
    for (int v : p) c = std::max(c, v + 1);
    return c;
}

/// Relabels cells 0, 1, ... in order of first appearance.
inline Partition canonical(const Partition& p) {
    Partition out(p.size());
    std::vector<std::pair<int, int>> seen;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < 0) throw std::invalid_argument("partition: negative label");
        auto it = std::find_if(seen.begin(), seen.end(), [&](auto& s) { return s.first == p[i]; });
        if (it == seen.end()) {
            seen.emplace_back(p[i], static_cast<int>(seen.size()));
            out[i] = seen.back().second;
        } else {
            out[i] = it->second;
        }
    }
    return out;
}

/// 2^{2^l}, saturated.
inline std::int64_t level_cap(std::size_t l) {
    if (l >= 6) return std::numeric_limits<std::int64_t>::max();
    return std::int64_t{1} << (std::int64_t{1} << l);
}

struct PartitionSequence {
    std::vector<Partition> levels;

    std::size_t depth() const noexcept { return levels.size(); }
    /// Level l of the sequence; past the end every cell is a singleton.
    Partition level(std::size_t l, std::size_t n) const {
        if (l < levels.size()) return levels[l];
        Partition p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<int>(i);
        return p;
    }
};

/// Throws std::invalid_argument naming the first violated admissibility rule.
inline void validate(const PartitionSequence& seq, std::size_t n) {
    if (seq.levels.empty()) throw std::invalid_argument("partition sequence: no levels");
    for (std::size_t l = 0; l < seq.levels.size(); ++l) {
        const auto& p = seq.levels[l];
        if (p.size() != n) throw std::invalid_argument("partition sequence: level size mismatch");
        for (int v : p)
            if (v < 0) throw std::invalid_argument("partition sequence: negative label");
        if (cell_count(canonical(p)) > level_cap(l))
            throw std::invalid_argument("partition sequence: level " + std::to_string(l) + " exceeds 2^(2^l) cells");
        if (l == 0 && cell_count(canonical(p)) != 1)
            throw std::invalid_argument("partition sequence: level 0 must be a single cell");
        if (l > 0) {
            const auto& prev = seq.levels[l - 1];
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (p[i] == p[j] && prev[i] != prev[j])
                        throw std::invalid_argument("partition sequence: level " + std::to_string(l) + " is not nested");
        }
    }
    const auto& last = canonical(seq.levels.back());
    if (cell_count(last) != static_cast<int>(n))
        throw std::invalid_argument("partition sequence: last level must consist of singletons");
}

/// Pointwise max - min over the members of f's cell (= sup of pairwise gaps).
inline Vec cell_diameter(const FunctionClass& cls, std::size_t f, const Partition& level) {
    const auto len = cls.support_size();
    Vec lo = cls.member(f), hi = cls.member(f);
    for (std::size_t g = 0; g < cls.size(); ++g) {
        if (level[g] != level[f]) continue;
        const auto& v = cls.member(g);
        for (std::size_t x = 0; x < len; ++x) {
            lo[x] = std::min(lo[x], v[x]);
            hi[x] = std::max(hi[x], v[x]);
        }
    }
    for (std::size_t x = 0; x < len; ++x) hi[x] -= lo[x];
    return hi;
}

/// sup_f sqrt(2) sum_l 2^{l/2} d_l(D(f, T_l)), summed in ascending l.
inline double sequence_value(const FunctionClass& cls, const NormFamily& family, const PartitionSequence& seq) {
    validate(seq, cls.size());
    double best = 0.0;
    for (std::size_t f = 0; f < cls.size(); ++f) {
        double s = 0.0;
        for (std::size_t l = 0; l < seq.levels.size(); ++l)
            s += std::sqrt(std::ldexp(1.0, static_cast<int>(l))) * family(l, cell_diameter(cls, f, seq.levels[l]));
        best = std::max(best, s);
    }
    return std::sqrt(2.0) * best;
}

struct GammaResult {
    double value = 0.0;
    PartitionSequence witness;
};

inline constexpr std::size_t gamma_exact_max_size = 8;

/// Number of levels searched by gamma_exact: one level past the first whose
/// cap admits full separation, with singletons forced at the final level.
inline std::size_t gamma_search_depth(std::size_t n) {
    std::size_t l = 0;
    while (level_cap(l) < static_cast<std::int64_t>(n)) ++l;
    return l + 1;
}

namespace detail {

using Mask = std::uint32_t;

inline Partition masks_to_labels(const std::vector<Mask>& cells, std::size_t n) {
    Partition p(n, -1);
    for (std::size_t c = 0; c < cells.size(); ++c)
        for (std::size_t i = 0; i < n; ++i)
            if (cells[c] >> i & 1U) p[i] = static_cast<int>(c);
    return canonical(p);
}

struct ExactSearch {
    const FunctionClass& cls;
    std::size_t n;
    std::size_t depth;  // levels 0..depth, level `depth` is all singletons
    // cost[l][mask] = 2^{l/2} d_l(D(cell)); identical for all members of the cell
    std::vector<std::vector<double>> cost;
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::vector<Mask>> current, best_levels;

    ExactSearch(const FunctionClass& c, const NormFamily& family)
        : cls(c), n(c.size()), depth(gamma_search_depth(c.size())) {
        const Mask full = static_cast<Mask>((1U << n) - 1U);
        cost.assign(depth + 1, std::vector<double>(full + 1, 0.0));
        for (std::size_t l = 0; l <= depth; ++l) {
            const double w = std::sqrt(std::ldexp(1.0, static_cast<int>(l)));
            for (Mask m = 1; m <= full; ++m) {
                Partition lab(n, -1);
                std::size_t first = 0;
                bool seen = false;
                for (std::size_t i = 0; i < n; ++i)
                    if (m >> i & 1U) {
                        lab[i] = 0;
                        if (!seen) { first = i; seen = true; }
                    } else {
                        lab[i] = 1 + static_cast<int>(i);
                    }
                cost[l][m] = w * family(l, cell_diameter(cls, first, lab));
            }
        }
    }

    // Enumerate refinements of `parent` (a list of cells) into at most `cap`
    // cells, one parent cell at a time.
    void refine(std::size_t level, const std::vector<Mask>& parent, std::size_t pi, std::vector<Mask>& out,
                const std::vector<double>& acc, std::int64_t cap) {
        if (pi == parent.size()) {
            std::vector<double> next = acc;
            double worst = 0.0;
            for (Mask c : out)
                for (std::size_t i = 0; i < n; ++i)
                    if (c >> i & 1U) {
                        next[i] += cost[level][c];
                        worst = std::max(worst, next[i]);
                    }
            if (worst >= best) return;
            current.push_back(out);
            descend(level + 1, next);
            current.pop_back();
            return;
        }
        // split parent[pi] into sub-cells; the lowest element anchors each sub-cell
        split(level, parent, pi, parent[pi], out, acc, cap);
    }

    void split(std::size_t level, const std::vector<Mask>& parent, std::size_t pi, Mask rest, std::vector<Mask>& out,
               const std::vector<double>& acc, std::int64_t cap) {
        if (rest == 0) {
            refine(level, parent, pi + 1, out, acc, cap);
            return;
        }
        // cells still needed at minimum: this one plus one per remaining parent cell
        const auto remaining = static_cast<std::int64_t>(parent.size() - pi - 1);
        if (static_cast<std::int64_t>(out.size()) + 1 + remaining > cap) return;
        const Mask low = rest & (~rest + 1U);
        const Mask others = rest & ~low;
        // enumerate subsets of `others` to join `low`
        Mask sub = others;
        while (true) {
            out.push_back(low | sub);
            split(level, parent, pi, others & ~sub, out, acc, cap);
            out.pop_back();
            if (sub == 0) break;
            sub = (sub - 1U) & others;
        }
    }

    void descend(std::size_t level, const std::vector<double>& acc) {
        if (level == depth) {
            // forced singletons contribute cost of a zero diameter
            std::vector<Mask> singles;
            double worst = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                singles.push_back(Mask{1} << i);
                worst = std::max(worst, acc[i] + cost[level][Mask{1} << i]);
            }
            if (worst < best) {
                best = worst;
                best_levels = current;
                best_levels.push_back(singles);
            }
            return;
        }
        std::vector<Mask> out;
        const std::vector<Mask> parent = current.back();  // current grows during the recursion
        refine(level, parent, 0, out, acc, level_cap(level));
    }

    void run() {
        const Mask full = static_cast<Mask>((1U << n) - 1U);
        std::vector<double> acc(n, cost[0][full]);
        current = {{full}};
        descend(1, acc);
    }
};

}  // namespace detail

/// Exact infimum over admissible nested sequences (see gamma_search_depth).
inline GammaResult gamma_exact(const FunctionClass& cls, const NormFamily& family) {
    const auto n = cls.size();
    if (n > gamma_exact_max_size)
        throw std::invalid_argument("gamma_exact: class of size " + std::to_string(n) +
                                    " exceeds the exhaustive budget of 8; use gamma_greedy");
    if (n == 1) return {0.0, PartitionSequence{{Partition{0}}}};
    detail::ExactSearch search(cls, family);
    search.run();
    GammaResult res;
    res.value = std::sqrt(2.0) * search.best;
    for (const auto& lv : search.best_levels) res.witness.levels.push_back(detail::masks_to_labels(lv, n));
    return res;
}

/// Nested refinement that repeatedly splits the widest cell around its two
/// most distant members until the level cap is reached.
inline GammaResult gamma_greedy(const FunctionClass& cls, const NormFamily& family, std::size_t depth = 64) {
    const auto n = cls.size();
    PartitionSequence seq;
    seq.levels.push_back(Partition(n, 0));
    auto dist = [&](std::size_t l, std::size_t a, std::size_t b) {
        Vec d(cls.support_size());
        for (std::size_t x = 0; x < d.size(); ++x) d[x] = std::abs(cls.member(a)[x] - cls.member(b)[x]);
        return family(l, d);
    };
    for (std::size_t l = 1; cell_count(seq.levels.back()) < static_cast<int>(n); ++l) {
        Partition p = seq.levels.back();
        if (l >= depth) {
            for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<int>(i);
            seq.levels.push_back(canonical(p));
            break;
        }
        const std::int64_t cap = level_cap(l);
        while (cell_count(p) < cap && cell_count(p) < static_cast<int>(n)) {
            // widest cell under d_l
            int widest = -1;
            double wval = -1.0;
            for (int c = 0; c < cell_count(p); ++c) {
                std::size_t rep = 0;
                std::size_t size = 0;
                for (std::size_t i = 0; i < n; ++i)
                    if (p[i] == c) { if (size++ == 0) rep = i; }
                if (size < 2) continue;
                const double v = family(l, cell_diameter(cls, rep, p));
                if (v > wval) { wval = v; widest = c; }
            }
            if (widest < 0) break;
            std::vector<std::size_t> cell;
            for (std::size_t i = 0; i < n; ++i)
                if (p[i] == widest) cell.push_back(i);
            std::size_t a = cell[0], b = cell[1];
            double far = -1.0;
            for (std::size_t i = 0; i < cell.size(); ++i)
                for (std::size_t j = i + 1; j < cell.size(); ++j)
                    if (const double d = dist(l, cell[i], cell[j]); d > far) { far = d; a = cell[i]; b = cell[j]; }
            const int fresh = cell_count(p);
            for (auto i : cell)
                if (i == b || (i != a && dist(l, i, b) < dist(l, i, a))) p[i] = fresh;
            p = canonical(p);
        }
        seq.levels.push_back(p);
    }
    return {sequence_value(cls, family, seq), seq};
}

/// Greedy set cover by closed balls centred at class members.
inline std::size_t covering_number_greedy(const FunctionClass& cls, const Seminorm& d, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("covering_number: eps must be positive");
    const auto n = cls.size();
    std::vector<std::vector<bool>> within(n, std::vector<bool>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Vec diff(cls.support_size());
            for (std::size_t x = 0; x < diff.size(); ++x) diff[x] = cls.member(i)[x] - cls.member(j)[x];
            within[i][j] = d(diff) <= eps;
        }
    std::vector<bool> covered(n, false);
    std::size_t left = n, count = 0;
    while (left > 0) {
        std::size_t best = 0, gain = 0;
        for (std::size_t c = 0; c < n; ++c) {
            std::size_t g = 0;
            for (std::size_t j = 0; j < n; ++j) g += (!covered[j] && within[c][j]) ? 1 : 0;
            if (g > gain) { gain = g; best = c; }
        }
        for (std::size_t j = 0; j < n; ++j)
            if (within[best][j] && !covered[j]) { covered[j] = true; --left; }
        ++count;
    }
    return count;
}

/// Minimal cover by exhaustive search over centre subsets (size <= 16).
inline std::size_t covering_number_exact(const FunctionClass& cls, const Seminorm& d, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("covering_number: eps must be positive");
    const auto n = cls.size();
    if (n > 16) throw std::invalid_argument("covering_number_exact: class larger than 16");
    std::vector<std::uint32_t> ball(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Vec diff(cls.support_size());
            for (std::size_t x = 0; x < diff.size(); ++x) diff[x] = cls.member(i)[x] - cls.member(j)[x];
            if (d(diff) <= eps) ball[i] |= 1U << j;
        }
    const std::uint32_t full = (1U << n) - 1U;
    std::size_t best = n;
    for (std::uint32_t s = 1; s <= full; ++s) {
        const auto k = static_cast<std::size_t>(__builtin_popcount(s));
        if (k >= best) continue;
        std::uint32_t cov = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (s >> i & 1U) cov |= ball[i];
        if (cov == full) best = k;
    }
    return best;
}

/// Exact for classes of at most 16 members, greedy upper bound beyond.
inline std::size_t covering_number(const FunctionClass& cls, const Seminorm& d, double eps) {
    return cls.size() <= 16 ? covering_number_exact(cls, d, eps) : covering_number_greedy(cls, d, eps);
}

/// int_0^delta sqrt(log N(eps)) d eps. Below the smallest pairwise distance N
/// is the class size, which is integrated exactly; above it a trapezoid rule
/// on a log-spaced grid.
inline double entropy_integral(const FunctionClass& cls, const Seminorm& d, double delta, std::size_t points = 200) {
    if (!(delta > 0.0)) throw std::invalid_argument("entropy_integral: delta must be positive");
    const auto n = cls.size();
    if (n == 1) return 0.0;
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            Vec diff(cls.support_size());
            for (std::size_t x = 0; x < diff.size(); ++x) diff[x] = cls.member(i)[x] - cls.member(j)[x];
            const double v = d(diff);
            if (v > 0.0) dmin = std::min(dmin, v);
        }
    if (!std::isfinite(dmin)) return 0.0;  // all members coincide
    auto h = [&](double e) { return std::sqrt(std::log(static_cast<double>(covering_number(cls, d, e)))); };
    const double lo = std::min(0.5 * dmin, delta);
    double s = lo * std::sqrt(std::log(static_cast<double>(covering_number(cls, d, 0.5 * lo))));
    if (lo >= delta) return s;
    const double ratio = std::log(delta / lo) / static_cast<double>(points - 1);
    double prev_e = lo, prev_h = h(lo);
    for (std::size_t i = 1; i < points; ++i) {
        const double e = (i + 1 == points) ? delta : lo * std::exp(ratio * static_cast<double>(i));
        const double he = h(e);
        s += 0.5 * (prev_h + he) * (e - prev_e);
        prev_e = e;
        prev_h = he;
    }
    return s;
}

/// Links of the chain between f and f0 with pointwise truncation.
struct ChainDecomposition {
    std::size_t levels = 0;
    std::vector<std::int64_t> q;  // q_{n,k}
    std::vector<Vec> delta;       // Delta_k f, k = 0 unused
    std::vector<Vec> xi;          // Xi_k f
    std::vector<Vec> diam;        // D_k f
    Vec a;                        // a_{n,k}
    std::vector<std::int64_t> stop;  // m(f)(x); -1 encodes "never"
    Vec s1, s2, s3;
    double residual = 0.0;        // sup_x |f - f0 - (S(f) - S(f0))|
};

namespace detail {

inline std::size_t center(const Partition& level, std::size_t f) {
    for (std::size_t i = 0; i < level.size(); ++i)
        if (level[i] == level[f]) return i;
    return f;
}

struct SideSums {
    Vec s1, s2, s3;
};

inline SideSums chain_sums(const FunctionClass& cls, std::size_t f, const PartitionSequence& seq,
                           const Vec& a, const std::vector<Vec>& diam, std::vector<std::int64_t>* stop_out,
                           std::vector<Vec>* delta_out, std::vector<Vec>* xi_out) {
    const auto len = cls.support_size();
    const auto L = seq.levels.size();
    std::vector<Vec> pi(L);
    for (std::size_t k = 0; k < L; ++k) pi[k] = cls.member(center(seq.levels[k], f));
    SideSums out{Vec(len, 0.0), Vec(len, 0.0), Vec(len, 0.0)};
    std::vector<std::int64_t> stop(len, -1);
    for (std::size_t x = 0; x < len; ++x)
        for (std::size_t k = 0; k < L; ++k)
            if (std::abs(diam[k][x]) > a[k]) { stop[x] = static_cast<std::int64_t>(k); break; }
    const auto& fv = cls.member(f);
    for (std::size_t x = 0; x < len; ++x) {
        const auto m = stop[x];
        if (m == 0) out.s3[x] = pi[0][x] - fv[x];
        for (std::size_t k = 1; k < L; ++k) {
            const auto kk = static_cast<std::int64_t>(k);
            const bool reached = m < 0 || m >= kk;
            if (reached && std::abs(diam[k][x]) <= a[k]) out.s1[x] += pi[k][x] - pi[k - 1][x];
            if (m == kk && std::abs(diam[k][x]) > a[k]) out.s2[x] += pi[k - 1][x] - fv[x];
        }
    }
    if (stop_out) *stop_out = stop;
    if (delta_out) {
        delta_out->assign(L, Vec(len, 0.0));
        for (std::size_t k = 1; k < L; ++k)
            for (std::size_t x = 0; x < len; ++x) (*delta_out)[k][x] = pi[k][x] - pi[k - 1][x];
    }
    if (xi_out) {
        xi_out->assign(L, Vec(len, 0.0));
        for (std::size_t k = 0; k < L; ++k)
            for (std::size_t x = 0; x < len; ++x) (*xi_out)[k][x] = pi[k][x] - fv[x];
    }
    return out;
}

}  // namespace detail

/// Chain of f relative to f0 with thresholds
/// a_k = sqrt(n) 2 ||D_k f||_{q_{n,k}} / (q_{n,k} sqrt(2^{k+1})).
///
/// Centres are the lowest-index member of each cell. Since both f and f0 share
/// the single level-0 cell, f - f0 = S(f) - S(f0) with S = S1 - S2 - S3.
inline ChainDecomposition chain_decomposition(const FunctionClass& cls, std::size_t f, std::size_t f0,
                                              const PartitionSequence& seq, const MixingProfile& profile,
                                              std::int64_t n) {
    validate(seq, cls.size());
    if (f >= cls.size() || f0 >= cls.size()) throw std::invalid_argument("chain_decomposition: member out of range");
    const auto sched = block_schedule(n, profile);
    const auto L = seq.levels.size();
    ChainDecomposition out;
    out.levels = L;
    auto thresholds = [&](std::size_t g, std::vector<Vec>& diam, Vec& a) {
        diam.resize(L);
        a.resize(L);
        for (std::size_t k = 0; k < L; ++k) {
            diam[k] = cell_diameter(cls, g, seq.levels[k]);
            const auto qk = sched.at(k);
            const double nq = q_norm(QuantileCurve::from_discrete(diam[k], cls.weights()), qk, profile);
            a[k] = std::sqrt(static_cast<double>(n)) * 2.0 * nq /
                   (static_cast<double>(qk) * std::sqrt(std::ldexp(1.0, static_cast<int>(k) + 1)));
        }
    };
    for (std::size_t k = 0; k < L; ++k) out.q.push_back(sched.at(k));
    thresholds(f, out.diam, out.a);
    const auto sf = detail::chain_sums(cls, f, seq, out.a, out.diam, &out.stop, &out.delta, &out.xi);
    out.s1 = sf.s1;
    out.s2 = sf.s2;
    out.s3 = sf.s3;

    std::vector<Vec> diam0;
    Vec a0;
    thresholds(f0, diam0, a0);
    const auto s0 = detail::chain_sums(cls, f0, seq, a0, diam0, nullptr, nullptr, nullptr);
    const auto& fv = cls.member(f);
    const auto& gv = cls.member(f0);
    for (std::size_t x = 0; x < cls.support_size(); ++x) {
        const double lhs = fv[x] - gv[x];
        const double rhs = (sf.s1[x] - sf.s2[x] - sf.s3[x]) - (s0.s1[x] - s0.s2[x] - s0.s3[x]);
        out.residual = std::max(out.residual, std::abs(lhs - rhs));
    }
    return out;
}

}  // namespace mixbound
