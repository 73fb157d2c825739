// Mixing-coefficient profiles q -> theta(q).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mixbound {

enum class ProfileKind { iid, m_dependent, polynomial, exponential, tabulated };

/// Behaviour of a tabulated profile beyond the last tabulated lag.
enum class TailRule { zero, hold_last, none };

/// Non-increasing dependence profile with theta(0) = 1.
///
/// theta is only ever evaluated on the non-negative integers. Every kind
/// pins theta(0) to 1 regardless of its formula; for the IID kind this is
/// what makes mu_q equal 1 on (0, 1/2].
class MixingProfile {
public:
    static MixingProfile iid() { return MixingProfile(ProfileKind::iid, 0.0); }

    static MixingProfile m_dependent(std::int64_t m) {
        if (m < 1) throw std::invalid_argument("m_dependent profile needs m >= 1");
        return MixingProfile(ProfileKind::m_dependent, static_cast<double>(m));
    }

    static MixingProfile polynomial(double m) {
        if (!(m > 0.0) || !std::isfinite(m))
            throw std::invalid_argument("polynomial profile needs m > 0");
        return MixingProfile(ProfileKind::polynomial, m);
    }

    static MixingProfile exponential(double l) {
        if (!(l > 0.0 && l < 1.0))
            throw std::invalid_argument("exponential profile needs l in (0,1)");
        return MixingProfile(ProfileKind::exponential, l);
    }

    /// Values are indexed from q = 0. They must already be non-increasing and
    /// lie in [0,1]; use monotone_envelope() for raw estimates.
    static MixingProfile tabulated(std::vector<double> values, TailRule tail = TailRule::hold_last) {
        if (values.empty()) throw std::invalid_argument("tabulated profile needs at least one value");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!(values[i] >= 0.0 && values[i] <= 1.0))
                throw std::invalid_argument("tabulated profile values must lie in [0,1]");
            if (i > 0 && values[i] > values[i - 1])
                throw std::invalid_argument("tabulated profile must be non-increasing");
        }
        MixingProfile p(ProfileKind::tabulated, 0.0);
        p.table_ = std::move(values);
        p.tail_ = tail;
        return p;
    }

    ProfileKind kind() const noexcept { return kind_; }
    double parameter() const noexcept { return param_; }
    const std::vector<double>& table() const noexcept { return table_; }
    TailRule tail() const noexcept { return tail_; }

    double theta(std::int64_t q) const {
        if (q < 0) throw std::invalid_argument("theta: q must be non-negative");
        if (q == 0) return 1.0;
        switch (kind_) {
        case ProfileKind::iid: return 0.0;
        case ProfileKind::m_dependent: return static_cast<double>(q) < param_ ? 1.0 : 0.0;
        case ProfileKind::polynomial: return std::pow(1.0 + static_cast<double>(q), -param_);
        case ProfileKind::exponential: return std::pow(param_, static_cast<double>(q));
        case ProfileKind::tabulated: {
            const auto idx = static_cast<std::size_t>(q);
            if (idx < table_.size()) return table_[idx];
            switch (tail_) {
            case TailRule::zero: return 0.0;
            case TailRule::hold_last: return table_.back();
            case TailRule::none: throw std::out_of_range("theta: lag beyond tabulated profile");
            }
        }
        }
        return 0.0;
    }

    /// Generalized inverse: min { s >= 0 : theta(s) <= u }.
    std::int64_t theta_inverse(double u) const {
        if (!(u >= 0.0)) throw std::invalid_argument("theta_inverse: u must be non-negative");
        if (u >= 1.0) return 0;
        switch (kind_) {
        case ProfileKind::iid: return 1;
        case ProfileKind::m_dependent: return static_cast<std::int64_t>(param_);
        case ProfileKind::polynomial:
        case ProfileKind::exponential: {
            if (u == 0.0) throw std::domain_error("inverse undefined: profile never reaches 0");
            double guess = kind_ == ProfileKind::polynomial ? std::pow(u, -1.0 / param_) - 1.0
                                                            : std::log(u) / std::log(param_);
            if (guess > 9.0e18) throw std::domain_error("inverse undefined: lag overflows");
            auto s = static_cast<std::int64_t>(std::ceil(std::max(guess, 0.0)));
            // the closed form can be off by one ulp either way
            while (s > 0 && theta(s - 1) <= u) --s;
            while (theta(s) > u) ++s;
            return s;
        }
        case ProfileKind::tabulated: {
            for (std::size_t i = 0; i < table_.size(); ++i)
                if (i == 0 ? 1.0 <= u : table_[i] <= u) return static_cast<std::int64_t>(i);
            if (tail_ == TailRule::zero) return static_cast<std::int64_t>(table_.size());
            throw std::domain_error("inverse undefined: tabulated profile never drops to u");
        }
        }
        return 0;
    }

    /// Sum of theta(i) for i >= 1 when it converges, +inf otherwise.
    double tail_sum() const {
        switch (kind_) {
        case ProfileKind::iid: return 0.0;
        case ProfileKind::m_dependent: return std::ceil(param_) - 1.0;
        case ProfileKind::exponential: return param_ / (1.0 - param_);
        case ProfileKind::polynomial: {
            if (param_ <= 1.0) return std::numeric_limits<double>::infinity();
            double s = 0.0;
            for (std::int64_t i = 1; i <= 1000000; ++i) s += theta(i);
            return s;
        }
        case ProfileKind::tabulated: {
            if (tail_ != TailRule::zero && table_.back() > 0.0)
                return std::numeric_limits<double>::infinity();
            double s = 0.0;
            for (std::size_t i = 1; i < table_.size(); ++i) s += table_[i];
            return s;
        }
        }
        return 0.0;
    }

    std::string to_string() const {
        std::ostringstream os;
        os.precision(12);
        switch (kind_) {
        case ProfileKind::iid: os << "iid"; break;
        case ProfileKind::m_dependent: os << "mdep:m=" << static_cast<std::int64_t>(param_); break;
        case ProfileKind::polynomial: os << "poly:m=" << param_; break;
        case ProfileKind::exponential: os << "expo:l=" << param_; break;
        case ProfileKind::tabulated: os << "table:" << table_.size() << " values"; break;
        }
        return os.str();
    }

private:
    MixingProfile(ProfileKind kind, double param) : kind_(kind), param_(param) {}

    ProfileKind kind_;
    double param_;
    std::vector<double> table_;
    TailRule tail_ = TailRule::hold_last;
};

/// q -> max_{q' >= q} raw(q'); the tail rule carries over unchanged.
inline MixingProfile monotone_envelope(const std::vector<double>& raw, TailRule tail = TailRule::zero) {
    if (raw.empty()) throw std::invalid_argument("monotone_envelope: empty input");
    for (double v : raw)
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("monotone_envelope: values must lie in [0,1]");
    std::vector<double> env(raw.size());
    double running = tail == TailRule::zero ? 0.0 : raw.back();
    for (std::size_t i = raw.size(); i-- > 0;) {
        running = std::max(running, raw[i]);
        env[i] = running;
    }
    return MixingProfile::tabulated(std::move(env), tail);
}

namespace detail {

inline double parse_named_value(std::string_view body, std::string_view key) {
    const std::string prefix = std::string(key) + "=";
    if (body.substr(0, prefix.size()) != prefix)
        throw std::invalid_argument("profile spec: expected '" + prefix + "...'");
    const std::string num(body.substr(prefix.size()));
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(num, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("profile spec: bad number '" + num + "'");
    }
    if (used != num.size()) throw std::invalid_argument("profile spec: bad number '" + num + "'");
    return v;
}

inline std::vector<double> read_csv_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("profile spec: cannot open table '" + path + "'");
    std::vector<double> out;
    std::string line;
    while (std::getline(in, line)) {
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            try {
                out.push_back(std::stod(tok));
            } catch (const std::exception&) {
                // header cells are skipped
            }
        }
    }
    return out;
}

}  // namespace detail

/// Parses `iid`, `mdep:m=<int>`, `poly:m=<float>`, `expo:l=<float>`, `table:<csv path>`.
/// Tables are passed through monotone_envelope and hold their last value.
inline MixingProfile parse_profile(std::string_view spec) {
    if (spec == "iid") return MixingProfile::iid();
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos)
        throw std::invalid_argument("unknown profile spec '" + std::string(spec) + "'");
    const auto head = spec.substr(0, colon);
    const auto body = spec.substr(colon + 1);
    if (head == "mdep") {
        const double m = detail::parse_named_value(body, "m");
        if (m != std::floor(m)) throw std::invalid_argument("mdep:m must be an integer");
        return MixingProfile::m_dependent(static_cast<std::int64_t>(m));
    }
    if (head == "poly") return MixingProfile::polynomial(detail::parse_named_value(body, "m"));
    if (head == "expo") return MixingProfile::exponential(detail::parse_named_value(body, "l"));
    if (head == "table") {
        auto values = detail::read_csv_values(std::string(body));
        if (values.empty()) throw std::invalid_argument("profile table is empty");
        return monotone_envelope(values, TailRule::hold_last);
    }
    throw std::invalid_argument("unknown profile kind '" + std::string(head) + "'");
}

}  // namespace mixbound
