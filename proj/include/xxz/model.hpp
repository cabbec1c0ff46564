#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "xxz/geometry.hpp"

namespace xxz {

// Half-integer index q in (1/2)N0, stored as 2q.
struct HalfInt {
    int twice = 0;

    HalfInt() = default;
    explicit HalfInt(int twice_q) : twice(twice_q) {
        if (twice < 0) throw std::invalid_argument("HalfInt: negative");
    }
    static HalfInt from_double(double q) {
        double t = 2.0 * q;
        double r = std::round(t);
        if (std::abs(t - r) > 1e-9 || r < 0)
            throw std::invalid_argument("q must be a nonnegative multiple of 1/2");
        return HalfInt(static_cast<int>(r));
    }

    double value() const { return 0.5 * twice; }
    int ceil() const { return (twice + 1) / 2; }  // q_hat
    bool is_zero() const { return twice == 0; }
    bool is_integer() const { return twice % 2 == 0; }
    HalfInt minus_half() const { return HalfInt(twice - 1); }
    HalfInt plus_half() const { return HalfInt(twice + 1); }

    bool operator==(const HalfInt& o) const { return twice == o.twice; }
    bool operator<(const HalfInt& o) const { return twice < o.twice; }
    bool operator<=(const HalfInt& o) const { return twice <= o.twice; }
};

struct ModelParams {
    double delta = 10.0;   // anisotropy, > 1
    double lambda = 1.0;   // disorder strength, > 0

    ModelParams() = default;
    ModelParams(double d, double l) : delta(d), lambda(l) {
        if (!(delta > 1.0)) throw std::invalid_argument("ModelParams: delta must be > 1");
        if (!(lambda > 0.0)) throw std::invalid_argument("ModelParams: lambda must be > 0");
    }

    // threshold unit u = 1 - 1/Delta in (0,1)
    double unit() const { return 1.0 - 1.0 / delta; }
};

// One realization of the random field, omega_i in [0,1] per site.
struct DisorderSample {
    ChainRegion region;
    std::vector<double> omega;  // indexed by site - region.lo
    std::uint64_t seed = 0;     // provenance tag

    double at(int site) const {
        if (!region.contains(site)) throw std::domain_error("DisorderSample: site outside region");
        return omega[static_cast<size_t>(site - region.lo)];
    }

    // Restriction to a subinterval (same field values, same provenance).
    DisorderSample restrict_to(const ChainRegion& sub) const {
        if (!region.contains(sub)) throw std::domain_error("DisorderSample: not a subregion");
        DisorderSample out;
        out.region = sub;
        out.seed = seed;
        out.omega.assign(omega.begin() + (sub.lo - region.lo),
                         omega.begin() + (sub.hi - region.lo + 1));
        return out;
    }
};

// Closed or half-infinite real interval with closed endpoints and a guard
// band of 1e-12 for eigenvalue membership, so projection ranks reproduce.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    static constexpr double kGuard = 1e-12;

    bool contains(double e) const { return e >= lo - kGuard && e <= hi + kGuard; }
    bool is_everything() const { return std::isinf(lo) && lo < 0 && std::isinf(hi) && hi > 0; }
};

// The energy intervals indexed by half-integer q:
//   I_{<=q}     = (-inf, (q+3/4) u],     I_q     = [u, (q+3/4) u],
//   Icheck_{<=q}= (-inf, (q+7/8) u],     Icheckq = [u, (q+7/8) u].
struct EnergyIntervals {
    HalfInt q;
    double u = 0.0;

    EnergyIntervals(HalfInt q_, double unit) : q(q_), u(unit) {}
    EnergyIntervals(HalfInt q_, const ModelParams& p) : q(q_), u(p.unit()) {}

    double i_top() const { return (q.value() + 0.75) * u; }
    double icheck_top() const { return (q.value() + 0.875) * u; }

    Interval i_le() const { return Interval{-std::numeric_limits<double>::infinity(), i_top()}; }
    Interval i_q() const { return Interval{u, i_top()}; }
    Interval icheck_le() const {
        return Interval{-std::numeric_limits<double>::infinity(), icheck_top()};
    }
    Interval icheck_q() const { return Interval{u, icheck_top()}; }
};

}  // namespace xxz
