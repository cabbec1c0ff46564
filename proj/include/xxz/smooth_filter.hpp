#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "xxz/model.hpp"
#include "xxz/operators.hpp"
#include "xxz/spectral.hpp"

// The smooth spectral filters Psi_q / Phi_{q,t} and the Helffer-Sjostrand
// functional calculus used to cross-validate the exact eigenbasis route.
//
// Psi_q is built from the standard smooth step s(x) = g(x) / (g(x) + g(1-x)),
// g(x) = exp(-1/x) for x > 0: it rises from 0 to 1 on [-1, 0], holds 1 on
// [0, (q+3/4)u], and falls back to 0 on [(q+3/4)u, (q+7/8)u]. Derivatives are
// computed in closed form with truncated-Taylor (jet) arithmetic.

namespace xxz {

inline constexpr int kJetOrder = 6;  // value + derivatives 1..6

// Truncated Taylor coefficients scaled to derivatives: d[k] = f^(k)(x0).
struct Jet {
    std::array<double, kJetOrder + 1> d{};

    static Jet constant(double c) {
        Jet j;
        j.d[0] = c;
        return j;
    }
    static Jet variable(double x, double slope = 1.0) {
        Jet j;
        j.d[0] = x;
        j.d[1] = slope;
        return j;
    }

    Jet operator+(const Jet& o) const;
    Jet operator-(const Jet& o) const;
    Jet operator*(const Jet& o) const;
    Jet reciprocal() const;
    Jet exp_of() const;
};

// g(x) = exp(-1/x) for x > 0, 0 otherwise; as a jet in the chain variable.
Jet bump_g(const Jet& x);
// s(x) = g(x) / (g(x) + g(1-x)); smooth step, 0 for x <= 0, 1 for x >= 1.
Jet smooth_step(const Jet& x);

struct SmoothFilter {
    HalfInt q;
    double u;        // 1 - 1/Delta
    double plateau_hi;  // (q + 3/4) u
    double cutoff_hi;   // (q + 7/8) u

    SmoothFilter(HalfInt q_, double delta);

    // Psi_q value and derivatives up to kJetOrder.
    Jet eval_jet(double x) const;
    double value(double x) const { return eval_jet(x).d[0]; }
    double derivative(double x, int order) const;

    // Phi_{q,t}(x) = Psi_q(x) e^{itx}; derivatives by the Leibniz rule.
    void phi_derivs(double x, double t, int order, Complex* out) const;

    // support of Psi_q (and Phi_{q,t}) is [-1, cutoff_hi]
    double support_lo() const { return -1.0; }
    double support_hi() const { return cutoff_hi; }
};

// smooth_filter(q, delta): the spec-facing constructor name.
inline SmoothFilter smooth_filter(HalfInt q, double delta) { return SmoothFilter(q, delta); }

// A scalar function with derivatives, for the almost-analytic extension.
struct FilterFunction {
    // writes f(x), f'(x), ..., f^(order)(x) into out[0..order]
    std::function<void(double x, int order, Complex* out)> derivs;
    double lo = 0.0;  // support bounds (f and all derivatives vanish outside)
    double hi = 0.0;
};

FilterFunction phi_filter_function(const SmoothFilter& psi, double t);

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HsOptions {
    int order = 3;        // almost-analytic extension order (>= 2, <= kJetOrder - 1)
    double tol = 1e-7;    // relative refinement tolerance
    int min_panels = 8;   // panels per dimension at the coarsest level
    int max_levels = 6;   // doubling refinements before giving up
};

// Scalar Helffer-Sjostrand evaluation: h(e) = int dftilde(z) (e - z)^{-1} for
// each requested real e, by adaptive tensor Gauss-Legendre quadrature of the
// almost-analytic extension. Throws QuadratureError if refinement stalls.
std::vector<Complex> hs_scalar_integral(const FilterFunction& f, const std::vector<double>& es,
                                        const HsOptions& opts = {});

// f(K) through the Helffer-Sjostrand formula, evaluated against the spectrum
// of a diagonalized Hermitian operator. The resolvents are exact (eigenbasis);
// the almost-analytic extension and the plane integral are the approximation
// being validated.
OpPtr hs_apply(const SpectralData& s, const FilterFunction& f, const HsOptions& opts = {});

}  // namespace xxz
