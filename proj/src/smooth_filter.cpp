#include "xxz/smooth_filter.hpp"

#include <cmath>

namespace xxz {

namespace {

constexpr int kN = kJetOrder;

double binom_d(int n, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

}  // namespace

Jet Jet::operator+(const Jet& o) const {
    Jet r;
    for (int k = 0; k <= kN; ++k) r.d[k] = d[k] + o.d[k];
    return r;
}

Jet Jet::operator-(const Jet& o) const {
    Jet r;
    for (int k = 0; k <= kN; ++k) r.d[k] = d[k] - o.d[k];
    return r;
}

Jet Jet::operator*(const Jet& o) const {
    Jet r;
    for (int k = 0; k <= kN; ++k) {
        double acc = 0.0;
        for (int j = 0; j <= k; ++j) acc += binom_d(k, j) * d[j] * o.d[k - j];
        r.d[k] = acc;
    }
    return r;
}

Jet Jet::reciprocal() const {
    // from (f * r)^(k) = delta_{k0}
    Jet r;
    r.d[0] = 1.0 / d[0];
    for (int k = 1; k <= kN; ++k) {
        double acc = 0.0;
        for (int j = 1; j <= k; ++j) acc += binom_d(k, j) * d[j] * r.d[k - j];
        r.d[k] = -acc / d[0];
    }
    return r;
}

Jet Jet::exp_of() const {
    // e^(k) = sum_j C(k-1,j) a^(k-j) e^(j)
    Jet e;
    e.d[0] = std::exp(d[0]);
    for (int k = 1; k <= kN; ++k) {
        double acc = 0.0;
        for (int j = 0; j <= k - 1; ++j) acc += binom_d(k - 1, j) * d[k - j] * e.d[j];
        e.d[k] = acc;
    }
    return e;
}

Jet bump_g(const Jet& x) {
    if (x.d[0] <= 0.0) return Jet{};  // identically 0 with all derivatives
    Jet minus_inv = Jet::constant(0.0) - x.reciprocal();
    return minus_inv.exp_of();
}

Jet smooth_step(const Jet& x) {
    if (x.d[0] <= 0.0) return Jet{};
    if (x.d[0] >= 1.0) return Jet::constant(1.0);
    Jet g1 = bump_g(x);
    Jet g2 = bump_g(Jet::constant(1.0) - x);
    return g1 * (g1 + g2).reciprocal();
}

SmoothFilter::SmoothFilter(HalfInt q_, double delta) : q(q_), u(1.0 - 1.0 / delta) {
    if (!(delta > 1.0)) throw std::invalid_argument("SmoothFilter: delta must be > 1");
    plateau_hi = (q.value() + 0.75) * u;
    cutoff_hi = (q.value() + 0.875) * u;
}

Jet SmoothFilter::eval_jet(double x) const {
    if (x <= -1.0 || x >= cutoff_hi) return Jet{};
    if (x >= 0.0 && x <= plateau_hi) return Jet::constant(1.0);
    if (x < 0.0) {
        // rising transition on [-1, 0]
        return smooth_step(Jet::variable(x + 1.0));
    }
    // falling transition on [plateau_hi, cutoff_hi]
    const double w = cutoff_hi - plateau_hi;
    return smooth_step(Jet::variable((cutoff_hi - x) / w, -1.0 / w));
}

double SmoothFilter::derivative(double x, int order) const {
    if (order < 0 || order > kN) throw std::invalid_argument("SmoothFilter: bad order");
    return eval_jet(x).d[static_cast<size_t>(order)];
}

void SmoothFilter::phi_derivs(double x, double t, int order, Complex* out) const {
    Jet psi = eval_jet(x);
    const Complex it(0.0, t);
    const Complex phase = std::exp(Complex(0.0, t * x));
    // (psi e^{itx})^(r) = sum_j C(r,j) psi^(j) (it)^{r-j} e^{itx}
    for (int r = 0; r <= order; ++r) {
        Complex acc = 0.0;
        Complex itpow(1.0, 0.0);
        for (int j = r; j >= 0; --j) {
            acc += binom_d(r, j) * psi.d[static_cast<size_t>(j)] * itpow;
            itpow *= it;
        }
        out[r] = acc * phase;
    }
}

FilterFunction phi_filter_function(const SmoothFilter& psi, double t) {
    FilterFunction f;
    f.lo = psi.support_lo();
    f.hi = psi.support_hi();
    f.derivs = [psi, t](double x, int order, Complex* out) {
        psi.phi_derivs(x, t, order, out);
    };
    return f;
}

namespace {

// 8-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr double kGx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                           -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                           0.7966664774136267,  0.9602898564975363};
constexpr double kGw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                           0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                           0.2223810344533745, 0.1012285362903763};

// smooth cutoff in y: 1 for |y| <= 1/2, 0 for |y| >= 1, with first derivative
void cutoff_chi(double y, double& chi, double& dchi) {
    const double a = std::abs(y);
    if (a <= 0.5) {
        chi = 1.0;
        dchi = 0.0;
        return;
    }
    if (a >= 1.0) {
        chi = 0.0;
        dchi = 0.0;
        return;
    }
    Jet s = smooth_step(Jet::variable(2.0 * (1.0 - a), -2.0 * (y > 0 ? 1.0 : -1.0)));
    chi = s.d[0];
    dchi = s.d[1];
}

struct KernelPoint {
    Complex z;
    Complex weight;  // quadrature weight times dfbar(z) value
};

// (1/2pi)(d_x + i d_y) of the order-p almost-analytic extension
Complex dbar_kernel(const FilterFunction& f, int p, double x, double y,
                    std::vector<Complex>& scratch) {
    scratch.resize(static_cast<size_t>(p) + 2);
    f.derivs(x, p + 1, scratch.data());
    double chi, dchi;
    cutoff_chi(y, chi, dchi);
    if (chi == 0.0 && dchi == 0.0) return Complex(0.0, 0.0);
    const Complex iy(0.0, y);
    // (iy)^p / p!
    Complex iyp(1.0, 0.0);
    double fact = 1.0;
    Complex series = scratch[0];  // sum_{r<=p} f^(r) (iy)^r / r!
    for (int r = 1; r <= p; ++r) {
        iyp *= iy;
        fact *= r;
        series += scratch[static_cast<size_t>(r)] * iyp / fact;
    }
    const Complex top = scratch[static_cast<size_t>(p) + 1] * iyp / fact;
    const Complex val = top * chi + Complex(0.0, 1.0) * dchi * series;
    return val / (2.0 * M_PI);
}

std::vector<KernelPoint> kernel_points(const FilterFunction& f, int p, int panels) {
    const double x_lo = f.lo - 0.1, x_hi = f.hi + 0.1;
    const double y_lo = -1.0, y_hi = 1.0;
    const double hx = (x_hi - x_lo) / panels;
    const double hy = (y_hi - y_lo) / panels;
    std::vector<KernelPoint> pts;
    pts.reserve(static_cast<size_t>(panels) * panels * 64);
    std::vector<Complex> scratch;
    for (int px = 0; px < panels; ++px) {
        for (int ix = 0; ix < 8; ++ix) {
            const double x = x_lo + hx * (px + 0.5 * (1.0 + kGx[ix]));
            const double wx = 0.5 * hx * kGw[ix];
            for (int py = 0; py < panels; ++py) {
                for (int iy = 0; iy < 8; ++iy) {
                    const double y = y_lo + hy * (py + 0.5 * (1.0 + kGx[iy]));
                    const double wy = 0.5 * hy * kGw[iy];
                    const Complex k = dbar_kernel(f, p, x, y, scratch);
                    if (k != Complex(0.0, 0.0))
                        pts.push_back({Complex(x, y), k * (wx * wy)});
                }
            }
        }
    }
    return pts;
}

}  // namespace

std::vector<Complex> hs_scalar_integral(const FilterFunction& f, const std::vector<double>& es,
                                        const HsOptions& opts) {
    if (opts.order < 2 || opts.order + 1 > kJetOrder)
        throw std::invalid_argument("hs_scalar_integral: order must be in [2, 5]");
    std::vector<Complex> prev(es.size(), Complex(0.0, 0.0));
    bool have_prev = false;
    int panels = opts.min_panels;
    for (int level = 0; level <= opts.max_levels; ++level, panels *= 2) {
        auto pts = kernel_points(f, opts.order, panels);
        std::vector<Complex> cur(es.size(), Complex(0.0, 0.0));
        for (size_t i = 0; i < es.size(); ++i) {
            Complex acc(0.0, 0.0);
            for (const auto& p : pts) acc += p.weight / (es[i] - p.z);
            cur[i] = acc;
        }
        if (have_prev) {
            double worst = 0.0;
            for (size_t i = 0; i < es.size(); ++i) {
                const double change = std::abs(cur[i] - prev[i]);
                worst = std::max(worst, change / std::max(1.0, std::abs(cur[i])));
            }
            if (worst <= opts.tol) return cur;
        }
        prev = std::move(cur);
        have_prev = true;
    }
    throw QuadratureError("hs integral did not converge within refinement budget");
}

OpPtr hs_apply(const SpectralData& s, const FilterFunction& f, const HsOptions& opts) {
    if (!s.complete()) throw std::runtime_error("hs_apply: requires complete spectral data");
    // distinct eigenvalues, then map back
    std::vector<double> es = s.eigenvalues_sorted();
    std::vector<Complex> hs = hs_scalar_integral(f, es, opts);
    // interpolate by nearest exact eigenvalue (they are exact table lookups)
    auto lookup = [&es, &hs](double e) {
        auto it = std::lower_bound(es.begin(), es.end(), e);
        size_t idx = static_cast<size_t>(it - es.begin());
        if (idx == es.size()) idx = es.size() - 1;
        if (idx > 0 && std::abs(es[idx - 1] - e) < std::abs(es[idx] - e)) --idx;
        return hs[idx];
    };
    return s.function_op(lookup);
}

}  // namespace xxz
