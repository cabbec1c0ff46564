#include "xxz/quasiloc.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace xxz {

std::string MeasurementRecord::csv_header() {
    return "seed,L,delta,lambda,k_or_q,ell,dist,statistic,value";
}

std::string MeasurementRecord::csv_row() const {
    std::ostringstream os;
    os.precision(17);
    os << seed << ',' << chain_length << ',' << delta << ',' << lambda << ',' << k_or_q << ','
       << ell << ',';
    if (dist == kInfDist)
        os << "inf";
    else
        os << dist;
    os << ',' << statistic << ',' << value;
    return os.str();
}

namespace {

int crossing_dist(const SiteSet& a, const SiteSet& b) {
    return dist_sets(a, b.complement());
}

void require_nested(const SiteSet& a, const SiteSet& b) {
    if (!a.is_subset_of(b)) throw std::domain_error("quasiloc: requires A subset of B");
}

// largest eigenvalue of a small Hermitian PSD matrix
double psd_lambda_max(const Eigen::MatrixXcd& g) {
    if (g.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
    return std::max(0.0, es.eigenvalues().maxCoeff());
}

// ||X Y^dagger|| for tall X, Y via lambda_max((X^*X)^{1/2} (Y^*Y) (X^*X)^{1/2})
double tall_product_norm(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
    if (x.cols() == 0) return 0.0;
    Eigen::MatrixXcd xx = x.adjoint() * x;
    Eigen::MatrixXcd yy = y.adjoint() * y;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(xx);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXcd sqrt_xx =
        es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
    return std::sqrt(psd_lambda_max(sqrt_xx * yy * sqrt_xx));
}

}  // namespace

CrossingNorm resolvent_crossing_norm(const SpectralData& s, const SiteSet& a, const SiteSet& b,
                                     Complex z, double power, const NormOptions& opts) {
    require_nested(a, b);
    CrossingNorm out;
    out.dist = crossing_dist(a, b);
    OpPtr pm = projector_pm(a, PmSign::Minus);
    OpPtr pp = projector_pm(b, PmSign::Plus);
    OpPtr k = product({pm, s.resolvent_op(z), pp});
    out.raw_norm = operator_norm(*k, opts);
    out.value = std::pow(out.raw_norm, power);
    return out;
}

EigencorrelatorResult eigencorrelator(const SpectralData& s, const SiteSet& a, const SiteSet& b,
                                      const Interval& j) {
    require_nested(a, b);
    EigencorrelatorResult out;
    out.dist = crossing_dist(a, b);
    if (a.empty_set()) return out;  // P_-^empty = 0

    Isometry v = s.isometry(j);
    if (v.rank() == 0) return out;
    OpPtr pm = projector_pm(a, PmSign::Minus);
    OpPtr pp = projector_pm(b, PmSign::Plus);

    const Eigen::Index r = v.rank();
    const Eigen::Index d = static_cast<Eigen::Index>(std::size_t{1} << s.region().length());
    Eigen::MatrixXcd xm(d, r), yp(d, r);
    for (Eigen::Index c = 0; c < r; ++c) {
        Vec col = v.column(c);
        xm.col(c) = pm->apply(col);
        yp.col(c) = pp->apply(col);
    }
    Eigen::VectorXd energies = v.energies();

    // group degenerate eigenvalues; each group carries one eigenprojection
    const double gap_tol = 1e-9 * std::max(1.0, energies.cwiseAbs().maxCoeff());
    double surrogate = 0.0;
    double witness_single = 0.0;
    Eigen::Index g_start = 0;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> groups;
    for (Eigen::Index i = 1; i <= r; ++i) {
        if (i == r || energies(i) - energies(i - 1) > gap_tol) {
            groups.emplace_back(g_start, i - g_start);
            g_start = i;
        }
    }
    for (auto [at, len] : groups) {
        const double nrm = tall_product_norm(xm.middleCols(at, len), yp.middleCols(at, len));
        surrogate += nrm;
        witness_single = std::max(witness_single, nrm);
    }
    const double witness_chi = tall_product_norm(xm, yp);  // f = chi_J
    out.surrogate = surrogate;
    out.witness = std::max(witness_single, witness_chi);
    return out;
}

CtCheckResult ct_check(const SpectralData& s_hat, HalfInt q, const SiteSet& a, const SiteSet& b,
                       Complex z, double delta0, const NormOptions& opts) {
    require_nested(a, b);
    if (!(delta0 > 9.0)) throw std::domain_error("ct_check: requires Delta0 > 9");
    const ModelParams& p = s_hat.terms().params();
    if (p.delta < delta0 - 1e-12) throw std::domain_error("ct_check: requires Delta >= Delta0");
    if (components(a).size() != 1)
        throw std::domain_error("ct_check: A must be connected in Lambda");
    const int k = q.ceil();
    if (!s_hat.terms().cluster_shift_k() || *s_hat.terms().cluster_shift_k() != k)
        throw std::domain_error("ct_check: spectral data is not Hhat_k for k = ceil(q)");
    EnergyIntervals iv(HalfInt(2 * k), p);
    if (z.real() > iv.icheck_top() + Interval::kGuard)
        throw std::domain_error("ct_check: Re z outside Icheck_{<= ceil(q)}");

    CtCheckResult out;
    out.dist = crossing_dist(a, b);
    out.m0 = std::log((delta0 - 1.0) / 8.0);
    out.bound = out.dist == kInfDist
                    ? 0.0
                    : (1.0 / delta0) * std::exp(-out.m0 * static_cast<double>(out.dist));
    OpPtr pm = projector_pm(a, PmSign::Minus);
    OpPtr pp = projector_pm(b, PmSign::Plus);
    OpPtr kop = product({pm, s_hat.resolvent_op(z), pp});
    out.measured = operator_norm(*kop, opts);
    out.pass = out.measured <= out.bound + 1e-10;
    return out;
}

double multi_probe_norm(const SpectralData& s, int k, const std::vector<SiteSet>& probes,
                        int ell) {
    if (k < 1) throw std::domain_error("multi_probe_norm: k must be >= 1");
    if (static_cast<int>(probes.size()) != k + 1)
        throw std::domain_error("multi_probe_norm: needs exactly k+1 probe sets");
    for (const auto& p : probes)
        if (p.empty_set()) throw std::domain_error("multi_probe_norm: probes must be nonempty");
    for (size_t i = 0; i < probes.size(); ++i)
        for (size_t l = i + 1; l < probes.size(); ++l)
            if (dist_sets(probes[i], probes[l]) < 2 * ell + 1)
                throw std::domain_error("multi_probe_norm: probe spacing below 2 ell + 1");

    EnergyIntervals iv(HalfInt(2 * k), s.terms().params());
    Isometry v = s.isometry(iv.i_le());
    if (v.rank() == 0) return 0.0;
    std::vector<OpPtr> factors;
    for (const auto& p : probes) factors.push_back(projector_pm(p, PmSign::Minus));
    OpPtr x = product(factors);
    // || P_I X || = sigma_max(V^dagger X) = sqrt(lambda_max(Gram(X^dagger V)))
    const Eigen::Index r = v.rank();
    Eigen::MatrixXcd w(static_cast<Eigen::Index>(std::size_t{1} << s.region().length()), r);
    for (Eigen::Index c = 0; c < r; ++c) w.col(c) = x->apply_adjoint(v.column(c));
    return std::sqrt(psd_lambda_max(w.adjoint() * w));
}

bool tail_probability_probe(const SpectralData& s, int k, int ell) {
    if (2 * ell + k < 0) throw std::domain_error("tail_probability_probe: 2 ell + k < 0");
    EnergyIntervals iv(HalfInt(2 * k), s.terms().params());
    const double top = iv.i_top();
    if (!s.complete() && s.window_hi() < top)
        throw std::runtime_error("tail_probability_probe: window does not cover I_{<=k}");
    const auto& sectors = s.sectors();
    for (size_t n = static_cast<size_t>(2 * ell + k + 1); n < sectors.size(); ++n) {
        const auto& sec = sectors[n];
        if (!sec.included) continue;  // certified above the window >= top
        for (Eigen::Index i = 0; i < sec.evals.size(); ++i)
            if (sec.evals(i) <= top + Interval::kGuard) return true;
    }
    return false;
}

}  // namespace xxz
