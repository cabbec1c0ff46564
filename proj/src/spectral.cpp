#include "xxz/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#ifdef XXZ_HAVE_LAPACKE
#include <lapacke.h>
#endif

namespace xxz {

namespace {

// Symmetric eigendecomposition, ascending eigenvalues, deterministic
// eigenvector signs (first component above 1e-12 made positive).
void sym_eigen(Eigen::MatrixXd m, Eigen::VectorXd& evals, Eigen::MatrixXd& evecs) {
    const Eigen::Index n = m.rows();
    evals.resize(n);
#ifdef XXZ_HAVE_LAPACKE
    lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n),
                                     m.data(), static_cast<lapack_int>(n), evals.data());
    if (info != 0)
        throw std::runtime_error("eigensolver failure (dsyevd info=" + std::to_string(info) +
                                 ")");
    evecs = std::move(m);
#else
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failure");
    evals = es.eigenvalues();
    evecs = es.eigenvectors();
#endif
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index r = 0; r < n; ++r) {
            const double x = evecs(r, c);
            if (std::abs(x) > 1e-12) {
                if (x < 0) evecs.col(c) = -evecs.col(c);
                break;
            }
        }
    }
}

}  // namespace

// --- Isometry ----------------------------------------------------------------

Isometry::Isometry(ChainRegion region, std::vector<Block> blocks)
    : region_(region), blocks_(std::move(blocks)), rank_(0) {
    for (const auto& b : blocks_) rank_ += b.cols.cols();
}

Eigen::VectorXd Isometry::energies() const {
    Eigen::VectorXd e(rank_);
    Eigen::Index at = 0;
    for (const auto& b : blocks_) {
        e.segment(at, b.evals.size()) = b.evals;
        at += b.evals.size();
    }
    return e;
}

Vec Isometry::column(Eigen::Index j) const {
    Vec out = Vec::Zero(Eigen::Index{1} << region_.length());
    for (const auto& b : blocks_) {
        if (j < b.cols.cols()) {
            for (Eigen::Index r = 0; r < b.cols.rows(); ++r)
                out[static_cast<Eigen::Index>(b.basis->states[static_cast<size_t>(r)])] =
                    b.cols(r, j);
            return out;
        }
        j -= b.cols.cols();
    }
    throw std::out_of_range("Isometry::column");
}

Vec Isometry::project(const Vec& x) const {
    Vec out(rank_);
    Eigen::Index at = 0;
    for (const auto& b : blocks_) {
        Vec xs(b.cols.rows());
        for (Eigen::Index r = 0; r < b.cols.rows(); ++r)
            xs[r] = x[static_cast<Eigen::Index>(b.basis->states[static_cast<size_t>(r)])];
        out.segment(at, b.cols.cols()) = b.cols.transpose().cast<Complex>() * xs;
        at += b.cols.cols();
    }
    return out;
}

Vec Isometry::assemble(const Vec& coeffs) const {
    Vec out = Vec::Zero(Eigen::Index{1} << region_.length());
    Eigen::Index at = 0;
    for (const auto& b : blocks_) {
        Vec xs = b.cols.cast<Complex>() * coeffs.segment(at, b.cols.cols());
        for (Eigen::Index r = 0; r < b.cols.rows(); ++r)
            out[static_cast<Eigen::Index>(b.basis->states[static_cast<size_t>(r)])] += xs[r];
        at += b.cols.cols();
    }
    return out;
}

Eigen::MatrixXcd Isometry::compress(const Operator& x) const {
    Eigen::MatrixXcd g(rank_, rank_);
    for (Eigen::Index j = 0; j < rank_; ++j) {
        Vec vj = column(j);
        Vec yj = x.apply(vj);
        g.col(j) = project(yj);
    }
    return g;
}

OpPtr Isometry::projection_op() const {
    const Eigen::Index d = Eigen::Index{1} << region_.length();
    Eigen::MatrixXcd v(d, rank_);
    for (Eigen::Index j = 0; j < rank_; ++j) v.col(j) = column(j);
    return std::make_shared<LowRankOp>(region_, SiteSet::full(region_), std::move(v),
                                       Eigen::MatrixXcd::Identity(rank_, rank_));
}

double matrix_norm(const Eigen::MatrixXcd& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0);
}

double compressed_norm(const Isometry& v, const Operator& x) {
    if (v.rank() == 0) return 0.0;
    return matrix_norm(v.compress(x));
}

// --- SpectralData ------------------------------------------------------------

struct SpectralData::Impl {
    HamiltonianTerms terms;
    std::vector<SectorEigen> sectors;
    double window_hi = std::numeric_limits<double>::infinity();
    bool complete = true;
    double norm_scale = 1.0;  // max |eigenvalue| over included sectors

    explicit Impl(HamiltonianTerms t) : terms(std::move(t)) {}
};

SpectralData SpectralData::diagonalize(const HamiltonianTerms& h) {
    return diagonalize_window(h, std::numeric_limits<double>::infinity());
}

SpectralData SpectralData::diagonalize_window(const HamiltonianTerms& h, double window_hi) {
    auto impl = std::make_shared<Impl>(h);
    impl->window_hi = window_hi;
    impl->complete = std::isinf(window_hi);
    const ChainRegion region = h.region();
    const int len = region.length();
    impl->sectors.resize(static_cast<size_t>(len) + 1);
    const double guard = 1e-9;
    for (int n = 0; n <= len; ++n) {
        SectorEigen& s = impl->sectors[static_cast<size_t>(n)];
        s.basis = sector_basis(region, n);
        if (!impl->complete) {
            const double lb = h.gershgorin_lower(n);
            if (lb > window_hi + guard) {
                s.included = false;
                s.certified_lower = lb;
                continue;
            }
        }
        Eigen::MatrixXd block = h.sector_matrix(n);
        sym_eigen(std::move(block), s.evals, s.evecs);
        s.included = true;
        if (s.evals.size() > 0)
            impl->norm_scale = std::max(
                {impl->norm_scale, std::abs(s.evals(0)), std::abs(s.evals(s.evals.size() - 1))});
    }
    SpectralData out;
    out.impl_ = std::move(impl);
    return out;
}

const ChainRegion& SpectralData::region() const { return impl_->terms.region(); }
bool SpectralData::complete() const { return impl_->complete; }
double SpectralData::window_hi() const { return impl_->window_hi; }
const std::vector<SectorEigen>& SpectralData::sectors() const { return impl_->sectors; }
const HamiltonianTerms& SpectralData::terms() const { return impl_->terms; }

double SpectralData::min_eigenvalue() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : impl_->sectors) {
        if (s.included && s.evals.size() > 0)
            m = std::min(m, s.evals(0));
        else if (!s.included)
            m = std::min(m, s.certified_lower);
    }
    return m;
}

double SpectralData::second_lowest() const {
    auto all = eigenvalues_sorted();
    if (all.size() < 2) throw std::runtime_error("second_lowest: fewer than two eigenvalues");
    return all[1];
}

std::vector<double> SpectralData::eigenvalues_sorted() const {
    if (!impl_->complete)
        throw std::runtime_error("eigenvalues_sorted: requires complete spectral data");
    std::vector<double> all;
    for (const auto& s : impl_->sectors)
        for (Eigen::Index i = 0; i < s.evals.size(); ++i) all.push_back(s.evals(i));
    std::sort(all.begin(), all.end());
    return all;
}

namespace {

void require_within_window(const SpectralData& s, const Interval& i) {
    if (!s.complete() && i.hi > s.window_hi() + Interval::kGuard)
        throw std::runtime_error(
            "spectral window too small for requested interval (certified hi = " +
            std::to_string(s.window_hi()) + ", requested hi = " + std::to_string(i.hi) + ")");
}

}  // namespace

Isometry SpectralData::isometry(const Interval& i) const {
    require_within_window(*this, i);
    std::vector<Isometry::Block> blocks;
    int n = 0;
    for (const auto& s : impl_->sectors) {
        if (s.included && s.evals.size() > 0) {
            std::vector<Eigen::Index> idx;
            for (Eigen::Index j = 0; j < s.evals.size(); ++j)
                if (i.contains(s.evals(j))) idx.push_back(j);
            if (!idx.empty()) {
                Isometry::Block b;
                b.n_particles = n;
                b.basis = s.basis;
                b.cols.resize(s.evecs.rows(), static_cast<Eigen::Index>(idx.size()));
                b.evals.resize(static_cast<Eigen::Index>(idx.size()));
                for (size_t k = 0; k < idx.size(); ++k) {
                    b.cols.col(static_cast<Eigen::Index>(k)) = s.evecs.col(idx[k]);
                    b.evals(static_cast<Eigen::Index>(k)) = s.evals(idx[k]);
                }
                blocks.push_back(std::move(b));
            }
        }
        ++n;
    }
    return Isometry(region(), std::move(blocks));
}

Eigen::Index SpectralData::rank_in(const Interval& i) const {
    require_within_window(*this, i);
    Eigen::Index r = 0;
    for (const auto& s : impl_->sectors)
        for (Eigen::Index j = 0; j < s.evals.size(); ++j)
            if (i.contains(s.evals(j))) ++r;
    return r;
}

// Lazy U f(D) U^T over the stored sectors (excluded sectors contribute 0 or,
// for functions that do not vanish there, are forbidden by construction).
class SpectralFunctionOp final : public Operator {
  public:
    SpectralFunctionOp(ChainRegion region, std::shared_ptr<const SpectralData::Impl>,
                       std::vector<Eigen::VectorXcd> fvals,
                       std::vector<std::shared_ptr<const SectorBasis>> bases,
                       std::vector<const Eigen::MatrixXd*> evecs)
        : Operator(region, SiteSet::full(region)),
          fvals_(std::move(fvals)),
          bases_(std::move(bases)),
          evecs_(std::move(evecs)) {}

    // note: evec pointers alias impl; keep impl alive
    void set_keepalive(std::shared_ptr<const void> k) { keepalive_ = std::move(k); }

    void apply_impl(const Vec& in, Vec& out, bool adj) const {
        out.setZero(in.size());
        for (size_t b = 0; b < bases_.size(); ++b) {
            const auto& basis = *bases_[b];
            const auto& u = *evecs_[b];
            if (u.cols() == 0) continue;
            Vec xs(u.rows());
            for (Eigen::Index r = 0; r < u.rows(); ++r)
                xs[r] = in[static_cast<Eigen::Index>(basis.states[static_cast<size_t>(r)])];
            Vec coeff = u.transpose().cast<Complex>() * xs;
            if (adj)
                coeff.array() *= fvals_[b].conjugate().array();
            else
                coeff.array() *= fvals_[b].array();
            Vec ys = u.cast<Complex>() * coeff;
            for (Eigen::Index r = 0; r < u.rows(); ++r)
                out[static_cast<Eigen::Index>(basis.states[static_cast<size_t>(r)])] = ys[r];
        }
    }

    void apply(const Vec& in, Vec& out) const override { apply_impl(in, out, false); }
    void apply_adjoint(const Vec& in, Vec& out) const override { apply_impl(in, out, true); }

  private:
    std::vector<Eigen::VectorXcd> fvals_;
    std::vector<std::shared_ptr<const SectorBasis>> bases_;
    std::vector<const Eigen::MatrixXd*> evecs_;
    std::shared_ptr<const void> keepalive_;
};

OpPtr SpectralData::function_op(const std::function<Complex(double)>& f,
                                bool vanishes_outside_window) const {
    if (!impl_->complete && !vanishes_outside_window)
        throw std::runtime_error(
            "function_op: windowed spectral data requires a window-supported function");
    std::vector<Eigen::VectorXcd> fvals;
    std::vector<std::shared_ptr<const SectorBasis>> bases;
    std::vector<const Eigen::MatrixXd*> evecs;
    for (const auto& s : impl_->sectors) {
        if (!s.included || s.evals.size() == 0) continue;
        Eigen::VectorXcd fv(s.evals.size());
        bool nonzero = false;
        for (Eigen::Index j = 0; j < s.evals.size(); ++j) {
            fv(j) = f(s.evals(j));
            if (!std::isfinite(fv(j).real()) || !std::isfinite(fv(j).imag()))
                throw std::runtime_error("function_op: non-finite value at eigenvalue " +
                                         std::to_string(s.evals(j)));
            if (fv(j) != Complex(0.0, 0.0)) nonzero = true;
        }
        if (!nonzero) continue;
        fvals.push_back(std::move(fv));
        bases.push_back(s.basis);
        evecs.push_back(&s.evecs);
    }
    auto op = std::make_shared<SpectralFunctionOp>(region(), impl_, std::move(fvals),
                                                   std::move(bases), std::move(evecs));
    op->set_keepalive(impl_);
    return op;
}

OpPtr SpectralData::projection(const Interval& i) const {
    require_within_window(*this, i);
    return function_op([i](double e) { return i.contains(e) ? 1.0 : 0.0; },
                       /*vanishes_outside_window=*/true);
}

OpPtr SpectralData::evolution(double t) const {
    if (!impl_->complete) throw std::runtime_error("evolution: requires complete spectral data");
    return function_op([t](double e) { return std::exp(Complex(0.0, t * e)); });
}

OpPtr SpectralData::heisenberg(OpPtr t_obs, double t) const {
    if (t == 0.0) return t_obs;
    return product({evolution(t), t_obs, evolution(-t)});
}

double SpectralData::dist_to_spectrum(Complex z) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& s : impl_->sectors) {
        if (!s.included)
            d = std::min(d, std::abs(Complex(s.certified_lower, 0.0) - z));  // conservative
        for (Eigen::Index j = 0; j < s.evals.size(); ++j)
            d = std::min(d, std::abs(Complex(s.evals(j), 0.0) - z));
    }
    return d;
}

Vec SpectralData::resolvent_apply(Complex z, const Vec& v) const {
    if (!impl_->complete)
        throw std::runtime_error("resolvent_apply: requires complete spectral data");
    if (dist_to_spectrum(z) < 1e-12 * std::max(1.0, impl_->norm_scale))
        throw SingularityError("resolvent_apply: z within 1e-12 of the spectrum");
    Vec out = Vec::Zero(v.size());
    for (const auto& s : impl_->sectors) {
        if (s.evals.size() == 0) continue;
        Vec xs(s.evecs.rows());
        for (Eigen::Index r = 0; r < s.evecs.rows(); ++r)
            xs[r] = v[static_cast<Eigen::Index>(s.basis->states[static_cast<size_t>(r)])];
        Vec coeff = s.evecs.transpose().cast<Complex>() * xs;
        for (Eigen::Index j = 0; j < coeff.size(); ++j) coeff[j] /= (s.evals(j) - z);
        Vec ys = s.evecs.cast<Complex>() * coeff;
        for (Eigen::Index r = 0; r < s.evecs.rows(); ++r)
            out[static_cast<Eigen::Index>(s.basis->states[static_cast<size_t>(r)])] = ys[r];
    }
    return out;
}

namespace {

class ResolventOp final : public Operator {
  public:
    ResolventOp(const SpectralData& s, Complex z)
        : Operator(s.region(), SiteSet::full(s.region())), s_(s), z_(z) {}
    void apply(const Vec& in, Vec& out) const override { out = s_.resolvent_apply(z_, in); }
    void apply_adjoint(const Vec& in, Vec& out) const override {
        out = s_.resolvent_apply(std::conj(z_), in);
    }

  private:
    SpectralData s_;
    Complex z_;
};

// Number-conserving operator stored as dense per-sector blocks.
class SectorBlockOp final : public Operator {
  public:
    SectorBlockOp(ChainRegion region, SiteSet support,
                  std::vector<std::shared_ptr<const SectorBasis>> bases,
                  std::vector<Eigen::MatrixXcd> blocks)
        : Operator(region, support), bases_(std::move(bases)), blocks_(std::move(blocks)) {}

    void apply_impl(const Vec& in, Vec& out, bool adj) const {
        out.setZero(in.size());
        for (size_t b = 0; b < bases_.size(); ++b) {
            const auto& basis = *bases_[b];
            const auto& m = blocks_[b];
            if (m.rows() == 0) continue;
            Vec xs(m.cols());
            for (Eigen::Index r = 0; r < m.cols(); ++r)
                xs[r] = in[static_cast<Eigen::Index>(basis.states[static_cast<size_t>(r)])];
            Vec ys = adj ? (m.adjoint() * xs).eval() : (m * xs).eval();
            for (Eigen::Index r = 0; r < m.rows(); ++r)
                out[static_cast<Eigen::Index>(basis.states[static_cast<size_t>(r)])] = ys[r];
        }
    }
    void apply(const Vec& in, Vec& out) const override { apply_impl(in, out, false); }
    void apply_adjoint(const Vec& in, Vec& out) const override { apply_impl(in, out, true); }

  private:
    std::vector<std::shared_ptr<const SectorBasis>> bases_;
    std::vector<Eigen::MatrixXcd> blocks_;
};

}  // namespace

OpPtr SpectralData::resolvent_op(Complex z) const {
    if (dist_to_spectrum(z) < 1e-12 * std::max(1.0, impl_->norm_scale))
        throw SingularityError("resolvent_op: z within 1e-12 of the spectrum");
    return std::make_shared<ResolventOp>(*this, z);
}

OpPtr SpectralData::duhamel_integral(const Operator& d, double t) const {
    if (!impl_->complete)
        throw std::runtime_error("duhamel_integral: requires complete spectral data");
    if (d.region() != region()) throw std::domain_error("duhamel_integral: region mismatch");
    const double gap_tol = 1e-9 * std::max(1.0, impl_->norm_scale);
    std::vector<std::shared_ptr<const SectorBasis>> bases;
    std::vector<Eigen::MatrixXcd> blocks;
    Vec e(static_cast<Eigen::Index>(d.dim())), y;
    for (const auto& s : impl_->sectors) {
        const Eigen::Index dim_n = static_cast<Eigen::Index>(s.basis->dim());
        // materialize the sector block of D
        Eigen::MatrixXcd dn(dim_n, dim_n);
        for (Eigen::Index col = 0; col < dim_n; ++col) {
            e.setZero();
            e[static_cast<Eigen::Index>(s.basis->states[static_cast<size_t>(col)])] = 1.0;
            d.apply(e, y);
            for (Eigen::Index row = 0; row < dim_n; ++row)
                dn(row, col) =
                    y[static_cast<Eigen::Index>(s.basis->states[static_cast<size_t>(row)])];
        }
        Eigen::MatrixXcd g = s.evecs.transpose().cast<Complex>() * dn * s.evecs.cast<Complex>();
        for (Eigen::Index a = 0; a < dim_n; ++a) {
            for (Eigen::Index b = 0; b < dim_n; ++b) {
                const double gap = s.evals(a) - s.evals(b);
                if (std::abs(gap) < gap_tol) {
                    g(a, b) *= t;
                } else {
                    const Complex igap(0.0, gap);
                    g(a, b) *= (std::exp(igap * t) - 1.0) / igap;
                }
            }
        }
        blocks.push_back(s.evecs.cast<Complex>() * g * s.evecs.transpose().cast<Complex>());
        bases.push_back(s.basis);
    }
    return std::make_shared<SectorBlockOp>(region(), SiteSet::full(region()), std::move(bases),
                                           std::move(blocks));
}

double SpectralData::reconstruction_error() const {
    double worst = 0.0;
    int n = 0;
    for (const auto& s : impl_->sectors) {
        if (s.included && s.evals.size() > 0) {
            Eigen::MatrixXd h = impl_->terms.sector_matrix(n);
            Eigen::MatrixXd r = s.evecs * s.evals.asDiagonal() * s.evecs.transpose() - h;
            worst = std::max(worst, r.cwiseAbs().maxCoeff());
        }
        ++n;
    }
    return worst;
}

}  // namespace xxz
