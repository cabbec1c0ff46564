#include "xxz/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace xxz {

namespace {

SiteSet union_support(ChainRegion region, const std::vector<OpPtr>& ops) {
    SiteSet s = SiteSet::empty(region);
    for (const auto& op : ops) {
        if (op->region() != region)
            throw std::domain_error("operator composition: region mismatch");
        s = s.unite(op->support());
    }
    return s;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline double unit_double(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

// --- DiagonalOp --------------------------------------------------------------

DiagonalOp::DiagonalOp(ChainRegion region, SiteSet support, std::vector<double> values)
    : Operator(region, support), values_(std::move(values)) {
    if (values_.size() != dim()) throw std::invalid_argument("DiagonalOp: wrong size");
}

void DiagonalOp::apply(const Vec& in, Vec& out) const {
    out.resize(in.size());
    for (Eigen::Index i = 0; i < in.size(); ++i)
        out[i] = values_[static_cast<size_t>(i)] * in[i];
}

void DiagonalOp::apply_adjoint(const Vec& in, Vec& out) const { apply(in, out); }

// --- LocalDenseOp ------------------------------------------------------------

LocalDenseOp::LocalDenseOp(ChainRegion region, std::vector<int> x_sites, Eigen::MatrixXcd mat)
    : Operator(region, SiteSet::from_sites(region, x_sites)),
      x_sites_(std::move(x_sites)),
      mat_(std::move(mat)) {
    if (!std::is_sorted(x_sites_.begin(), x_sites_.end()))
        throw std::invalid_argument("LocalDenseOp: sites must be ascending");
    const Eigen::Index d = Eigen::Index{1} << x_sites_.size();
    if (mat_.rows() != d || mat_.cols() != d)
        throw std::invalid_argument("LocalDenseOp: dimension mismatch with support");
}

void LocalDenseOp::apply_impl(const Vec& in, Vec& out, bool adj) const {
    const int m = static_cast<int>(x_sites_.size());
    const std::uint64_t local_dim = std::uint64_t{1} << m;
    out.setZero(in.size());
    // enumerate configurations grouped by their X-bits
    for (std::uint64_t g = 0; g < dim(); ++g) {
        const std::uint64_t row = local_index(g, x_sites_, region_);
        Complex acc = 0.0;
        for (std::uint64_t col = 0; col < local_dim; ++col) {
            const Complex t = adj ? std::conj(mat_(static_cast<Eigen::Index>(col),
                                                   static_cast<Eigen::Index>(row)))
                                  : mat_(static_cast<Eigen::Index>(row),
                                         static_cast<Eigen::Index>(col));
            if (t == Complex(0.0, 0.0)) continue;
            const std::uint64_t src = set_local_bits(g, col, x_sites_, region_);
            acc += t * in[static_cast<Eigen::Index>(src)];
        }
        out[static_cast<Eigen::Index>(g)] = acc;
    }
}

void LocalDenseOp::apply(const Vec& in, Vec& out) const { apply_impl(in, out, false); }
void LocalDenseOp::apply_adjoint(const Vec& in, Vec& out) const { apply_impl(in, out, true); }

// --- LowRankOp ---------------------------------------------------------------

LowRankOp::LowRankOp(ChainRegion region, SiteSet support, Eigen::MatrixXcd v,
                     Eigen::MatrixXcd core)
    : Operator(region, support), v_(std::move(v)), core_(std::move(core)) {
    if (v_.rows() != static_cast<Eigen::Index>(dim()) || v_.cols() != core_.rows() ||
        core_.rows() != core_.cols())
        throw std::invalid_argument("LowRankOp: shape mismatch");
}

void LowRankOp::apply(const Vec& in, Vec& out) const {
    out = v_ * (core_ * (v_.adjoint() * in));
}

void LowRankOp::apply_adjoint(const Vec& in, Vec& out) const {
    out = v_ * (core_.adjoint() * (v_.adjoint() * in));
}

// --- SumOp -------------------------------------------------------------------

SumOp::SumOp(ChainRegion region, std::vector<OpPtr> terms, std::vector<Complex> coeffs)
    : Operator(region, union_support(region, terms)),
      terms_(std::move(terms)),
      coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.assign(terms_.size(), Complex(1.0, 0.0));
    if (coeffs_.size() != terms_.size())
        throw std::invalid_argument("SumOp: coefficient count mismatch");
}

void SumOp::apply(const Vec& in, Vec& out) const {
    out.setZero(in.size());
    Vec tmp;
    for (size_t k = 0; k < terms_.size(); ++k) {
        terms_[k]->apply(in, tmp);
        out += coeffs_[k] * tmp;
    }
}

void SumOp::apply_adjoint(const Vec& in, Vec& out) const {
    out.setZero(in.size());
    Vec tmp;
    for (size_t k = 0; k < terms_.size(); ++k) {
        terms_[k]->apply_adjoint(in, tmp);
        out += std::conj(coeffs_[k]) * tmp;
    }
}

// --- ProductOp ---------------------------------------------------------------

ProductOp::ProductOp(ChainRegion region, std::vector<OpPtr> factors)
    : Operator(region, union_support(region, factors)), factors_(std::move(factors)) {
    if (factors_.empty()) throw std::invalid_argument("ProductOp: empty");
}

void ProductOp::apply(const Vec& in, Vec& out) const {
    Vec cur = in;
    Vec tmp;
    for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
        (*it)->apply(cur, tmp);
        cur.swap(tmp);
    }
    out = std::move(cur);
}

void ProductOp::apply_adjoint(const Vec& in, Vec& out) const {
    Vec cur = in;
    Vec tmp;
    for (const auto& f : factors_) {
        f->apply_adjoint(cur, tmp);
        cur.swap(tmp);
    }
    out = std::move(cur);
}

// --- EmbedOp -----------------------------------------------------------------

EmbedOp::EmbedOp(ChainRegion parent, OpPtr sub)
    : Operator(parent, SiteSet::interval(parent, sub->region()).intersect(
                           SiteSet(parent, sub->support().mask
                                               << (sub->region().lo - parent.lo)))),
      sub_(sub) {
    if (!parent.contains(sub_->region()))
        throw std::domain_error("EmbedOp: sub region not inside parent");
}

void EmbedOp::apply_impl(const Vec& in, Vec& out, bool adj) const {
    const int ls = sub_->region().length();
    const int off = sub_->region().lo - region_.lo;
    const int lp = region_.length();
    const int rest_len = lp - ls;
    const std::uint64_t sub_dim = std::uint64_t{1} << ls;
    const std::uint64_t low_mask = (std::uint64_t{1} << off) - 1;
    out.resize(in.size());
    Vec sub_in(static_cast<Eigen::Index>(sub_dim)), sub_out;
    for (std::uint64_t rest = 0; rest < (std::uint64_t{1} << rest_len); ++rest) {
        const std::uint64_t base =
            (rest & low_mask) | ((rest >> off) << (off + ls));
        for (std::uint64_t s = 0; s < sub_dim; ++s)
            sub_in[static_cast<Eigen::Index>(s)] =
                in[static_cast<Eigen::Index>(base | (s << off))];
        if (adj)
            sub_->apply_adjoint(sub_in, sub_out);
        else
            sub_->apply(sub_in, sub_out);
        for (std::uint64_t s = 0; s < sub_dim; ++s)
            out[static_cast<Eigen::Index>(base | (s << off))] =
                sub_out[static_cast<Eigen::Index>(s)];
    }
}

void EmbedOp::apply(const Vec& in, Vec& out) const { apply_impl(in, out, false); }
void EmbedOp::apply_adjoint(const Vec& in, Vec& out) const { apply_impl(in, out, true); }

// --- helpers -----------------------------------------------------------------

OpPtr identity(ChainRegion region) { return std::make_shared<IdentityOp>(region); }
OpPtr zero_op(ChainRegion region) { return std::make_shared<ZeroOp>(region); }

OpPtr scaled(Complex c, OpPtr op) { return std::make_shared<ScaledOp>(c, op); }

OpPtr sum(std::vector<OpPtr> terms, std::vector<Complex> coeffs) {
    if (terms.empty()) throw std::invalid_argument("sum: empty");
    ChainRegion region = terms.front()->region();
    return std::make_shared<SumOp>(region, std::move(terms), std::move(coeffs));
}

OpPtr product(std::vector<OpPtr> factors) {
    if (factors.empty()) throw std::invalid_argument("product: empty");
    ChainRegion region = factors.front()->region();
    return std::make_shared<ProductOp>(region, std::move(factors));
}

OpPtr adjoint(OpPtr op) { return std::make_shared<AdjointOp>(op); }

OpPtr embed(ChainRegion parent, OpPtr sub_op) {
    if (sub_op->region() == parent) return sub_op;
    return std::make_shared<EmbedOp>(parent, sub_op);
}

OpPtr commutator_i(OpPtr a, OpPtr b) {
    OpPtr ab = product({a, b});
    OpPtr ba = product({b, a});
    return sum({ab, ba}, {Complex(0.0, 1.0), Complex(0.0, -1.0)});
}

OpPtr embed_local(const Eigen::MatrixXcd& t_local, const std::vector<int>& x_sites,
                  ChainRegion region) {
    return std::make_shared<LocalDenseOp>(region, x_sites, t_local);
}

OpPtr embed_local(const Eigen::MatrixXcd& t_local, ChainRegion x, ChainRegion region) {
    std::vector<int> sites;
    for (int i = x.lo; i <= x.hi; ++i) sites.push_back(i);
    return embed_local(t_local, sites, region);
}

Eigen::MatrixXcd restrict_to_subchain(const Operator& op, ChainRegion sub) {
    const ChainRegion parent = op.region();
    if (!parent.contains(sub)) throw std::domain_error("restrict_to_subchain: bad subregion");
    // matrix elements against the vacuum on the complement; valid because the
    // caller guarantees supp(op) is contained in sub
    const int off = sub.lo - parent.lo;
    const std::uint64_t sub_dim = std::uint64_t{1} << sub.length();
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(sub_dim), static_cast<Eigen::Index>(sub_dim));
    Vec e(static_cast<Eigen::Index>(op.dim()));
    Vec y;
    for (std::uint64_t col = 0; col < sub_dim; ++col) {
        e.setZero();
        e[static_cast<Eigen::Index>(col << off)] = 1.0;
        op.apply(e, y);
        for (std::uint64_t row = 0; row < sub_dim; ++row)
            m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
                y[static_cast<Eigen::Index>(row << off)];
    }
    return m;
}

Eigen::MatrixXcd materialize_dense(const Operator& op) {
    const std::size_t d = op.dim();
    if (d > (std::size_t{1} << 14))
        throw std::domain_error("materialize_dense: region too large");
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    Vec e(static_cast<Eigen::Index>(d)), y;
    for (std::size_t col = 0; col < d; ++col) {
        e.setZero();
        e[static_cast<Eigen::Index>(col)] = 1.0;
        op.apply(e, y);
        m.col(static_cast<Eigen::Index>(col)) = y;
    }
    return m;
}

Vec random_unit_vector(std::size_t dim, std::uint64_t seed) {
    std::uint64_t state = seed;
    Vec v(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        const double re = 2.0 * unit_double(splitmix64(state)) - 1.0;
        const double im = 2.0 * unit_double(splitmix64(state)) - 1.0;
        v[static_cast<Eigen::Index>(i)] = Complex(re, im);
    }
    const double n = v.norm();
    if (n > 0) v /= n;
    return v;
}

double operator_norm(const Operator& op, const NormOptions& opts) {
    const std::size_t d = op.dim();
    double best = 0.0;
    Vec v, w, u;
    for (int r = 0; r < opts.restarts; ++r) {
        v = random_unit_vector(d, opts.seed + static_cast<std::uint64_t>(r) * 0x51ull);
        double lambda = 0.0;
        for (int it = 0; it < opts.max_iter; ++it) {
            op.apply(v, w);
            op.apply_adjoint(w, u);
            const double nl = u.norm();
            if (nl < 1e-300) {
                lambda = 0.0;
                break;
            }
            v = u / nl;
            if (std::abs(nl - lambda) <= opts.tol * std::max(1.0, nl)) {
                lambda = nl;
                break;
            }
            lambda = nl;
        }
        best = std::max(best, std::sqrt(lambda));
    }
    return best;
}

double max_apply_difference(const Operator& a, const Operator& b, int n_vectors,
                            std::uint64_t seed) {
    if (a.region() != b.region())
        throw std::domain_error("max_apply_difference: region mismatch");
    double worst = 0.0;
    Vec ya, yb;
    for (int k = 0; k < n_vectors; ++k) {
        Vec v = random_unit_vector(a.dim(), seed + static_cast<std::uint64_t>(k) * 977ull);
        a.apply(v, ya);
        b.apply(v, yb);
        worst = std::max(worst, (ya - yb).norm());
    }
    return worst;
}

}  // namespace xxz
