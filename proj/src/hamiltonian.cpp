#include "xxz/hamiltonian.hpp"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace xxz {

Eigen::MatrixXcd local_term(double delta) {
    if (!(delta > 1.0)) throw std::invalid_argument("local_term: delta must be > 1");
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(4, 4);
    h(3, 3) = -1.0;  // -N(x)N on |dd>
    h(1, 2) = h(2, 1) = -1.0 / (2.0 * delta);
    return h;
}

HamiltonianTerms::HamiltonianTerms(ChainRegion region, ModelParams params, DisorderSample omega,
                                   SiteSet active_sites, std::vector<int> bond_left_sites,
                                   std::optional<int> cluster_shift_k)
    : region_(region),
      params_(params),
      omega_(std::move(omega)),
      active_sites_(active_sites),
      bond_left_sites_(std::move(bond_left_sites)),
      cluster_shift_k_(cluster_shift_k) {
    if (omega_.region != region_)
        throw std::domain_error("HamiltonianTerms: disorder region mismatch");
    for (int i : bond_left_sites_)
        if (i < region_.lo || i + 1 > region_.hi)
            throw std::domain_error("HamiltonianTerms: bond outside region");
}

double HamiltonianTerms::cluster_shift(int w) const {
    if (!cluster_shift_k_) return 0.0;
    const int k = *cluster_shift_k_;
    const double u = params_.unit();
    if (k == 0) return w == 0 ? u : 0.0;
    if (w == 0) return (k + 1) * u;
    if (w <= k) return k * u;
    return 0.0;
}

double HamiltonianTerms::diag_value(std::uint64_t mask) const {
    double v = 0.0;
    for (std::uint64_t m = mask & active_sites_.mask; m != 0; m &= m - 1) {
        const int bit = __builtin_ctzll(m);
        v += 1.0 + params_.lambda * omega_.omega[static_cast<size_t>(bit)];
    }
    for (int i : bond_left_sites_) {
        const int bit = i - region_.lo;
        if (((mask >> bit) & 1u) && ((mask >> (bit + 1)) & 1u)) v -= 1.0;
    }
    if (cluster_shift_k_) v += cluster_shift(cluster_count_mask(mask));
    return v;
}

Eigen::MatrixXd HamiltonianTerms::sector_matrix(int n) const {
    auto basis = sector_basis(region_, n);
    const Eigen::Index d = static_cast<Eigen::Index>(basis->dim());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    const double hop = -1.0 / (2.0 * params_.delta);
    for (Eigen::Index col = 0; col < d; ++col) {
        const std::uint64_t mask = basis->states[static_cast<size_t>(col)];
        m(col, col) = diag_value(mask);
        for (int i : bond_left_sites_) {
            const int bit = i - region_.lo;
            const std::uint64_t pair = (std::uint64_t{3} << bit);
            const std::uint64_t occ = (mask >> bit) & 3u;
            if (occ == 1u || occ == 2u) {
                const std::uint64_t moved = mask ^ pair;
                const Eigen::Index row =
                    static_cast<Eigen::Index>(basis->index_of(moved));
                m(row, col) += hop;
            }
        }
    }
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12) {
        std::fprintf(stderr, "fatal: Hamiltonian sector block not symmetric (%.3e)\n", asym);
        std::abort();
    }
    return m;
}

double HamiltonianTerms::gershgorin_lower(int n) const {
    auto basis = sector_basis(region_, n);
    const double hop_abs = 1.0 / (2.0 * params_.delta);
    double lower = std::numeric_limits<double>::infinity();
    for (std::uint64_t mask : basis->states) {
        double radius = 0.0;
        for (int i : bond_left_sites_) {
            const std::uint64_t occ = (mask >> (i - region_.lo)) & 3u;
            if (occ == 1u || occ == 2u) radius += hop_abs;
        }
        lower = std::min(lower, diag_value(mask) - radius);
    }
    return lower;
}

// Matrix-free apply of a HamiltonianTerms instance over the full space.
class HamiltonianApplyOp final : public Operator {
  public:
    explicit HamiltonianApplyOp(HamiltonianTerms terms)
        : Operator(terms.region(), full_support(terms)), terms_(std::move(terms)) {
        const std::size_t d = dim();
        diag_.resize(d);
        for (std::uint64_t m = 0; m < d; ++m) diag_[m] = terms_.diag_value(m);
    }

    void apply(const Vec& in, Vec& out) const override {
        const double hop = -1.0 / (2.0 * terms_.params().delta);
        out.resize(in.size());
        for (Eigen::Index m = 0; m < in.size(); ++m)
            out[m] = diag_[static_cast<size_t>(m)] * in[m];
        for (int i : terms_.bonds()) {
            const int bit = i - region_.lo;
            const std::uint64_t pair = std::uint64_t{3} << bit;
            for (std::uint64_t m = 0; m < dim(); ++m) {
                const std::uint64_t occ = (m >> bit) & 3u;
                if (occ == 1u || occ == 2u)
                    out[static_cast<Eigen::Index>(m)] +=
                        hop * in[static_cast<Eigen::Index>(m ^ pair)];
            }
        }
    }

    void apply_adjoint(const Vec& in, Vec& out) const override { apply(in, out); }

  private:
    static SiteSet full_support(const HamiltonianTerms& t) {
        // sites touched by any term (cluster shift counts as global support)
        if (t.cluster_shift_k_) return SiteSet::full(t.region());
        SiteSet s(t.region(), 0);
        for (int i : t.bonds()) s.mask |= std::uint64_t{3} << (i - t.region().lo);
        return s.unite(t.active_sites_);
    }

    HamiltonianTerms terms_;
    std::vector<double> diag_;
};

OpPtr HamiltonianTerms::as_operator() const {
    return std::make_shared<HamiltonianApplyOp>(*this);
}

namespace {

std::vector<int> bonds_within(const ChainRegion& region, const ChainRegion& sub) {
    std::vector<int> bonds;
    for (int i = std::max(region.lo, sub.lo); i + 1 <= std::min(region.hi, sub.hi); ++i)
        bonds.push_back(i);
    return bonds;
}

}  // namespace

HamiltonianTerms build_hamiltonian(const ModelParams& params, const DisorderSample& omega,
                                   const ChainRegion& region) {
    if (region.length() < 2) throw std::domain_error("build_hamiltonian: region too small");
    return HamiltonianTerms(region, params, omega, SiteSet::full(region),
                            bonds_within(region, region));
}

HamiltonianTerms build_subchain_hamiltonian(const ModelParams& params,
                                            const DisorderSample& omega,
                                            const ChainRegion& sub) {
    return HamiltonianTerms(sub, params, omega.restrict_to(sub), SiteSet::full(sub),
                            bonds_within(sub, sub));
}

HamiltonianTerms build_modified(const ModelParams& params, const DisorderSample& omega,
                                const ChainRegion& region, int k) {
    if (k < 0) throw std::domain_error("build_modified: k must be >= 0");
    return HamiltonianTerms(region, params, omega, SiteSet::full(region),
                            bonds_within(region, region), k);
}

DecoupledPair decouple(const ModelParams& params, const DisorderSample& omega,
                       const ChainRegion& region, const ChainRegion& a) {
    if (!region.contains(a)) throw std::domain_error("decouple: A must be a subinterval");
    std::vector<int> inner_bonds;
    std::vector<int> crossing_bonds;
    for (int i = region.lo; i + 1 <= region.hi; ++i) {
        const bool left_in = a.contains(i);
        const bool right_in = a.contains(i + 1);
        if (left_in != right_in)
            crossing_bonds.push_back(i);
        else
            inner_bonds.push_back(i);
    }
    HamiltonianTerms h_dec(region, params, omega, SiteSet::full(region), inner_bonds);
    HamiltonianTerms gamma(region, params, omega, SiteSet::empty(region), crossing_bonds);
    return DecoupledPair{std::move(h_dec), std::move(gamma)};
}

OpPtr build_diagonal(DiagonalKind kind, const ChainRegion& region,
                     const DisorderSample* omega) {
    const std::size_t d = std::size_t{1} << region.length();
    std::vector<double> values(d);
    switch (kind) {
        case DiagonalKind::Number:
            for (std::uint64_t m = 0; m < d; ++m)
                values[m] = __builtin_popcountll(m);
            break;
        case DiagonalKind::Cluster:
            for (std::uint64_t m = 0; m < d; ++m) values[m] = cluster_count_mask(m);
            break;
        case DiagonalKind::Field: {
            if (omega == nullptr)
                throw std::invalid_argument("build_diagonal: field kind requires omega");
            if (omega->region != region)
                throw std::domain_error("build_diagonal: disorder region mismatch");
            for (std::uint64_t m = 0; m < d; ++m) {
                double v = 0.0;
                for (std::uint64_t b = m; b != 0; b &= b - 1)
                    v += omega->omega[static_cast<size_t>(__builtin_ctzll(b))];
                values[m] = v;
            }
            break;
        }
    }
    return std::make_shared<DiagonalOp>(region, SiteSet::full(region), std::move(values));
}

OpPtr projector_pm(const SiteSet& s, PmSign sign) {
    const ChainRegion region = s.region;
    const std::size_t d = std::size_t{1} << region.length();
    std::vector<double> values(d);
    for (std::uint64_t m = 0; m < d; ++m) {
        const bool touched = (m & s.mask) != 0;
        values[m] = (sign == PmSign::Plus) ? (touched ? 0.0 : 1.0) : (touched ? 1.0 : 0.0);
    }
    return std::make_shared<DiagonalOp>(region, s, std::move(values));
}

OpPtr cluster_projection(const ChainRegion& region, const std::vector<int>& cluster_values) {
    const std::size_t d = std::size_t{1} << region.length();
    std::vector<bool> member(static_cast<size_t>(region.length()) + 1, false);
    for (int w : cluster_values)
        if (w >= 0 && w <= region.length()) member[static_cast<size_t>(w)] = true;
    std::vector<double> values(d);
    for (std::uint64_t m = 0; m < d; ++m)
        values[m] = member[static_cast<size_t>(cluster_count_mask(m))] ? 1.0 : 0.0;
    return std::make_shared<DiagonalOp>(region, SiteSet::full(region), std::move(values));
}

OpPtr cluster_projection_le(const ChainRegion& region, int k) {
    std::vector<int> ws;
    for (int w = 1; w <= k; ++w) ws.push_back(w);
    return cluster_projection(region, ws);
}

OpPtr cluster_projection_hat_le(const ChainRegion& region, int k) {
    if (k < 1) throw std::domain_error("cluster_projection_hat_le: k must be >= 1");
    const std::size_t d = std::size_t{1} << region.length();
    std::vector<double> values(d);
    for (std::uint64_t m = 0; m < d; ++m) {
        const int w = cluster_count_mask(m);
        if (w == 0)
            values[m] = static_cast<double>(k + 1) / static_cast<double>(k);
        else if (w <= k)
            values[m] = 1.0;
        else
            values[m] = 0.0;
    }
    return std::make_shared<DiagonalOp>(region, SiteSet::full(region), std::move(values));
}

double diagonal_trace(const Operator& op) {
    const auto* diag = dynamic_cast<const DiagonalOp*>(&op);
    if (diag == nullptr) throw std::invalid_argument("diagonal_trace: not a diagonal operator");
    double t = 0.0;
    for (double v : diag->values()) t += v;
    return t;
}

}  // namespace xxz
