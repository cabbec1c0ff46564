#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "xxz/basis.hpp"
#include "xxz/geometry.hpp"

// Operators on the chain Hilbert space H_Lambda = (C^2)^{tensor |Lambda|}.
// States are dense vectors indexed by configuration bitmask. Operators are
// immutable and applied matrix-free; full 2^L x 2^L matrices are only ever
// materialized in tests at small L. Compositions (sums, products, embeddings
// of sub-chain operators) stay lazy, so products like M_t Y^L Y^R cost a few
// vector passes instead of dense algebra.

namespace xxz {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;

class Operator;
using OpPtr = std::shared_ptr<const Operator>;

class Operator {
  public:
    virtual ~Operator() = default;

    const ChainRegion& region() const { return region_; }
    std::size_t dim() const { return std::size_t{1} << region_.length(); }

    // Declared support: the operator acts as identity outside this set.
    const SiteSet& support() const { return support_; }

    virtual void apply(const Vec& in, Vec& out) const = 0;
    virtual void apply_adjoint(const Vec& in, Vec& out) const = 0;

    Vec apply(const Vec& in) const {
        Vec out(static_cast<Eigen::Index>(dim()));
        apply(in, out);
        return out;
    }
    Vec apply_adjoint(const Vec& in) const {
        Vec out(static_cast<Eigen::Index>(dim()));
        apply_adjoint(in, out);
        return out;
    }

  protected:
    Operator(ChainRegion region, SiteSet support) : region_(region), support_(support) {}
    ChainRegion region_;
    SiteSet support_;
};

// --- concrete kinds ---------------------------------------------------------

// Real diagonal in the canonical basis (number, cluster, field operators,
// occupancy projections, functions of any of these).
class DiagonalOp final : public Operator {
  public:
    DiagonalOp(ChainRegion region, SiteSet support, std::vector<double> values);
    void apply(const Vec& in, Vec& out) const override;
    void apply_adjoint(const Vec& in, Vec& out) const override;
    const std::vector<double>& values() const { return values_; }

  private:
    std::vector<double> values_;  // indexed by configuration mask
};

// Dense operator on the sites of X, acting as identity elsewhere. The dense
// index packs the occupancies of X's ascending sites with the lowest site as
// the most significant bit, i.e. two-site order (uu, ud, du, dd).
class LocalDenseOp final : public Operator {
  public:
    LocalDenseOp(ChainRegion region, std::vector<int> x_sites, Eigen::MatrixXcd mat);
    void apply(const Vec& in, Vec& out) const override;
    void apply_adjoint(const Vec& in, Vec& out) const override;
    const Eigen::MatrixXcd& matrix() const { return mat_; }
    const std::vector<int>& sites() const { return x_sites_; }

  private:
    void apply_impl(const Vec& in, Vec& out, bool adj) const;
    std::vector<int> x_sites_;  // ascending
    Eigen::MatrixXcd mat_;
};

// V * core * V^dagger with tall V; used for spectrally filtered observables.
class LowRankOp final : public Operator {
  public:
    LowRankOp(ChainRegion region, SiteSet support, Eigen::MatrixXcd v, Eigen::MatrixXcd core);
    void apply(const Vec& in, Vec& out) const override;
    void apply_adjoint(const Vec& in, Vec& out) const override;
    Eigen::Index rank() const { return v_.cols(); }

  private:
    Eigen::MatrixXcd v_;     // dim x r, orthonormal columns not required
    Eigen::MatrixXcd core_;  // r x r
};

class IdentityOp final : public Operator {
  public:
    explicit IdentityOp(ChainRegion region)
        : Operator(region, SiteSet::empty(region)) {}
    void apply(const Vec& in, Vec& out) const override { out = in; }
    void apply_adjoint(const Vec& in, Vec& out) const override { out = in; }
};

class ZeroOp final : public Operator {
  public:
    explicit ZeroOp(ChainRegion region) : Operator(region, SiteSet::empty(region)) {}
    void apply(const Vec& in, Vec& out) const override {
        out.setZero(in.size());
    }
    void apply_adjoint(const Vec& in, Vec& out) const override { out.setZero(in.size()); }
};

class ScaledOp final : public Operator {
  public:
    ScaledOp(Complex c, OpPtr op) : Operator(op->region(), op->support()), c_(c), op_(op) {}
    void apply(const Vec& in, Vec& out) const override {
        op_->apply(in, out);
        out *= c_;
    }
    void apply_adjoint(const Vec& in, Vec& out) const override {
        op_->apply_adjoint(in, out);
        out *= std::conj(c_);
    }

  private:
    Complex c_;
    OpPtr op_;
};

class SumOp final : public Operator {
  public:
    SumOp(ChainRegion region, std::vector<OpPtr> terms, std::vector<Complex> coeffs);
    void apply(const Vec& in, Vec& out) const override;
    void apply_adjoint(const Vec& in, Vec& out) const override;

  private:
    std::vector<OpPtr> terms_;
    std::vector<Complex> coeffs_;
};

// factors_[0] * factors_[1] * ... (applied right to left)
class ProductOp final : public Operator {
  public:
    ProductOp(ChainRegion region, std::vector<OpPtr> factors);
    void apply(const Vec& in, Vec& out) const override;
    void apply_adjoint(const Vec& in, Vec& out) const override;

  private:
    std::vector<OpPtr> factors_;
};

class AdjointOp final : public Operator {
  public:
    explicit AdjointOp(OpPtr op) : Operator(op->region(), op->support()), op_(op) {}
    void apply(const Vec& in, Vec& out) const override { op_->apply_adjoint(in, out); }
    void apply_adjoint(const Vec& in, Vec& out) const override { op_->apply(in, out); }

  private:
    OpPtr op_;
};

// Operator on a subinterval's Hilbert space acting as sub (x) identity on the
// parent chain. The subinterval's bits are contiguous in the parent mask.
class EmbedOp final : public Operator {
  public:
    EmbedOp(ChainRegion parent, OpPtr sub);
    void apply(const Vec& in, Vec& out) const override;
    void apply_adjoint(const Vec& in, Vec& out) const override;
    const OpPtr& sub() const { return sub_; }

  private:
    void apply_impl(const Vec& in, Vec& out, bool adj) const;
    OpPtr sub_;
};

// --- constructors & helpers -------------------------------------------------

OpPtr identity(ChainRegion region);
OpPtr zero_op(ChainRegion region);
OpPtr scaled(Complex c, OpPtr op);
OpPtr sum(std::vector<OpPtr> terms, std::vector<Complex> coeffs = {});
OpPtr product(std::vector<OpPtr> factors);
OpPtr adjoint(OpPtr op);
OpPtr embed(ChainRegion parent, OpPtr sub_op);

// i[A, B], lazy.
OpPtr commutator_i(OpPtr a, OpPtr b);

// T_local (dense on H_X, ascending-site tensor order) acting as T (x) I.
OpPtr embed_local(const Eigen::MatrixXcd& t_local, const std::vector<int>& x_sites,
                  ChainRegion region);
OpPtr embed_local(const Eigen::MatrixXcd& t_local, ChainRegion x, ChainRegion region);

// Restriction of an operator with supp(op) inside `sub` to a dense matrix on
// H_sub (matrix elements taken against the vacuum on the complement).
Eigen::MatrixXcd restrict_to_subchain(const Operator& op, ChainRegion sub);

// Full dense matrix; test-scale only.
Eigen::MatrixXcd materialize_dense(const Operator& op);

// Largest singular value by power iteration on X^dagger X with deterministic
// seeded restarts. tol is relative on the squared singular value.
struct NormOptions {
    double tol = 1e-8;
    int max_iter = 5000;
    int restarts = 3;
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;
};
double operator_norm(const Operator& op, const NormOptions& opts = {});

// || (A - B) v || / ||v|| maximized over a few seeded random vectors; cheap
// sanity check that two lazy operators agree.
double max_apply_difference(const Operator& a, const Operator& b, int n_vectors = 4,
                            std::uint64_t seed = 12345);

// Deterministic pseudo-random complex vector (splitmix64-based, unit norm).
Vec random_unit_vector(std::size_t dim, std::uint64_t seed);

}  // namespace xxz
