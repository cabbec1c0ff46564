#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "xxz/model.hpp"
#include "xxz/operators.hpp"

// Assembly of the model operators: local bond terms h_{i,i+1}, the chain
// Hamiltonian H = sum h + N + lambda V_omega, diagonal operators (number,
// cluster, field), occupancy projections P_pm^S, cluster projections
// chi_B(W), the modified Hamiltonians H_k = H + k u Qhat_{<=k}, and the
// decoupling H = H^{A,A^c} + Gamma^A.
//
// Everything number-conserving is handled through HamiltonianTerms, which
// serves both as a matrix-free full-space operator and as a per-sector dense
// matrix source for diagonalization.

namespace xxz {

// h = -N (x) N - (1/(2 Delta)) (s+ (x) s- + s- (x) s+) on two sites,
// tensor order (uu, ud, du, dd). ||h|| = 1 for Delta > 1/2.
Eigen::MatrixXcd local_term(double delta);

// A number-conserving real-symmetric Hamiltonian-shaped operator: single-site
// terms (1 + lambda omega_i) N_i over an active site set, bond terms h over an
// active bond list, and an optional diagonal shift k*u*Qhat_{<=k} by cluster
// count. Provides a matrix-free apply, per-sector dense blocks, and certified
// Gershgorin sector lower bounds.
class HamiltonianTerms {
  public:
    HamiltonianTerms(ChainRegion region, ModelParams params, DisorderSample omega,
                     SiteSet active_sites, std::vector<int> bond_left_sites,
                     std::optional<int> cluster_shift_k = std::nullopt);

    const ChainRegion& region() const { return region_; }
    const ModelParams& params() const { return params_; }
    const DisorderSample& disorder() const { return omega_; }
    const std::vector<int>& bonds() const { return bond_left_sites_; }
    std::optional<int> cluster_shift_k() const { return cluster_shift_k_; }

    double diag_value(std::uint64_t mask) const;

    // Dense block in the N-particle sector basis (sorted by mask). Symmetry is
    // asserted to 1e-12 at build; a violation aborts the run.
    Eigen::MatrixXd sector_matrix(int n) const;

    // Certified lower bound on the sector-N spectrum (Gershgorin row bound).
    double gershgorin_lower(int n) const;

    // Matrix-free full-space operator.
    OpPtr as_operator() const;

  private:
    ChainRegion region_;
    ModelParams params_;
    DisorderSample omega_;
    SiteSet active_sites_;
    std::vector<int> bond_left_sites_;  // bond {i, i+1} stored as i, ascending
    std::optional<int> cluster_shift_k_;

    friend class HamiltonianApplyOp;
    double cluster_shift(int w) const;
};

// H^Lambda = sum_{bonds in Lambda} h + N^Lambda + lambda V_omega^Lambda.
HamiltonianTerms build_hamiltonian(const ModelParams& params, const DisorderSample& omega,
                                   const ChainRegion& region);

// H^A on its own subinterval (restricting the same disorder realization).
HamiltonianTerms build_subchain_hamiltonian(const ModelParams& params,
                                            const DisorderSample& omega, const ChainRegion& sub);

// Hhat_k = H + k (1 - 1/Delta) Qhat_{<=k}  (Hhat_0 = H + (1 - 1/Delta) Q_0).
HamiltonianTerms build_modified(const ModelParams& params, const DisorderSample& omega,
                                const ChainRegion& region, int k);

// H^{A,A^c} = H^A + H^{A^c} and Gamma^A = H - H^{A,A^c} (the <= 2 crossing
// bonds). A must be a subinterval of the region.
struct DecoupledPair {
    HamiltonianTerms h_decoupled;
    HamiltonianTerms gamma;
};
DecoupledPair decouple(const ModelParams& params, const DisorderSample& omega,
                       const ChainRegion& region, const ChainRegion& a);

enum class DiagonalKind { Number, Cluster, Field };

// N^Lambda, W^Lambda, or V_omega^Lambda as a diagonal operator.
OpPtr build_diagonal(DiagonalKind kind, const ChainRegion& region,
                     const DisorderSample* omega = nullptr);

enum class PmSign { Plus, Minus };

// P_+^S: no particles anywhere in S; P_-^S = I - P_+^S. Empty-set conventions
// P_+^empty = I and P_-^empty = 0 flow through the diagonal values.
OpPtr projector_pm(const SiteSet& s, PmSign sign);

// chi_B(W) for B given as a membership predicate over cluster counts.
OpPtr cluster_projection(const ChainRegion& region, const std::vector<int>& cluster_values);
// Q_{<=k} = chi_{[1,k]}(W).
OpPtr cluster_projection_le(const ChainRegion& region, int k);
// Qhat_{<=k} = Q_{<=k} + ((k+1)/k) Q_0.
OpPtr cluster_projection_hat_le(const ChainRegion& region, int k);

// trace of a diagonal operator (sum of its canonical-basis values)
double diagonal_trace(const Operator& op);

}  // namespace xxz
