#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "xxz/hamiltonian.hpp"
#include "xxz/model.hpp"
#include "xxz/operators.hpp"

// Per-sector eigendecomposition of a number-conserving Hamiltonian and the
// calculus built on it: spectral projections, functions of H, resolvents,
// Heisenberg evolution, and closed-form Duhamel integrals.
//
// Besides the complete decomposition, a window-certified variant diagonalizes
// only sectors whose Gershgorin lower bound reaches into (-inf, hi]; excluded
// sectors are certified to carry no spectrum there. Windowed data supports
// exactly the operations that only look below the window top (projections,
// isometries, filtered evolutions); everything else requires complete data.

namespace xxz {

struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SectorEigen {
    std::shared_ptr<const SectorBasis> basis;
    Eigen::VectorXd evals;  // ascending; empty if excluded
    Eigen::MatrixXd evecs;  // orthonormal columns, sign-normalized
    bool included = true;
    double certified_lower = -std::numeric_limits<double>::infinity();
};

// Columns of in-window eigenvectors, stored per sector, plus their energies.
class Isometry {
  public:
    struct Block {
        int n_particles;
        std::shared_ptr<const SectorBasis> basis;
        Eigen::MatrixXd cols;   // sector_dim x r_n
        Eigen::VectorXd evals;  // r_n
    };

    Isometry(ChainRegion region, std::vector<Block> blocks);

    const ChainRegion& region() const { return region_; }
    Eigen::Index rank() const { return rank_; }
    const std::vector<Block>& blocks() const { return blocks_; }

    // Concatenated eigenvalues in block order (the column order used below).
    Eigen::VectorXd energies() const;

    Vec column(Eigen::Index j) const;           // full-space j-th column of V
    Vec project(const Vec& x) const;            // V^dagger x  (rank-sized)
    Vec assemble(const Vec& coeffs) const;      // V c        (full-space)
    Eigen::MatrixXcd compress(const Operator& x) const;  // V^dagger X V

    // V V^dagger as an operator.
    OpPtr projection_op() const;

  private:
    ChainRegion region_;
    std::vector<Block> blocks_;
    Eigen::Index rank_;
};

// ||P X P|| = largest singular value of V^dagger X V (exact at rank size).
double compressed_norm(const Isometry& v, const Operator& x);
double matrix_norm(const Eigen::MatrixXcd& m);

class SpectralData {
  public:
    // Full per-sector eigensystem.
    static SpectralData diagonalize(const HamiltonianTerms& h);

    // Eigensystem certified complete on (-inf, window_hi]; sectors whose
    // Gershgorin bound exceeds the window are skipped.
    static SpectralData diagonalize_window(const HamiltonianTerms& h, double window_hi);

    const ChainRegion& region() const;
    bool complete() const;
    double window_hi() const;
    const std::vector<SectorEigen>& sectors() const;
    const HamiltonianTerms& terms() const;

    double min_eigenvalue() const;
    // Smallest eigenvalue above the ground state (complete data only).
    double second_lowest() const;
    std::vector<double> eigenvalues_sorted() const;

    // chi_I(H) and the isometry onto its range. I must lie inside the
    // certified window.
    Isometry isometry(const Interval& i) const;
    OpPtr projection(const Interval& i) const;
    Eigen::Index rank_in(const Interval& i) const;

    // f(H) = sum f(E) pi_E. Requires complete data unless the caller asserts
    // that f vanishes above the certified window.
    OpPtr function_op(const std::function<Complex(double)>& f,
                      bool vanishes_outside_window = false) const;

    OpPtr evolution(double t) const;              // e^{itH}, complete only
    OpPtr heisenberg(OpPtr t_obs, double t) const;  // e^{itH} T e^{-itH}, lazy

    // (H - z)^{-1} v; throws SingularityError within 1e-12 of the spectrum.
    Vec resolvent_apply(Complex z, const Vec& v) const;
    OpPtr resolvent_op(Complex z) const;  // lazy wrapper around resolvent_apply
    double dist_to_spectrum(Complex z) const;

    // int_0^t tau_s(D) ds in closed form via the eigenbasis, materialized
    // per sector. D must be number-conserving; gaps below
    // 1e-9 * max(1, ||H||_est) use the degenerate limit t * D_mn.
    OpPtr duhamel_integral(const Operator& d, double t) const;

    // max per-sector reconstruction error ||H_N - U D U^T||_inf (test hook).
    double reconstruction_error() const;

  private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

}  // namespace xxz
