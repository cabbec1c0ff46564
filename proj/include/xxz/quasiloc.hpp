#pragma once

#include <string>

#include "xxz/spectral.hpp"

// Per-sample quasi-locality statistics: resolvent crossing norms, the
// eigencorrelator surrogate/witness bracket, the deterministic Combes-Thomas
// check for the modified Hamiltonian, the multi-probe low-energy norm, and
// the large-deviation tail probe.

namespace xxz {

// One disorder sample's statistic. CSV schema:
// seed, L, delta, lambda, k_or_q, ell, dist, statistic, value
struct MeasurementRecord {
    std::uint64_t seed = 0;
    int chain_length = 0;
    double delta = 0.0;
    double lambda = 0.0;
    double k_or_q = 0.0;
    int ell = 0;
    int dist = 0;  // kInfDist when the empty-set convention applies
    std::string statistic;
    double value = 0.0;

    std::string csv_row() const;
    static std::string csv_header();
};

struct CrossingNorm {
    double value = 0.0;     // ||P_-^A R_z P_+^B||^power
    double raw_norm = 0.0;  // before the fractional power
    int dist = 0;           // dist_Lambda(A, B^c), kInfDist if B = Lambda
};

// Theorem-2.4(1)-type statistic. The fractional power is applied per sample,
// before any ensemble averaging. Requires A subset of B.
CrossingNorm resolvent_crossing_norm(const SpectralData& s, const SiteSet& a, const SiteSet& b,
                                     Complex z, double power = 0.25,
                                     const NormOptions& opts = {});

struct EigencorrelatorResult {
    double surrogate = 0.0;  // sum over in-window eigenprojections (upper bound)
    double witness = 0.0;    // best explicit f in {chi_J, single-E indicators} (lower bound)
    int dist = 0;
};

// Bracket for sup_{f in B_1(J)} ||P_-^A f(H) P_+^B||. The sup itself is not
// computable; surrogate >= sup >= witness.
EigencorrelatorResult eigencorrelator(const SpectralData& s, const SiteSet& a, const SiteSet& b,
                                      const Interval& j);

struct CtCheckResult {
    double bound = 0.0;
    double measured = 0.0;
    int dist = 0;
    double m0 = 0.0;
    bool pass = false;
};

// Deterministic quasi-locality of the modified resolvent:
// ||P_-^A Rhat_{q,z} P_+^B|| <= (1/Delta0) exp(-m0 dist(A, B^c)),
// m0 = ln((Delta0 - 1)/8); must hold for every sample. s_hat must be the
// spectral data of Hhat_{ceil(q)} and Re z must lie in Icheck_{<= ceil(q)}.
CtCheckResult ct_check(const SpectralData& s_hat, HalfInt q, const SiteSet& a, const SiteSet& b,
                       Complex z, double delta0, const NormOptions& opts = {});

// || P_{I_{<=k}} prod_i P_-^{S_i} || for k+1 nonempty probes with pairwise
// distance >= 2 ell + 1; exact via the compressed Gram matrix.
double multi_probe_norm(const SpectralData& s, int k, const std::vector<SiteSet>& probes,
                        int ell);

// True iff H restricted to sectors with N > 2 ell + k has spectrum
// intersecting I_{<=k}. Accepts window-certified data whose window covers
// (k + 3/4) u.
bool tail_probability_probe(const SpectralData& s, int k, int ell);

}  // namespace xxz
