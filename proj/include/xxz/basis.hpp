#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "xxz/geometry.hpp"

// Canonical basis machinery. A configuration is a bitmask over the region's
// sites: bit i-lo set <=> spin-down (= particle) at site i, so popcount gives
// the total number operator eigenvalue directly. Sector bases enumerate the
// N-particle subspace sorted by increasing bitmask value.

namespace xxz {

struct DisorderSample;  // model.hpp

struct Configuration {
    ChainRegion region;
    std::uint64_t occ = 0;

    Configuration() = default;
    Configuration(ChainRegion r, std::uint64_t o) : region(r), occ(o) {}

    int particle_count() const { return __builtin_popcountll(occ); }
    SiteSet occupied() const { return SiteSet(region, occ); }

    // Occupancy string like "..vv.v.." for debugging (v = spin-down).
    std::string str() const {
        std::string s(static_cast<size_t>(region.length()), '.');
        for (int k = 0; k < region.length(); ++k)
            if ((occ >> k) & 1u) s[static_cast<size_t>(k)] = 'v';
        return s;
    }
};

// Number of maximal runs of set bits (clusters W_A).
int cluster_count(const Configuration& c);
int cluster_count_mask(std::uint64_t occ);

// Sum of the field over occupied sites: omega_A = sum_{i in A} omega_i.
double field_sum(const Configuration& c, const DisorderSample& omega);

// Enumeration of the N-particle sector, sorted by bitmask value.
struct SectorBasis {
    ChainRegion region;
    int n_particles = 0;
    std::vector<std::uint64_t> states;  // strictly increasing

    std::size_t dim() const { return states.size(); }

    // Ordinal of a mask within the sector; throws if absent.
    std::size_t index_of(std::uint64_t mask) const;
    bool contains_mask(std::uint64_t mask) const;
};

// Builds (or fetches from a shared read-only cache keyed by (length, N))
// the N-particle sector basis. Thread-safe.
std::shared_ptr<const SectorBasis> sector_basis(const ChainRegion& region, int n);

// binomial(n, k) in 64-bit arithmetic; exact for the desk-scale sizes used here.
std::uint64_t binomial(int n, int k);

// --- local tensor indexing -------------------------------------------------
//
// Dense operators on a subset X = {x_0 < x_1 < ... < x_{m-1}} are supplied in
// the tensor order of ascending sites: basis index of a local configuration
// has the occupancy of x_0 as the most significant bit,
//   idx = sum_k occ(x_k) * 2^(m-1-k),
// so for two sites the order is (uu, ud, du, dd). These helpers convert
// between global configuration masks and local dense indices.

// Local dense index of the X-bits of a global mask.
std::uint64_t local_index(std::uint64_t global_mask, const std::vector<int>& x_sites,
                          const ChainRegion& region);

// Writes a local dense index back into the X-bits of a global mask.
std::uint64_t set_local_bits(std::uint64_t global_mask, std::uint64_t local_idx,
                             const std::vector<int>& x_sites, const ChainRegion& region);

}  // namespace xxz
