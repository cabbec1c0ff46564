#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

// Lattice-interval combinatorics for finite chains in Z: distances,
// fattenings/thinnings, boundary ribbons, edge bonds, connected components.
// Site sets are bitsets over at most 64 sites; all operations are O(length)
// or better via shifts and masks.

namespace xxz {

inline constexpr int kMaxSites = 64;

// Sentinel distance for the empty set.
inline constexpr int kInfDist = std::numeric_limits<int>::max();

// A finite discrete interval [lo, hi] in Z, inclusive.
struct ChainRegion {
    int lo = 1;
    int hi = 1;

    ChainRegion() = default;
    ChainRegion(int lo_, int hi_) : lo(lo_), hi(hi_) {
        if (lo > hi) throw std::invalid_argument("ChainRegion: lo > hi");
        if (hi - lo + 1 > kMaxSites)
            throw std::invalid_argument("ChainRegion: more than 64 sites");
    }

    int length() const { return hi - lo + 1; }
    bool contains(int site) const { return site >= lo && site <= hi; }
    bool contains(const ChainRegion& other) const {
        return other.lo >= lo && other.hi <= hi;
    }

    bool operator==(const ChainRegion& o) const { return lo == o.lo && hi == o.hi; }
    bool operator!=(const ChainRegion& o) const { return !(*this == o); }

    std::string str() const { return std::to_string(lo) + ":" + std::to_string(hi); }
};

// Subset of a ChainRegion, stored as a bitmask (bit i-lo set <=> site i in set).
struct SiteSet {
    ChainRegion region;
    std::uint64_t mask = 0;

    SiteSet() = default;
    explicit SiteSet(ChainRegion r, std::uint64_t m = 0) : region(r), mask(m) {
        if (m != 0 && r.length() < kMaxSites && (m >> r.length()) != 0)
            throw std::invalid_argument("SiteSet: mask bits outside region");
    }

    static SiteSet empty(ChainRegion r) { return SiteSet(r, 0); }
    static SiteSet full(ChainRegion r) { return SiteSet(r, all_mask(r.length())); }
    static SiteSet single(ChainRegion r, int site) {
        if (!r.contains(site)) throw std::domain_error("SiteSet: site outside region");
        return SiteSet(r, std::uint64_t{1} << (site - r.lo));
    }
    static SiteSet interval(ChainRegion r, ChainRegion sub) {
        if (!r.contains(sub)) throw std::domain_error("SiteSet: subinterval outside region");
        return SiteSet(r, all_mask(sub.length()) << (sub.lo - r.lo));
    }
    static SiteSet from_sites(ChainRegion r, const std::vector<int>& sites) {
        SiteSet s(r);
        for (int x : sites) {
            if (!r.contains(x)) throw std::domain_error("SiteSet: site outside region");
            s.mask |= std::uint64_t{1} << (x - r.lo);
        }
        return s;
    }

    static std::uint64_t all_mask(int n) {
        return n >= kMaxSites ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
    }

    bool empty_set() const { return mask == 0; }
    int size() const { return __builtin_popcountll(mask); }
    bool contains(int site) const {
        return region.contains(site) && ((mask >> (site - region.lo)) & 1u);
    }
    bool is_subset_of(const SiteSet& other) const {
        return region == other.region && (mask & ~other.mask) == 0;
    }

    SiteSet complement() const {
        return SiteSet(region, ~mask & all_mask(region.length()));
    }
    SiteSet unite(const SiteSet& o) const { return SiteSet(region, mask | o.mask); }
    SiteSet intersect(const SiteSet& o) const { return SiteSet(region, mask & o.mask); }
    SiteSet minus(const SiteSet& o) const { return SiteSet(region, mask & ~o.mask); }

    std::vector<int> sites() const {
        std::vector<int> out;
        out.reserve(size());
        for (std::uint64_t m = mask; m != 0; m &= m - 1)
            out.push_back(region.lo + __builtin_ctzll(m));
        return out;
    }

    bool operator==(const SiteSet& o) const { return region == o.region && mask == o.mask; }
    bool operator!=(const SiteSet& o) const { return !(*this == o); }

    std::string str() const {
        std::string s = "{";
        bool first = true;
        for (int x : sites()) {
            if (!first) s += ",";
            s += std::to_string(x);
            first = false;
        }
        return s + "}";
    }
};

// dist_Lambda(x, M): minimum |x - y| over y in M; kInfDist when M is empty.
int dist_in(const ChainRegion& region, int x, const SiteSet& M);

// Distance between two site sets; kInfDist if either is empty.
int dist_sets(const SiteSet& A, const SiteSet& B);

// [M]^Lambda_s: for s >= 0 the s-fattening within the region, for s < 0 the
// thinning M \ [M^c]_{-s}; fatten(M, 0) = M.
SiteSet fatten(const SiteSet& M, int s);

enum class BoundaryKind { Outer, Inner, Both };

// Boundary layers of M at depth s >= 1:
//   Outer: exact-distance-s shell outside M,
//   Inner: sites of M at distance exactly s from M^c,
//   Both:  [M]_s \ [M]_{-s}  (ribbon of combined thickness 2s).
SiteSet boundary(const SiteSet& M, int s, BoundaryKind kind);

// Out-ribbon [M]_s \ M and in-ribbon M \ [M]_{-s} (thickness s each).
// These are the shells used by the shell decomposition and the decoupled
// evolution; note boundary(M, s, Both) = out_ribbon | in_ribbon.
SiteSet out_ribbon(const SiteSet& M, int s);
SiteSet in_ribbon(const SiteSet& M, int s);

// Nearest-neighbor bonds {i, i+1} within the region crossing between M and M^c.
std::vector<std::pair<int, int>> edge_boundary(const SiteSet& M);

// Maximal runs of consecutive sites of A, in increasing order.
// The count equals Upsilon^Lambda_A.
std::vector<ChainRegion> components(const SiteSet& A);

}  // namespace xxz
