#include "xxz/geometry.hpp"

#include <algorithm>
#include <cstdlib>

namespace xxz {

int dist_in(const ChainRegion& region, int x, const SiteSet& M) {
    if (!region.contains(x)) throw std::domain_error("dist_in: site outside region");
    if (M.region != region) throw std::domain_error("dist_in: region mismatch");
    if (M.empty_set()) return kInfDist;
    int best = kInfDist;
    for (std::uint64_t m = M.mask; m != 0; m &= m - 1) {
        int y = region.lo + __builtin_ctzll(m);
        best = std::min(best, std::abs(x - y));
    }
    return best;
}

int dist_sets(const SiteSet& A, const SiteSet& B) {
    if (A.region != B.region) throw std::domain_error("dist_sets: region mismatch");
    if (A.empty_set() || B.empty_set()) return kInfDist;
    if (A.mask & B.mask) return 0;
    int best = kInfDist;
    for (std::uint64_t m = A.mask; m != 0; m &= m - 1) {
        int x = A.region.lo + __builtin_ctzll(m);
        best = std::min(best, dist_in(A.region, x, B));
    }
    return best;
}

SiteSet fatten(const SiteSet& M, int s) {
    const std::uint64_t all = SiteSet::all_mask(M.region.length());
    if (s == 0) return M;
    if (s > 0) {
        std::uint64_t m = M.mask;
        for (int k = 0; k < s; ++k) m |= (m << 1) | (m >> 1);
        return SiteSet(M.region, m & all);
    }
    // M \ [M^c]_{-s}
    return M.minus(fatten(M.complement(), -s));
}

SiteSet boundary(const SiteSet& M, int s, BoundaryKind kind) {
    if (s < 1) throw std::domain_error("boundary: s must be >= 1");
    switch (kind) {
        case BoundaryKind::Outer: {
            // exact distance s from M
            return fatten(M, s).minus(fatten(M, s - 1));
        }
        case BoundaryKind::Inner: {
            // sites of M at distance exactly s from M^c
            return fatten(M, -(s - 1)).minus(fatten(M, -s));
        }
        case BoundaryKind::Both:
            return fatten(M, s).minus(fatten(M, -s));
    }
    throw std::logic_error("boundary: bad kind");
}

SiteSet out_ribbon(const SiteSet& M, int s) {
    if (s < 0) throw std::domain_error("out_ribbon: s must be >= 0");
    return fatten(M, s).minus(M);
}

SiteSet in_ribbon(const SiteSet& M, int s) {
    if (s < 0) throw std::domain_error("in_ribbon: s must be >= 0");
    return M.minus(fatten(M, -s));
}

std::vector<std::pair<int, int>> edge_boundary(const SiteSet& M) {
    std::vector<std::pair<int, int>> bonds;
    const ChainRegion& r = M.region;
    for (int i = r.lo; i < r.hi; ++i) {
        if (M.contains(i) != M.contains(i + 1)) bonds.emplace_back(i, i + 1);
    }
    return bonds;
}

std::vector<ChainRegion> components(const SiteSet& A) {
    std::vector<ChainRegion> out;
    const ChainRegion& r = A.region;
    int run_start = -1;
    for (int i = r.lo; i <= r.hi; ++i) {
        if (A.contains(i)) {
            if (run_start < 0) run_start = i;
        } else if (run_start >= 0) {
            out.emplace_back(run_start, i - 1);
            run_start = -1;
        }
    }
    if (run_start >= 0) out.emplace_back(run_start, r.hi);
    return out;
}

}  // namespace xxz
