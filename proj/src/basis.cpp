#include "xxz/basis.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

#include "xxz/model.hpp"

namespace xxz {

int cluster_count_mask(std::uint64_t occ) {
    // number of 01 -> 1 run starts: bits set in occ with no set bit below
    return __builtin_popcountll(occ & ~(occ << 1));
}

int cluster_count(const Configuration& c) { return cluster_count_mask(c.occ); }

double field_sum(const Configuration& c, const DisorderSample& omega) {
    if (omega.region != c.region) throw std::domain_error("field_sum: region mismatch");
    double sum = 0.0;
    for (std::uint64_t m = c.occ; m != 0; m &= m - 1)
        sum += omega.omega[static_cast<size_t>(__builtin_ctzll(m))];
    return sum;
}

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t num = 1;
    for (int i = 0; i < k; ++i) {
        num = num * static_cast<std::uint64_t>(n - i) / static_cast<std::uint64_t>(i + 1);
    }
    return num;
}

std::size_t SectorBasis::index_of(std::uint64_t mask) const {
    auto it = std::lower_bound(states.begin(), states.end(), mask);
    if (it == states.end() || *it != mask)
        throw std::domain_error("SectorBasis::index_of: mask not in sector");
    return static_cast<std::size_t>(it - states.begin());
}

bool SectorBasis::contains_mask(std::uint64_t mask) const {
    return std::binary_search(states.begin(), states.end(), mask);
}

namespace {

// Gosper's hack: next larger integer with the same popcount.
std::uint64_t next_same_popcount(std::uint64_t v) {
    std::uint64_t c = v & ~(v - 1);
    std::uint64_t r = v + c;
    return (((r ^ v) >> 2) / c) | r;
}

std::mutex g_basis_mutex;
std::map<std::pair<int, int>, std::shared_ptr<const SectorBasis>> g_basis_cache;

}  // namespace

std::shared_ptr<const SectorBasis> sector_basis(const ChainRegion& region, int n) {
    const int len = region.length();
    if (n < 0 || n > len) throw std::domain_error("sector_basis: N out of range");
    {
        std::lock_guard<std::mutex> lock(g_basis_mutex);
        auto it = g_basis_cache.find({len, n});
        if (it != g_basis_cache.end()) {
            if (it->second->region == region) return it->second;
            // same mask enumeration, different lo: rebind region
            auto copy = std::make_shared<SectorBasis>(*it->second);
            copy->region = region;
            return copy;
        }
    }
    auto b = std::make_shared<SectorBasis>();
    b->region = region;
    b->n_particles = n;
    b->states.reserve(static_cast<size_t>(binomial(len, n)));
    const std::uint64_t count = binomial(len, n);
    std::uint64_t v = n == 0 ? 0 : (std::uint64_t{1} << n) - 1;
    for (std::uint64_t i = 0; i < count; ++i) {
        b->states.push_back(v);
        if (i + 1 < count) v = next_same_popcount(v);
    }
    {
        std::lock_guard<std::mutex> lock(g_basis_mutex);
        g_basis_cache[{len, n}] = b;
    }
    return b;
}

std::uint64_t local_index(std::uint64_t global_mask, const std::vector<int>& x_sites,
                          const ChainRegion& region) {
    const int m = static_cast<int>(x_sites.size());
    std::uint64_t idx = 0;
    for (int k = 0; k < m; ++k) {
        const int bit = x_sites[static_cast<size_t>(k)] - region.lo;
        if ((global_mask >> bit) & 1u) idx |= std::uint64_t{1} << (m - 1 - k);
    }
    return idx;
}

std::uint64_t set_local_bits(std::uint64_t global_mask, std::uint64_t local_idx,
                             const std::vector<int>& x_sites, const ChainRegion& region) {
    const int m = static_cast<int>(x_sites.size());
    for (int k = 0; k < m; ++k) {
        const int bit = x_sites[static_cast<size_t>(k)] - region.lo;
        if ((local_idx >> (m - 1 - k)) & 1u)
            global_mask |= std::uint64_t{1} << bit;
        else
            global_mask &= ~(std::uint64_t{1} << bit);
    }
    return global_mask;
}

}  // namespace xxz
