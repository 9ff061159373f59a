#pragma once

// Online Boolean matrix-vector multiplication on top of vMv structures.
//
// A is cut into a grid of side x side blocks (side = ceil(sqrt(n)), ragged
// blocks zero-padded). For each block row I we keep the rows R whose output
// bit is still unknown. For every block column J with a nonzero slice v_J we
// ask block (I,J) whether R x supp(v_J) holds a 1; while it does, a binary
// search over R isolates one row with output 1, which then leaves R.

#include <omv/bitcore.hpp>
#include <omv/random.hpp>
#include <omv/vmv.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

namespace omv {

struct OmvParams {
    double delta = 1.0;
    double epsilon = 0.5;
    double c = 8.0;
    std::uint64_t seed = 0;
};

struct OmvStats {
    std::uint64_t queries = 0;
    std::uint64_t block_queries = 0;
    std::uint64_t ones_found = 0;
    std::uint64_t skipped_blocks = 0;
    /// Largest block-query count spent by any single matvec.
    std::uint64_t max_block_queries = 0;
};

inline std::size_t block_side(std::size_t n) {
    auto b = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    while (b * b < n) ++b;
    while (b > 1 && (b - 1) * (b - 1) >= n) --b;
    return std::max<std::size_t>(b, 1);
}

/// Bound on block queries for one matvec with `ones` output 1-bits.
inline std::uint64_t block_query_bound(std::size_t n, std::size_t side, std::uint64_t ones) {
    const std::uint64_t grid = (n + side - 1) / side;
    const auto depth = static_cast<std::uint64_t>(std::ceil(std::log2(static_cast<double>(side)))) + 1;
    return grid * grid + (ones + grid) * depth * grid;
}

/// Generic driver for the reduction. block_query(I, J, rows, cols) must
/// return whether block (I,J) has a 1 in rows x cols (local indices).
template <class BlockQuery>
BitVector blocked_matvec(std::size_t n, std::size_t side, const BitVector& v, BlockQuery&& block_query,
                         OmvStats& stats) {
    detail::require(v.size() == n, "blocked_matvec: vector length mismatch");
    const std::size_t grid = (n + side - 1) / side;
    BitVector out(n);
    std::uint64_t spent = 0;

    std::vector<IndexSet> slices;
    slices.reserve(grid);
    for (std::size_t bj = 0; bj < grid; ++bj) slices.emplace_back(v.slice(bj * side, side));

    auto ask = [&](std::size_t bi, std::size_t bj, const IndexSet& rows) {
        ++spent;
        return static_cast<bool>(block_query(bi, bj, rows, slices[bj]));
    };

    std::vector<std::size_t> cand;
    for (std::size_t bi = 0; bi < grid; ++bi) {
        IndexSet unresolved = IndexSet::full(side);
        for (std::size_t bj = 0; bj < grid && !unresolved.empty(); ++bj) {
            if (slices[bj].empty()) {
                ++stats.skipped_blocks;
                continue;
            }
            while (!unresolved.empty() && ask(bi, bj, unresolved)) {
                cand = unresolved.members();
                while (cand.size() > 1) {
                    const std::size_t half = cand.size() / 2;
                    const IndexSet lower = IndexSet::of(side, std::span(cand.data(), half));
                    if (ask(bi, bj, lower))
                        cand.resize(half);
                    else
                        cand.erase(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(half));
                }
                const std::size_t row = bi * side + cand.front();
                if (row >= n) throw InvariantViolation("blocked_matvec: padding row reported a 1");
                out.set(row);
                ++stats.ones_found;
                unresolved.erase(cand.front());
            }
        }
    }
    ++stats.queries;
    stats.block_queries += spent;
    stats.max_block_queries = std::max(stats.max_block_queries, spent);
    return out;
}

class OmvState {
public:
    /// O(n^2) setup: copies A into the padded block grid.
    OmvState(const BitMatrix& a, OmvParams params = {})
        : n_(a.rows()), side_(block_side(a.rows())), params_(params) {
        if (!a.square()) throw ConfigError("OmvState: matrix must be square");
        if (n_ == 0) throw ConfigError("OmvState: matrix must be non-empty");
        grid_ = (n_ + side_ - 1) / side_;
        blocks_.reserve(grid_ * grid_);
        for (std::size_t bi = 0; bi < grid_; ++bi)
            for (std::size_t bj = 0; bj < grid_; ++bj) {
                auto p = VmvParams::defaults(side_, params.delta, params.epsilon, params.c,
                                             mix_seed(params.seed, bi * grid_ + bj));
                blocks_.emplace_back(a.window(bi * side_, bj * side_, side_, side_), p);
            }
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t side() const noexcept { return side_; }
    std::size_t grid() const noexcept { return grid_; }
    const VmvState& block(std::size_t bi, std::size_t bj) const { return blocks_[bi * grid_ + bj]; }
    const OmvStats& stats() const noexcept { return stats_; }
    const OmvParams& params() const noexcept { return params_; }

    /// Sum of the per-block vMv statistics.
    VmvStats block_stats() const {
        VmvStats total;
        for (const auto& b : blocks_) total.merge(b.stats());
        return total;
    }

    /// A v over the Boolean semiring. Exact for every input.
    BitVector query(const BitVector& v) {
        detail::require(v.size() == n_, "OmvState::query: vector length mismatch");
        return blocked_matvec(
            n_, side_, v,
            [this](std::size_t bi, std::size_t bj, const IndexSet& rows, const IndexSet& cols) {
                return blocks_[bi * grid_ + bj].query(rows, cols);
            },
            stats_);
    }

private:
    std::size_t n_;
    std::size_t side_;
    std::size_t grid_ = 0;
    OmvParams params_;
    std::vector<VmvState> blocks_;
    OmvStats stats_;
};

}  // namespace omv
