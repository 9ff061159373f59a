#pragma once

// Orthogonal-vectors listing over the side vectors of the extracted list.
//
// Row i gets the vector u_i with u_i[k] = 1 iff i lies in the k-th extracted
// row set; column j gets v_j likewise for column sets. A cell (i,j) is still
// unseen iff <u_i, v_j> = 0, which is exactly D(i,j) = 1. Listing the unseen
// cells of a query rectangle therefore reduces to listing orthogonal pairs.

#include <omv/bitcore.hpp>
#include <omv/triple.hpp>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <concepts>
#include <span>
#include <vector>

namespace omv {

class SideVectors {
public:
    SideVectors() = default;
    explicit SideVectors(std::size_t n) : row_side_(n), col_side_(n) {}

    std::size_t universe() const noexcept { return row_side_.size(); }
    std::size_t dimension() const noexcept { return dimension_; }
    const BitVector& row_vector(std::size_t i) const noexcept { return row_side_[i]; }
    const BitVector& col_vector(std::size_t j) const noexcept { return col_side_[j]; }

    /// Adds one coordinate for a new extracted rectangle.
    void append(const IndexSet& rows, const IndexSet& cols) {
        detail::require(rows.universe() == universe() && cols.universe() == universe(),
                        "SideVectors::append: universe mismatch");
        for (std::size_t i = 0; i < universe(); ++i) {
            row_side_[i] = row_side_[i].extended(rows.contains(i));
            col_side_[i] = col_side_[i].extended(cols.contains(i));
        }
        ++dimension_;
    }

private:
    std::size_t dimension_ = 0;
    std::vector<BitVector> row_side_;
    std::vector<BitVector> col_side_;
};

inline SideVectors build_side_vectors(std::span<const ExtractedTriple> list, std::size_t n) {
    SideVectors side(n);
    for (const auto& t : list) side.append(t.rows, t.cols);
    return side;
}

/// Word-parallel brute-force detector: is there an orthogonal pair in ga x gb?
/// Any detector with the same call shape can be plugged into the listing.
struct WordParallelDetector {
    bool operator()(std::span<const BitVector* const> ga, std::span<const BitVector* const> gb) const {
        for (const BitVector* a : ga)
            for (const BitVector* b : gb)
                if (!inner_product_bool(*a, *b)) return true;
        return false;
    }
};

template <class D>
concept GroupPairDetector = requires(const D& d, std::span<const BitVector* const> g) {
    { d(g, g) } -> std::convertible_to<bool>;
};

inline bool detect_group_pair(std::span<const BitVector* const> ga, std::span<const BitVector* const> gb) {
    return WordParallelDetector{}(ga, gb);
}

inline bool detect_group_pair(std::span<const BitVector> ga, std::span<const BitVector> gb) {
    std::vector<const BitVector*> pa, pb;
    for (const auto& a : ga) pa.push_back(&a);
    for (const auto& b : gb) pb.push_back(&b);
    return detect_group_pair(std::span<const BitVector* const>(pa), std::span<const BitVector* const>(pb));
}

/// Default group size: floor(budget^exponent), at least 1.
inline std::size_t default_group_size(std::size_t budget, double exponent) {
    const auto s = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(budget), exponent)));
    return std::max<std::size_t>(1, s);
}

struct OvInstance {
    const SideVectors& side;
    const IndexSet& rows;
    const IndexSet& cols;
    std::size_t group_size;
    /// Unseen indicator; D(i,j) = 1 iff <u_i, v_j> = 0.
    const BitMatrix& unseen;
};

/// Appends every (i,j) in rows x cols with <u_i, v_j> = 0 to out, ordered by
/// (row group, column group, row, column).
template <GroupPairDetector Detector = WordParallelDetector>
void list_orthogonal_pairs(const OvInstance& inst, std::vector<Cell>& out, const Detector& detect = {}) {
    detail::require(inst.group_size >= 1, "list_orthogonal_pairs: group size must be positive");
    detail::require(inst.rows.universe() == inst.side.universe() && inst.cols.universe() == inst.side.universe(),
                    "list_orthogonal_pairs: universe mismatch");
    const std::size_t s = inst.group_size;

    std::vector<std::size_t> row_ids = inst.rows.members();
    std::vector<std::size_t> col_ids = inst.cols.members();
    std::vector<const BitVector*> row_vecs, col_vecs;
    row_vecs.reserve(row_ids.size());
    col_vecs.reserve(col_ids.size());
    for (auto i : row_ids) row_vecs.push_back(&inst.side.row_vector(i));
    for (auto j : col_ids) col_vecs.push_back(&inst.side.col_vector(j));

    for (std::size_t gi = 0; gi < row_ids.size(); gi += s) {
        const std::size_t ri = std::min(s, row_ids.size() - gi);
        const std::span<const BitVector* const> ga(row_vecs.data() + gi, ri);
        for (std::size_t gj = 0; gj < col_ids.size(); gj += s) {
            const std::size_t rj = std::min(s, col_ids.size() - gj);
            const std::span<const BitVector* const> gb(col_vecs.data() + gj, rj);
            if (!detect(ga, gb)) continue;
            for (std::size_t a = gi; a < gi + ri; ++a) {
                const BitVector& drow = inst.unseen.row(row_ids[a]);
                for (std::size_t b = gj; b < gj + rj; ++b) {
                    assert(drow.get(col_ids[b]) == !inner_product_bool(*row_vecs[a], *col_vecs[b]));
                    if (drow.get(col_ids[b]))
                        out.push_back({static_cast<std::uint32_t>(row_ids[a]), static_cast<std::uint32_t>(col_ids[b])});
                }
            }
        }
    }
}

template <GroupPairDetector Detector = WordParallelDetector>
std::vector<Cell> list_orthogonal_pairs(const OvInstance& inst, const Detector& detect = {}) {
    std::vector<Cell> out;
    list_orthogonal_pairs(inst, out, detect);
    return out;
}

}  // namespace omv
