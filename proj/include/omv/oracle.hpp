#pragma once

// Brute-force references. These only touch BitMatrix/BitVector through
// single-bit reads (except word_parallel_matvec, which is the O(n^2/w)
// baseline) so they stay independent of the engines they check.

#include <omv/bitcore.hpp>

namespace omv {

/// Output bit i is OR_j (M(i,j) AND v[j]), one bit at a time.
inline BitVector naive_matvec(const BitMatrix& m, const BitVector& v) {
    detail::require(v.size() == m.cols(), "naive_matvec: dimension mismatch");
    BitVector out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (m.get(i, j) && v.get(j)) {
                out.set(i);
                break;
            }
        }
    }
    return out;
}

/// Row i is inner_product_bool(row_i, v); n^2/64 word operations.
inline BitVector word_parallel_matvec(const BitMatrix& m, const BitVector& v) {
    detail::require(v.size() == m.cols(), "word_parallel_matvec: dimension mismatch");
    BitVector out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        if (inner_product_bool(m.row(i), v)) out.set(i);
    return out;
}

/// u^T M v by a double loop over the members of U and V.
inline bool naive_vmv(const BitMatrix& m, const IndexSet& u, const IndexSet& v) {
    detail::require(u.universe() == m.rows() && v.universe() == m.cols(),
                    "naive_vmv: dimension mismatch");
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (!u.contains(i)) continue;
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (v.contains(j) && m.get(i, j)) return true;
    }
    return false;
}

}  // namespace omv
