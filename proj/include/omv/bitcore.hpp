#pragma once

// Bit-packed Boolean vectors, matrices and index sets over the Boolean
// semiring. Bit j of a vector lives in word j / 64 at position j % 64, and
// every bit at a position >= size() is kept zero so that population counts
// never need a mask.

#include <omv/errors.hpp>

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace omv {

using Word = std::uint64_t;

/// Bits per machine word used for packing. Unrelated to the cell-probe word
/// size, which is a runtime model parameter.
inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for(std::size_t bits) noexcept {
    return (bits + kWordBits - 1) / kWordBits;
}

/// Mask of the valid bits of the last word for a vector of `bits` bits.
constexpr Word tail_mask(std::size_t bits) noexcept {
    const std::size_t r = bits % kWordBits;
    return r == 0 ? ~Word{0} : (Word{1} << r) - 1;
}

/// Position of the rank-th (0-based) set bit of w. Requires rank < popcount(w).
inline unsigned select_in_word(Word w, unsigned rank) noexcept {
    for (unsigned k = 0; k < rank; ++k) w &= w - 1;
    return static_cast<unsigned>(std::countr_zero(w));
}

class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t n) : size_(n), words_(words_for(n), 0) {}

    static BitVector ones(std::size_t n) {
        BitVector v(n);
        std::fill(v.words_.begin(), v.words_.end(), ~Word{0});
        v.trim();
        return v;
    }

    static BitVector from_indices(std::size_t n, std::initializer_list<std::size_t> idx) {
        BitVector v(n);
        for (auto i : idx) v.set(i);
        return v;
    }

    std::size_t size() const noexcept { return size_; }
    std::size_t word_count() const noexcept { return words_.size(); }
    std::span<const Word> words() const noexcept { return words_; }
    Word word(std::size_t k) const noexcept { return words_[k]; }

    /// Overwrites word k; bits past size() are dropped.
    void set_word(std::size_t k, Word w) noexcept {
        words_[k] = (k + 1 == words_.size()) ? (w & tail_mask(size_)) : w;
    }

    bool get(std::size_t j) const noexcept {
        return (words_[j / kWordBits] >> (j % kWordBits)) & 1u;
    }
    bool operator[](std::size_t j) const noexcept { return get(j); }

    void set(std::size_t j, bool value = true) noexcept {
        const Word bit = Word{1} << (j % kWordBits);
        if (value)
            words_[j / kWordBits] |= bit;
        else
            words_[j / kWordBits] &= ~bit;
    }
    void reset(std::size_t j) noexcept { set(j, false); }
    void clear() noexcept { std::fill(words_.begin(), words_.end(), Word{0}); }

    std::size_t count() const noexcept {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    bool any() const noexcept {
        return std::any_of(words_.begin(), words_.end(), [](Word w) { return w != 0; });
    }
    bool none() const noexcept { return !any(); }
    bool all() const noexcept { return count() == size_; }

    BitVector& operator&=(const BitVector& o) {
        detail::require(o.size_ == size_, "BitVector: length mismatch");
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
        return *this;
    }
    BitVector& operator|=(const BitVector& o) {
        detail::require(o.size_ == size_, "BitVector: length mismatch");
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
        return *this;
    }
    /// this &= ~o
    BitVector& subtract(const BitVector& o) {
        detail::require(o.size_ == size_, "BitVector: length mismatch");
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= ~o.words_[k];
        return *this;
    }

    BitVector complement() const {
        BitVector r(size_);
        for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] = ~words_[k];
        r.trim();
        return r;
    }

    /// Copy of bits [begin, begin + len), reading zeros past size().
    BitVector slice(std::size_t begin, std::size_t len) const {
        BitVector r(len);
        for (std::size_t j = 0; j < len && begin + j < size_; ++j)
            if (get(begin + j)) r.set(j);
        return r;
    }

    /// Copy with one more bit appended at position size().
    BitVector extended(bool bit) const {
        BitVector r(size_ + 1);
        std::copy(words_.begin(), words_.end(), r.words_.begin());
        r.set(size_, bit);
        return r;
    }

    template <class F>
    void for_each_set(F&& f) const {
        for (std::size_t k = 0; k < words_.size(); ++k) {
            Word w = words_[k];
            while (w) {
                f(k * kWordBits + static_cast<std::size_t>(std::countr_zero(w)));
                w &= w - 1;
            }
        }
    }

    std::vector<std::size_t> members() const {
        std::vector<std::size_t> out;
        for_each_set([&](std::size_t j) { out.push_back(j); });
        return out;
    }

    friend bool operator==(const BitVector&, const BitVector&) = default;

private:
    void trim() noexcept {
        if (!words_.empty()) words_.back() &= tail_mask(size_);
    }

    std::size_t size_ = 0;
    std::vector<Word> words_;
};

inline BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }
inline BitVector operator|(BitVector a, const BitVector& b) { return a |= b; }

/// Boolean-semiring dot product: true iff some position is set in both.
inline bool inner_product_bool(const BitVector& a, const BitVector& b) {
    detail::require(a.size() == b.size(), "inner_product_bool: length mismatch");
    const auto wa = a.words();
    const auto wb = b.words();
    for (std::size_t k = 0; k < wa.size(); ++k)
        if (wa[k] & wb[k]) return true;
    return false;
}

/// Number of positions set in both a and b.
inline std::size_t intersection_count(const BitVector& a, const BitVector& b) {
    detail::require(a.size() == b.size(), "intersection_count: length mismatch");
    const auto wa = a.words();
    const auto wb = b.words();
    std::size_t c = 0;
    for (std::size_t k = 0; k < wa.size(); ++k)
        c += static_cast<std::size_t>(std::popcount(wa[k] & wb[k]));
    return c;
}

class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows, BitVector(cols)) {}

    static BitMatrix ones(std::size_t rows, std::size_t cols) {
        BitMatrix m;
        m.cols_ = cols;
        m.rows_.assign(rows, BitVector::ones(cols));
        return m;
    }
    static BitMatrix identity(std::size_t n) {
        BitMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i);
        return m;
    }

    std::size_t rows() const noexcept { return rows_.size(); }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows() == cols_; }

    const BitVector& row(std::size_t i) const noexcept { return rows_[i]; }
    bool get(std::size_t i, std::size_t j) const noexcept { return rows_[i].get(j); }
    void set(std::size_t i, std::size_t j, bool value = true) noexcept { rows_[i].set(j, value); }

    void set_row(std::size_t i, BitVector r) {
        detail::require(r.size() == cols_, "BitMatrix::set_row: length mismatch");
        rows_[i] = std::move(r);
    }

    /// Clears the bits of row i that are set in mask; returns how many flipped.
    std::size_t clear_in_row(std::size_t i, const BitVector& mask) {
        const std::size_t before = rows_[i].count();
        rows_[i].subtract(mask);
        return before - rows_[i].count();
    }

    std::size_t count() const noexcept {
        std::size_t c = 0;
        for (const auto& r : rows_) c += r.count();
        return c;
    }

    /// h x w window starting at (r0, c0); cells outside the matrix read as 0.
    BitMatrix window(std::size_t r0, std::size_t c0, std::size_t h, std::size_t w) const {
        BitMatrix out(h, w);
        for (std::size_t i = 0; i < h && r0 + i < rows(); ++i) out.rows_[i] = rows_[r0 + i].slice(c0, w);
        return out;
    }

    BitMatrix transposed() const {
        BitMatrix t(cols_, rows());
        for (std::size_t i = 0; i < rows(); ++i) rows_[i].for_each_set([&](std::size_t j) { t.set(j, i); });
        return t;
    }

    friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

private:
    std::size_t cols_ = 0;
    std::vector<BitVector> rows_;
};

/// Subset of [0, universe) with a cached cardinality.
class IndexSet {
public:
    IndexSet() = default;
    explicit IndexSet(std::size_t universe) : bits_(universe) {}
    explicit IndexSet(BitVector bits) : bits_(std::move(bits)), card_(bits_.count()) {}

    static IndexSet full(std::size_t universe) { return IndexSet(BitVector::ones(universe)); }

    template <class Range>
    static IndexSet of(std::size_t universe, const Range& members) {
        IndexSet s(universe);
        for (auto i : members) s.insert(static_cast<std::size_t>(i));
        return s;
    }
    static IndexSet of(std::size_t universe, std::initializer_list<std::size_t> members) {
        IndexSet s(universe);
        for (auto i : members) s.insert(i);
        return s;
    }

    std::size_t universe() const noexcept { return bits_.size(); }
    std::size_t size() const noexcept { return card_; }
    bool empty() const noexcept { return card_ == 0; }
    bool contains(std::size_t i) const noexcept { return bits_.get(i); }
    const BitVector& bits() const noexcept { return bits_; }

    void insert(std::size_t i) {
        detail::require(i < universe(), "IndexSet::insert: index out of range");
        if (!bits_.get(i)) {
            bits_.set(i);
            ++card_;
        }
    }
    void erase(std::size_t i) {
        detail::require(i < universe(), "IndexSet::erase: index out of range");
        if (bits_.get(i)) {
            bits_.reset(i);
            --card_;
        }
    }

    IndexSet complement() const { return IndexSet(bits_.complement()); }
    std::vector<std::size_t> members() const { return bits_.members(); }

    template <class F>
    void for_each(F&& f) const {
        bits_.for_each_set(std::forward<F>(f));
    }

    friend bool operator==(const IndexSet& a, const IndexSet& b) { return a.bits_ == b.bits_; }

private:
    BitVector bits_;
    std::size_t card_ = 0;
};

/// True iff M has a 1 somewhere in the rectangle U x V.
inline bool submatrix_has_one(const BitMatrix& m, const IndexSet& u, const IndexSet& v) {
    detail::require(u.universe() == m.rows() && v.universe() == m.cols(),
                    "submatrix_has_one: dimension mismatch");
    const auto& vb = v.bits();
    bool found = false;
    const auto rows = u.bits().words();
    for (std::size_t k = 0; k < rows.size() && !found; ++k) {
        Word w = rows[k];
        while (w && !found) {
            const std::size_t i = k * kWordBits + static_cast<std::size_t>(std::countr_zero(w));
            found = inner_product_bool(m.row(i), vb);
            w &= w - 1;
        }
    }
    return found;
}

/// Zeroes D on U x V and returns how many entries went from 1 to 0.
inline std::size_t zero_rectangle(BitMatrix& d, const IndexSet& u, const IndexSet& v) {
    detail::require(u.universe() == d.rows() && v.universe() == d.cols(),
                    "zero_rectangle: dimension mismatch");
    std::size_t removed = 0;
    u.for_each([&](std::size_t i) { removed += d.clear_in_row(i, v.bits()); });
    return removed;
}

}  // namespace omv
