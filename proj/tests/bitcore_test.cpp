#include <omv/bitcore.hpp>
#include <omv/random.hpp>
#include <omv/workload.hpp>

#include <gtest/gtest.h>

namespace omv {
namespace {

BitVector from_string(const std::string& s) {
    BitVector v(s.size());
    for (std::size_t j = 0; j < s.size(); ++j)
        if (s[j] == '1') v.set(j);
    return v;
}

// Index-loop references.
bool loop_inner(const BitVector& a, const BitVector& b) {
    for (std::size_t j = 0; j < a.size(); ++j)
        if (a.get(j) && b.get(j)) return true;
    return false;
}

bool loop_rect(const BitMatrix& m, const IndexSet& u, const IndexSet& v) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (u.contains(i) && v.contains(j) && m.get(i, j)) return true;
    return false;
}

std::size_t loop_rect_count(const BitMatrix& m, const IndexSet& u, const IndexSet& v) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) c += (u.contains(i) && v.contains(j) && m.get(i, j)) ? 1 : 0;
    return c;
}

TEST(BitVector, PaddingStaysZero) {
    auto v = BitVector::ones(70);
    EXPECT_EQ(v.count(), 70u);
    EXPECT_EQ(v.word(1), (Word{1} << 6) - 1);
    v.set_word(1, ~Word{0});
    EXPECT_EQ(v.count(), 70u);
    EXPECT_EQ(v.complement().count(), 0u);
    EXPECT_EQ(BitVector(70).complement().count(), 70u);
}

TEST(BitVector, ExtendedAndSlice) {
    auto v = from_string("1011");
    auto e = v.extended(true);
    EXPECT_EQ(e.size(), 5u);
    EXPECT_TRUE(e.get(4));
    EXPECT_EQ(v.slice(2, 4), from_string("1100"));
}

TEST(InnerProduct, Examples) {
    EXPECT_FALSE(inner_product_bool(from_string("1010"), from_string("0101")));
    EXPECT_TRUE(inner_product_bool(from_string("1010"), from_string("0010")));
}

TEST(InnerProduct, LengthMismatchThrows) {
    EXPECT_THROW(inner_product_bool(BitVector(3), BitVector(4)), ContractViolation);
}

TEST(InnerProduct, MatchesIndexLoop) {
    Rng rng(11);
    for (int t = 0; t < 500; ++t) {
        const double d = (t % 5) / 8.0;
        auto a = workload::random_vector(256, d, rng);
        auto b = workload::random_vector(256, d, rng);
        ASSERT_EQ(inner_product_bool(a, b), loop_inner(a, b));
    }
}

TEST(SubmatrixHasOne, Examples) {
    EXPECT_FALSE(submatrix_has_one(BitMatrix(5, 5), IndexSet::full(5), IndexSet::full(5)));
    EXPECT_TRUE(submatrix_has_one(BitMatrix::identity(4), IndexSet::of(4, {0}), IndexSet::of(4, {0})));
    EXPECT_FALSE(submatrix_has_one(BitMatrix::identity(4), IndexSet::of(4, {0}), IndexSet::of(4, {1})));
}

TEST(SubmatrixHasOne, MatchesDoubleLoop64) {
    Rng rng(3);
    for (int t = 0; t < 200; ++t) {
        auto m = workload::random_matrix(64, 64, 0.002 * (t % 7), rng);
        IndexSet u(workload::random_vector(64, 0.3, rng));
        IndexSet v(workload::random_vector(64, 0.3, rng));
        ASSERT_EQ(submatrix_has_one(m, u, v), loop_rect(m, u, v));
    }
}

TEST(SubmatrixHasOne, SmallSizesAgainstLoop) {
    Rng rng(5);
    for (std::size_t n = 1; n <= 16; ++n)
        for (int t = 0; t < 100; ++t) {
            auto m = workload::random_matrix(n, n, 0.1, rng);
            IndexSet u(workload::random_vector(n, 0.5, rng));
            IndexSet v(workload::random_vector(n, 0.5, rng));
            ASSERT_EQ(submatrix_has_one(m, u, v), loop_rect(m, u, v)) << "n=" << n;
        }
}

TEST(SubmatrixHasOne, DimensionMismatch) {
    EXPECT_THROW(submatrix_has_one(BitMatrix(3, 3), IndexSet(4), IndexSet(3)), ContractViolation);
}

TEST(ZeroRectangle, FullThenIdempotent) {
    auto d = BitMatrix::ones(4, 4);
    EXPECT_EQ(zero_rectangle(d, IndexSet::full(4), IndexSet::full(4)), 16u);
    EXPECT_EQ(d.count(), 0u);
    EXPECT_EQ(zero_rectangle(d, IndexSet::full(4), IndexSet::full(4)), 0u);
}

TEST(ZeroRectangle, CountMatchesOracleAndMonotone) {
    Rng rng(17);
    auto d = workload::random_matrix(100, 100, 0.6, rng);
    for (int t = 0; t < 50; ++t) {
        IndexSet u(workload::random_vector(100, 0.2, rng));
        IndexSet v(workload::random_vector(100, 0.2, rng));
        const std::size_t expected = loop_rect_count(d, u, v);
        const std::size_t before = d.count();
        ASSERT_EQ(zero_rectangle(d, u, v), expected);
        ASSERT_EQ(d.count(), before - expected);
        ASSERT_FALSE(loop_rect(d, u, v));
    }
}

TEST(IndexSet, CachedCardinality) {
    IndexSet s(10);
    s.insert(3);
    s.insert(3);
    s.insert(9);
    EXPECT_EQ(s.size(), 2u);
    s.erase(3);
    s.erase(3);
    EXPECT_EQ(s.size(), 1u);
    EXPECT_EQ(s.size(), s.bits().count());
    EXPECT_EQ(s.complement().size(), 9u);
    EXPECT_THROW(s.insert(10), ContractViolation);
}

TEST(BitMatrix, WindowPadsWithZeros) {
    auto a = BitMatrix::ones(5, 5);
    auto w = a.window(3, 3, 3, 3);
    EXPECT_EQ(w.count(), 4u);
    EXPECT_TRUE(w.get(1, 1));
    EXPECT_FALSE(w.get(2, 0));
}

}  // namespace
}  // namespace omv
