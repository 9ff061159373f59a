#include <omv/omv.hpp>
#include <omv/oracle.hpp>
#include <omv/workload.hpp>

#include <gtest/gtest.h>

namespace omv {
namespace {

TEST(OmvNew, GridShape) {
    OmvState a(BitMatrix(16, 16));
    EXPECT_EQ(a.side(), 4u);
    EXPECT_EQ(a.grid(), 4u);
    OmvState b(BitMatrix(17, 17));
    EXPECT_EQ(b.side(), 5u);
    EXPECT_EQ(b.grid(), 4u);
    EXPECT_EQ(block_side(1), 1u);
    EXPECT_EQ(block_side(2), 2u);
    EXPECT_EQ(block_side(256), 16u);
    EXPECT_EQ(block_side(257), 17u);
}

TEST(OmvNew, BlocksAreWindowsOfA) {
    Rng rng(3);
    const std::size_t n = 23;
    auto a = workload::random_matrix(n, n, 0.4, rng);
    OmvState s(a);
    const std::size_t b = s.side();
    for (std::size_t bi = 0; bi < s.grid(); ++bi)
        for (std::size_t bj = 0; bj < s.grid(); ++bj) {
            const auto& blk = s.block(bi, bj).matrix();
            for (std::size_t r = 0; r < b; ++r)
                for (std::size_t c = 0; c < b; ++c) {
                    const std::size_t i = bi * b + r, j = bj * b + c;
                    const bool expected = i < n && j < n && a.get(i, j);
                    ASSERT_EQ(blk.get(r, c), expected);
                }
        }
}

TEST(OmvQuery, Identity) {
    Rng rng(1);
    OmvState s(BitMatrix::identity(30));
    for (int t = 0; t < 20; ++t) {
        auto v = workload::random_vector(30, 0.5, rng);
        ASSERT_EQ(s.query(v), v);
    }
}

TEST(OmvQuery, AllOnesZeroVector) {
    OmvState s(BitMatrix::ones(20, 20));
    EXPECT_EQ(s.query(BitVector(20)), BitVector(20));
    EXPECT_EQ(s.query(BitVector::from_indices(20, {19})), BitVector::ones(20));
}

TEST(OmvQuery, LengthMismatch) {
    OmvState s(BitMatrix(10, 10));
    EXPECT_THROW(s.query(BitVector(9)), ContractViolation);
}

TEST(OmvQuery, PaddingRowsNeverReport) {
    // All-ones with a ragged grid: padded rows are zero and must stay silent.
    OmvState s(BitMatrix::ones(17, 17));
    for (int t = 0; t < 5; ++t) EXPECT_EQ(s.query(BitVector::ones(17)), BitVector::ones(17));
}

TEST(OmvQuery, MatchesNaiveAcrossMixes) {
    Rng rng(2024);
    using workload::QueryMix;
    for (std::size_t n : {16u, 64u, 256u}) {
        for (double density : {0.0, 0.001, 0.05, 0.5, 1.0}) {
            auto a = workload::random_matrix(n, n, density, rng);
            OmvState s(a, OmvParams{1.0, 0.5, 8.0, rng()});
            for (QueryMix mix : {QueryMix::uniform, QueryMix::repeated, QueryMix::basis, QueryMix::dense}) {
                for (const auto& v : workload::vector_queries(n, 50, mix, rng)) {
                    const auto before = s.stats().block_queries;
                    const auto got = s.query(v);
                    ASSERT_EQ(got, naive_matvec(a, v)) << "n=" << n << " density=" << density;
                    ASSERT_LE(s.stats().block_queries - before, block_query_bound(n, s.side(), got.count()));
                }
            }
            const auto st = s.block_stats();
            for (std::size_t bi = 0; bi < s.grid(); ++bi)
                for (std::size_t bj = 0; bj < s.grid(); ++bj)
                    ASSERT_LE(s.block(bi, bj).triples().size(), s.block(bi, bj).params().budget);
            EXPECT_EQ(st.queries, s.stats().block_queries);
        }
    }
}

TEST(BlockedMatvec, GenericDriverWithDirectOracle) {
    // The reduction is independent of how blocks answer; drive it with the
    // brute-force vMv on explicit windows.
    Rng rng(6);
    const std::size_t n = 50;
    auto a = workload::random_matrix(n, n, 0.03, rng);
    const std::size_t b = block_side(n), g = (n + b - 1) / b;
    std::vector<BitMatrix> blocks;
    for (std::size_t bi = 0; bi < g; ++bi)
        for (std::size_t bj = 0; bj < g; ++bj) blocks.push_back(a.window(bi * b, bj * b, b, b));
    OmvStats stats;
    for (int t = 0; t < 100; ++t) {
        auto v = workload::random_vector(n, 0.2, rng);
        auto got = blocked_matvec(
            n, b, v,
            [&](std::size_t bi, std::size_t bj, const IndexSet& r, const IndexSet& c) {
                return naive_vmv(blocks[bi * g + bj], r, c);
            },
            stats);
        ASSERT_EQ(got, naive_matvec(a, v));
    }
    EXPECT_EQ(stats.queries, 100u);
}

}  // namespace
}  // namespace omv
