#include <omv/apps.hpp>
#include <omv/workload.hpp>

#include <gtest/gtest.h>

#include <bit>

namespace omv {
namespace {

// ---- oracles -------------------------------------------------------------

bool edge_scan_independent(const BitMatrix& a, const IndexSet& s) {
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.rows(); ++j)
            if (s.contains(i) && s.contains(j) && a.get(i, j)) return false;
    return true;
}

bool edge_scan_dominating(const BitMatrix& a, const IndexSet& s) {
    for (std::size_t v = 0; v < a.rows(); ++v) {
        bool covered = s.contains(v);
        for (std::size_t u = 0; u < a.rows() && !covered; ++u) covered = s.contains(u) && a.get(v, u);
        if (!covered) return false;
    }
    return true;
}

bool edge_scan_vertex_cover(const BitMatrix& a, const IndexSet& s) {
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.rows(); ++j)
            if (a.get(i, j) && !s.contains(i) && !s.contains(j)) return false;
    return true;
}

bool pair_scan_triangle(const BitMatrix& a, std::size_t v) {
    for (std::size_t x = 0; x < a.rows(); ++x)
        for (std::size_t y = 0; y < a.rows(); ++y)
            if (a.get(v, x) && a.get(v, y) && a.get(x, y)) return true;
    return false;
}

bool clause_loop(const std::vector<Clause>& f, const BitVector& assignment) {
    auto value = [&](Literal l) { return assignment.get(l.var) != l.negated; };
    for (const auto& c : f)
        if (!value(c.a) && !value(c.b)) return false;
    return true;
}

BitMatrix complete_graph(std::size_t n) {
    BitMatrix a = BitMatrix::ones(n, n);
    for (std::size_t i = 0; i < n; ++i) a.set(i, i, false);
    return a;
}

// ---- subset codes ----------------------------------------------------------

TEST(SubsetCodes, AlphabetOfTwo) {
    auto c = subset_codes(2);
    ASSERT_EQ(c.dimension, 2u);
    EXPECT_EQ(c.s[0], BitVector::from_indices(2, {0}));
    EXPECT_EQ(c.t[0], BitVector::from_indices(2, {1}));
    EXPECT_EQ(c.s[1], BitVector::from_indices(2, {1}));
    EXPECT_EQ(c.t[1], BitVector::from_indices(2, {0}));
    EXPECT_FALSE(inner_product_bool(c.s[0], c.t[0]));
    EXPECT_EQ(c.s[0] & c.t[1], BitVector::from_indices(2, {0}));
}

TEST(SubsetCodes, AlphabetOfFourExhaustive) {
    auto c = subset_codes(4);
    ASSERT_EQ(c.dimension, 4u);
    for (std::size_t a = 0; a < 4; ++a) {
        EXPECT_EQ(c.s[a].count(), 2u);
        for (std::size_t b = 0; b < 4; ++b) EXPECT_EQ(inner_product_bool(c.s[a], c.t[b]), a != b);
    }
}

TEST(SubsetCodes, ColexOrderAndPropertiesUpTo64) {
    for (std::size_t k = 1; k <= 64; ++k) {
        auto c = subset_codes(k);
        const std::size_t half = ceil_log2(k);
        ASSERT_EQ(c.dimension, 2 * half);
        // First k masks of weight `half`, in increasing numeric order.
        std::vector<std::uint64_t> expected;
        for (std::uint64_t mask = 0; expected.size() < k && mask < (std::uint64_t{1} << c.dimension) + 1; ++mask)
            if (static_cast<std::size_t>(std::popcount(mask)) == half) expected.push_back(mask);
        ASSERT_EQ(expected.size(), k);
        for (std::size_t a = 0; a < k; ++a) {
            ASSERT_EQ(c.dimension ? c.s[a].word(0) : 0u, expected[a]) << "k=" << k;
            ASSERT_EQ(c.s[a].count(), half);
            for (std::size_t b = 0; b < k; ++b) ASSERT_EQ(inner_product_bool(c.s[a], c.t[b]), a != b);
        }
    }
}

// ---- graph queries ---------------------------------------------------------

TEST(SetQuery, EdgelessGraph) {
    const std::size_t n = 9;
    GraphHandle g(BitMatrix(n, n));
    Rng rng(1);
    for (int t = 0; t < 20; ++t) {
        IndexSet s(workload::random_vector(n, 0.5, rng));
        if (s.size() == n) s.erase(0);
        EXPECT_TRUE(g.set_query(s, SetMode::independent));
        EXPECT_FALSE(g.set_query(s, SetMode::dominating));
    }
    EXPECT_TRUE(g.set_query(IndexSet::full(n), SetMode::dominating));
}

TEST(SetQuery, CompleteGraph) {
    GraphHandle g(complete_graph(4));
    const auto s = IndexSet::of(4, {0, 1});
    EXPECT_FALSE(g.set_query(s, SetMode::independent));
    EXPECT_FALSE(g.set_query(s, SetMode::vertex_cover));
    EXPECT_TRUE(g.set_query(s, SetMode::dominating));
    EXPECT_TRUE(g.set_query(IndexSet::of(4, {0, 1, 2}), SetMode::vertex_cover));
}

TEST(SetQuery, RejectsNonSimpleInput) {
    BitMatrix loop(3, 3);
    loop.set(1, 1);
    EXPECT_THROW(GraphHandle{loop}, InputError);
    BitMatrix directed(3, 3);
    directed.set(0, 1);
    EXPECT_THROW(GraphHandle{directed}, InputError);
}

TEST(SetQuery, RandomGraphMatchesEdgeScan) {
    Rng rng(77);
    const std::size_t n = 128;
    auto a = workload::random_graph(n, 0.1, rng);
    GraphHandle g(a, OmvParams{1.0, 0.5, 8.0, 5});
    for (int t = 0; t < 300; ++t) {
        // small sets so that independence is not always false
        const double d = (t % 3 == 0) ? 0.03 : (t % 3 == 1 ? 0.5 : 0.95);
        IndexSet s(workload::random_vector(n, d, rng));
        ASSERT_EQ(g.set_query(s, SetMode::independent), edge_scan_independent(a, s));
        ASSERT_EQ(g.set_query(s, SetMode::dominating), edge_scan_dominating(a, s));
        ASSERT_EQ(g.set_query(s, SetMode::vertex_cover), edge_scan_vertex_cover(a, s));
        ASSERT_EQ(g.set_query(s, SetMode::vertex_cover), g.set_query(s.complement(), SetMode::independent));
    }
}

TEST(TriangleQuery, Examples) {
    GraphHandle k3(complete_graph(3));
    for (std::size_t v = 0; v < 3; ++v) EXPECT_TRUE(k3.triangle_query(v));
    BitMatrix star(6, 6);
    for (std::size_t v = 1; v < 6; ++v) {
        star.set(0, v);
        star.set(v, 0);
    }
    GraphHandle g(star);
    EXPECT_FALSE(g.triangle_query(0));
    EXPECT_FALSE(g.triangle_query(3));
}

TEST(TriangleQuery, RandomGraphsMatchPairScan) {
    Rng rng(8);
    for (double p : {0.02, 0.05, 0.2}) {
        const std::size_t n = 60;
        auto a = workload::random_graph(n, p, rng);
        GraphHandle g(a, OmvParams{1.0, 0.5, 8.0, rng()});
        for (std::size_t v = 0; v < n; ++v) ASSERT_EQ(g.triangle_query(v), pair_scan_triangle(a, v));
    }
}

// ---- 2-CNF -----------------------------------------------------------------

TEST(CnfEval, NoClausesIsTrue) {
    CnfHandle f(5, {});
    Rng rng(2);
    for (int t = 0; t < 10; ++t) EXPECT_TRUE(f.eval(workload::random_vector(5, 0.5, rng)));
}

TEST(CnfEval, ForcedClause) {
    CnfHandle f(1, {{Literal{0, false}, Literal{0, false}}});
    EXPECT_FALSE(f.eval(BitVector(1)));
    EXPECT_TRUE(f.eval(BitVector::ones(1)));
}

TEST(CnfEval, TautologicalClause) {
    CnfHandle f(2, {{Literal{1, false}, Literal{1, true}}});
    for (std::uint64_t m = 0; m < 4; ++m) {
        BitVector a(2);
        a.set_word(0, m);
        EXPECT_TRUE(f.eval(a));
    }
}

TEST(CnfEval, RandomFormulasMatchClauseLoop) {
    Rng rng(31);
    for (std::size_t clauses : {5u, 500u}) {
        auto f = workload::random_cnf(64, clauses, rng);
        CnfHandle h(64, f, OmvParams{1.0, 0.5, 8.0, rng()});
        int satisfied = 0;
        for (int t = 0; t < 300; ++t) {
            auto a = workload::random_vector(64, 0.5, rng);
            const bool expected = clause_loop(f, a);
            satisfied += expected;
            ASSERT_EQ(h.eval(a), expected);
        }
        if (clauses == 5) {
            EXPECT_GT(satisfied, 0);
        }
    }
}

TEST(CnfEval, ExhaustiveTinyFormulas) {
    Rng rng(3);
    for (int t = 0; t < 100; ++t) {
        auto f = workload::random_cnf(4, 1 + t % 6, rng);
        CnfHandle h(4, f);
        for (std::uint64_t m = 0; m < 16; ++m) {
            BitVector a(4);
            a.set_word(0, m);
            ASSERT_EQ(h.eval(a), clause_loop(f, a));
        }
    }
}

// ---- partial match ---------------------------------------------------------

TEST(PartialMatch, WildcardRowIsZero) {
    PartialMatchIndex idx({{kWildcard, kWildcard}, {0, 1}}, 2);
    EXPECT_EQ(idx.booleanized().row(0).count(), 0u);
}

TEST(PartialMatch, CodeLayout) {
    PartialMatchIndex idx({{0, 1}, {1, 1}}, 2);
    // code(a) || code(b) = 10 01
    EXPECT_EQ(idx.booleanized().row(0), BitVector::from_indices(4, {0, 3}));
}

TEST(PartialMatch, TileShape) {
    std::vector<Pattern> xs(8, Pattern(4, 0));
    PartialMatchIndex idx(xs, 4);
    EXPECT_EQ(idx.row_tiles(), 2u);
    EXPECT_EQ(idx.col_tiles(), 4u);
    EXPECT_EQ(idx.tile(1, 3).size(), 4u);
}

TEST(PartialMatch, StarQueryAndSelfMatch) {
    Rng rng(4);
    std::vector<Pattern> xs;
    for (int i = 0; i < 30; ++i) xs.push_back(workload::random_pattern(6, 5, 0.0, rng));
    PartialMatchIndex idx(xs, 5);
    EXPECT_EQ(idx.query(Pattern(6, kWildcard)), BitVector::ones(30));
    for (std::size_t i = 0; i < xs.size(); ++i) ASSERT_TRUE(idx.query(xs[i]).get(i));
}

TEST(PartialMatch, InputErrors) {
    EXPECT_THROW(PartialMatchIndex({{0, 1}, {0}}, 2), InputError);
    EXPECT_THROW(PartialMatchIndex({{0, 2}, {0, 0}}, 2), InputError);
    EXPECT_THROW(PartialMatchIndex({{0, 1, 0}}, 2), InputError);  // m > n
    PartialMatchIndex idx({{0, 1}, {1, 1}}, 2);
    EXPECT_THROW(idx.query({0}), InputError);
    EXPECT_THROW(idx.query({0, 5}), InputError);
}

TEST(PartialMatch, OrthogonalityIffMatchExhaustive) {
    for (std::size_t k = 1; k <= 4; ++k)
        for (std::size_t m = 1; m <= 3; ++m) {
            std::vector<Pattern> all;
            std::size_t total = 1;
            for (std::size_t j = 0; j < m; ++j) total *= k + 1;
            for (std::size_t code = 0; code < total; ++code) {
                Pattern p(m);
                std::size_t c = code;
                for (auto& s : p) {
                    s = static_cast<Symbol>(c % (k + 1)) - 1;
                    c /= k + 1;
                }
                all.push_back(p);
            }
            PartialMatchIndex idx(all, k);
            for (std::size_t qi = 0; qi < all.size(); ++qi) {
                const BitVector enc = idx.encode_query(all[qi]);
                for (std::size_t i = 0; i < all.size(); ++i)
                    ASSERT_EQ(!inner_product_bool(idx.booleanized().row(i), enc), pattern_matches(all[i], all[qi]));
            }
        }
}

TEST(PartialMatch, RandomCorpusMatchesPositionLoop) {
    Rng rng(55);
    for (std::size_t k : {2u, 4u, 26u}) {
        const std::size_t n = 96, m = 24;
        std::vector<Pattern> xs;
        for (std::size_t i = 0; i < n; ++i) xs.push_back(workload::random_pattern(m, k, 0.6, rng));
        PartialMatchIndex idx(xs, k, OmvParams{1.0, 0.5, 8.0, rng()});
        for (int t = 0; t < 60; ++t) {
            Pattern q = (t % 2 == 0) ? xs[uniform_below(rng, n)] : workload::random_pattern(m, k, 0.9, rng);
            for (auto& c : q)
                if (uniform_below(rng, 4) == 0) c = kWildcard;
            const BitVector got = idx.query(q);
            for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(got.get(i), pattern_matches(xs[i], q)) << "k=" << k;
        }
    }
}

TEST(PartialMatch, RaggedCorpus) {
    Rng rng(6);
    std::vector<Pattern> xs;
    for (int i = 0; i < 11; ++i) xs.push_back(workload::random_pattern(4, 3, 0.5, rng));
    PartialMatchIndex idx(xs, 3);
    EXPECT_EQ(idx.row_tiles(), 3u);
    for (int t = 0; t < 40; ++t) {
        auto q = workload::random_pattern(4, 3, 0.5, rng);
        auto got = idx.query(q);
        ASSERT_EQ(got.size(), 11u);
        for (std::size_t i = 0; i < 11; ++i) ASSERT_EQ(got.get(i), pattern_matches(xs[i], q));
    }
}

}  // namespace
}  // namespace omv
