#pragma once

// Applications of online matrix-vector products: subset queries on graphs,
// triangle membership, 2-CNF evaluation and partial-match retrieval.

#include <omv/bitcore.hpp>
#include <omv/errors.hpp>
#include <omv/omv.hpp>

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace omv {

// ---------------------------------------------------------------------------
// Graph subset queries

enum class SetMode { independent, dominating, vertex_cover };

class GraphHandle {
public:
    /// allow_loops is for derived graphs (2-CNF) that need self-loops; plain
    /// graphs must be simple and undirected.
    explicit GraphHandle(BitMatrix adjacency, OmvParams params = {}, bool allow_loops = false)
        : adj_(std::move(adjacency)), omv_(adj_, params) {
        const std::size_t n = adj_.rows();
        for (std::size_t i = 0; i < n; ++i) {
            if (!allow_loops && adj_.get(i, i)) throw InputError("GraphHandle: self-loop at vertex " + std::to_string(i));
            for (std::size_t j = i + 1; j < n; ++j)
                if (adj_.get(i, j) != adj_.get(j, i)) throw InputError("GraphHandle: adjacency is not symmetric");
        }
    }

    std::size_t size() const noexcept { return adj_.rows(); }
    const BitMatrix& adjacency() const noexcept { return adj_; }
    const OmvState& engine() const noexcept { return omv_; }

    /// One matvec: A v_S for independent/dominating, A v_{V-S} for vertex cover.
    bool set_query(const IndexSet& s, SetMode mode) {
        detail::require(s.universe() == size(), "set_query: universe mismatch");
        switch (mode) {
            case SetMode::independent: return independent(s.bits());
            case SetMode::vertex_cover: return independent(s.bits().complement());
            case SetMode::dominating: {
                BitVector reach = omv_.query(s.bits());
                reach |= s.bits();
                return reach.all();
            }
        }
        return false;
    }

    /// v lies on a triangle iff its neighbourhood is not independent.
    bool triangle_query(std::size_t v) {
        detail::require(v < size(), "triangle_query: vertex out of range");
        return !independent(adj_.row(v));
    }

private:
    bool independent(const BitVector& indicator) {
        const BitVector reach = omv_.query(indicator);
        return !inner_product_bool(reach, indicator);
    }

    BitMatrix adj_;
    OmvState omv_;
};

// ---------------------------------------------------------------------------
// 2-CNF evaluation

struct Literal {
    std::uint32_t var = 0;
    bool negated = false;

    Literal operator!() const { return {var, !negated}; }
    friend bool operator==(const Literal&, const Literal&) = default;
};

struct Clause {
    Literal a;
    Literal b;
};

/// Literal node index in the implication graph: 2*var for x, 2*var+1 for not x.
constexpr std::size_t literal_node(Literal l) noexcept { return 2 * std::size_t{l.var} + (l.negated ? 1 : 0); }

class CnfHandle {
public:
    CnfHandle(std::size_t variables, const std::vector<Clause>& clauses, OmvParams params = {})
        : vars_(variables), graph_(build(variables, clauses), params, /*allow_loops=*/true) {}

    std::size_t variables() const noexcept { return vars_; }
    const GraphHandle& graph() const noexcept { return graph_; }

    /// F(assignment): the literals made true form an independent set iff no
    /// clause has both of its literals false.
    bool eval(const BitVector& assignment) {
        detail::require(assignment.size() == vars_, "cnf_eval: assignment length mismatch");
        IndexSet s(2 * vars_);
        for (std::size_t x = 0; x < vars_; ++x)
            s.insert(literal_node({static_cast<std::uint32_t>(x), !assignment.get(x)}));
        return graph_.set_query(s, SetMode::independent);
    }

private:
    static BitMatrix build(std::size_t variables, const std::vector<Clause>& clauses) {
        if (variables == 0) throw InputError("CnfHandle: need at least one variable");
        BitMatrix a(2 * variables, 2 * variables);
        for (const auto& cl : clauses) {
            if (cl.a.var >= variables || cl.b.var >= variables) throw InputError("CnfHandle: variable out of range");
            const auto p = literal_node(!cl.a);
            const auto q = literal_node(!cl.b);
            a.set(p, q);
            a.set(q, p);
        }
        return a;
    }

    std::size_t vars_;
    GraphHandle graph_;
};

// ---------------------------------------------------------------------------
// Partial match

/// Code sets over [0, dimension): S[l] is the l-th half-size subset in
/// colexicographic order and T[l] its complement. S[a] and T[b] are disjoint
/// iff a == b.
struct SubsetCodes {
    std::size_t dimension = 0;
    std::vector<BitVector> s;
    std::vector<BitVector> t;
};

inline std::size_t ceil_log2(std::size_t k) {
    return k <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(k - 1));
}

inline SubsetCodes subset_codes(std::size_t k) {
    if (k == 0) throw InputError("subset_codes: alphabet must be non-empty");
    const std::size_t half = ceil_log2(k);
    SubsetCodes codes;
    codes.dimension = 2 * half;
    if (codes.dimension > 62) throw InputError("subset_codes: alphabet too large");
    // Colex order of fixed-weight subsets = increasing order of their bitmasks;
    // step through them with Gosper's hack.
    std::uint64_t mask = half == 0 ? 0 : (std::uint64_t{1} << half) - 1;
    for (std::size_t l = 0; l < k; ++l) {
        BitVector sv(codes.dimension);
        if (codes.dimension > 0) sv.set_word(0, mask);
        codes.t.push_back(sv.complement());
        codes.s.push_back(std::move(sv));
        if (mask != 0) {
            const std::uint64_t c = mask & (0 - mask);
            const std::uint64_t r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
    }
    return codes;
}

using Symbol = std::int32_t;
inline constexpr Symbol kWildcard = -1;
using Pattern = std::vector<Symbol>;

/// q matches x when they agree wherever neither holds the wildcard.
inline bool pattern_matches(const Pattern& x, const Pattern& q) {
    detail::require(x.size() == q.size(), "pattern_matches: length mismatch");
    for (std::size_t j = 0; j < x.size(); ++j)
        if (x[j] != kWildcard && q[j] != kWildcard && x[j] != q[j]) return false;
    return true;
}

class PartialMatchIndex {
public:
    /// Builds the Booleanized matrix B (row i = codes of x_i, wildcard -> 0)
    /// and tiles it into ceil(n/m) x dimension square m x m engines.
    PartialMatchIndex(const std::vector<Pattern>& strings, std::size_t k, OmvParams params = {})
        : k_(k), codes_(subset_codes(k)) {
        if (strings.empty()) throw InputError("pm_build: empty corpus");
        n_ = strings.size();
        m_ = strings.front().size();
        if (m_ == 0) throw InputError("pm_build: strings must be non-empty");
        if (m_ > n_) throw InputError("pm_build: string length exceeds corpus size");
        for (const auto& x : strings) validate(x);

        const std::size_t dim = codes_.dimension;
        booleanized_ = BitMatrix(n_, m_ * dim);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < m_; ++j)
                if (strings[i][j] != kWildcard)
                    codes_.s[static_cast<std::size_t>(strings[i][j])].for_each_set(
                        [&](std::size_t b) { booleanized_.set(i, j * dim + b); });

        row_tiles_ = (n_ + m_ - 1) / m_;
        tiles_.reserve(row_tiles_ * dim);
        for (std::size_t r = 0; r < row_tiles_; ++r)
            for (std::size_t t = 0; t < dim; ++t)
                tiles_.emplace_back(booleanized_.window(r * m_, t * m_, m_, m_),
                                    OmvParams{params.delta, params.epsilon, params.c,
                                              mix_seed(params.seed, r * dim + t)});
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t length() const noexcept { return m_; }
    std::size_t alphabet() const noexcept { return k_; }
    std::size_t row_tiles() const noexcept { return row_tiles_; }
    std::size_t col_tiles() const noexcept { return codes_.dimension; }
    const SubsetCodes& codes() const noexcept { return codes_; }
    const BitMatrix& booleanized() const noexcept { return booleanized_; }
    const OmvState& tile(std::size_t r, std::size_t t) const { return tiles_[r * col_tiles() + t]; }

    /// Query vector: T-code of each symbol, wildcard -> zeros.
    BitVector encode_query(const Pattern& q) const {
        validate(q);
        const std::size_t dim = codes_.dimension;
        BitVector v(m_ * dim);
        for (std::size_t j = 0; j < m_; ++j)
            if (q[j] != kWildcard)
                codes_.t[static_cast<std::size_t>(q[j])].for_each_set([&](std::size_t b) { v.set(j * dim + b); });
        return v;
    }

    /// Bit i set iff q matches x_i.
    BitVector query(const Pattern& q) {
        const BitVector v = encode_query(q);
        const std::size_t dim = codes_.dimension;
        BitVector out(n_);
        for (std::size_t r = 0; r < row_tiles_; ++r) {
            BitVector hit(m_);
            for (std::size_t t = 0; t < dim; ++t) hit |= tiles_[r * dim + t].query(v.slice(t * m_, m_));
            for (std::size_t i = 0; i < m_ && r * m_ + i < n_; ++i)
                if (!hit.get(i)) out.set(r * m_ + i);
        }
        return out;
    }

private:
    void validate(const Pattern& x) const {
        if (x.size() != m_) throw InputError("partial match: string of length " + std::to_string(x.size()) +
                                             ", expected " + std::to_string(m_));
        for (Symbol c : x)
            if (c != kWildcard && (c < 0 || static_cast<std::size_t>(c) >= k_))
                throw InputError("partial match: symbol " + std::to_string(c) + " out of range");
    }

    std::size_t k_;
    SubsetCodes codes_;
    std::size_t n_ = 0;
    std::size_t m_ = 0;
    std::size_t row_tiles_ = 0;
    BitMatrix booleanized_;
    std::vector<OmvState> tiles_;
};

}  // namespace omv
