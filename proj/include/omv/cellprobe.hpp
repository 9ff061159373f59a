#pragma once

// Toy-scale cell-probe structures for vMv / OMV with exact probe accounting,
// and the exhaustive worst-case preprocessing of the amortized structure.
//
// Cell-probe vMv: preprocessing greedily stores all-zero rectangles (U, V)
// that each cover at least n^{3/2}/sqrt(w) cells not covered before. A query
// reads the whole list, computes Q = (U x V) minus the covered cells for free,
// and either answers 1 (|Q| at or above the threshold, since otherwise (U, V)
// would have been stored) or probes every cell of Q.
//
// Everything here enumerates subsets of [n] as machine-word masks, so n is
// capped by a configurable n_max (default 12).

#include <omv/bitcore.hpp>
#include <omv/errors.hpp>
#include <omv/omv.hpp>
#include <omv/vmv.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace omv {

inline constexpr std::size_t kDefaultExhaustiveLimit = 12;

struct ProbeLedger {
    /// Bits per memory cell in the model.
    std::size_t word_bits = 64;
    std::uint64_t probes = 0;
    /// Charge ceil(2n/w) probes per stored rectangle read at query time.
    bool charge_list_reads = true;
    /// Charge one probe per cell of A inspected.
    bool charge_matrix_reads = true;

    void charge(std::uint64_t k) noexcept { probes += k; }
    void reset() noexcept { probes = 0; }
};

/// n^{3/2} / sqrt(w)
inline double probe_threshold(std::size_t n, std::size_t w) {
    return std::pow(static_cast<double>(n), 1.5) / std::sqrt(static_cast<double>(w));
}

/// ceil(2n / w): cells needed to read one stored (U, V) pair.
inline std::uint64_t rect_read_cost(std::size_t n, std::size_t w) { return (2 * n + w - 1) / w; }

namespace detail {

inline std::uint64_t low_mask(std::size_t n) { return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1; }

inline std::uint64_t fingerprint(const BitMatrix& a) {
    std::uint64_t h = 1469598103934665603ULL ^ (a.rows() * 1315423911ULL) ^ a.cols();
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (auto w : a.row(i).words()) h = (h ^ w) * 1099511628211ULL;
    return h;
}

inline void check_exhaustive_scale(std::size_t n, std::size_t n_max, const char* who) {
    if (n > n_max || n > 63)
        throw ScaleError(std::string(who) + ": n=" + std::to_string(n) + " exceeds exhaustive limit " +
                         std::to_string(std::min<std::size_t>(n_max, 63)));
}

inline IndexSet mask_to_set(std::size_t n, std::uint64_t mask) {
    BitVector b(n);
    if (n > 0) b.set_word(0, mask);
    return IndexSet(std::move(b));
}

}  // namespace detail

struct RectPair {
    IndexSet rows;
    IndexSet cols;
};

class ZeroRectList {
public:
    ZeroRectList() = default;
    ZeroRectList(std::size_t n, std::size_t w, std::uint64_t matrix_fingerprint)
        : n_(n), w_(w), fingerprint_(matrix_fingerprint), coverage_(n, n) {}

    std::size_t universe() const noexcept { return n_; }
    std::size_t word_bits() const noexcept { return w_; }
    std::size_t size() const noexcept { return rects_.size(); }
    const std::vector<RectPair>& rects() const noexcept { return rects_; }
    const std::vector<std::size_t>& increments() const noexcept { return increments_; }
    const BitMatrix& coverage() const noexcept { return coverage_; }
    std::uint64_t fingerprint() const noexcept { return fingerprint_; }
    double threshold() const { return probe_threshold(n_, w_); }

    /// Adds a rectangle and returns how many cells it newly covered.
    std::size_t add(RectPair r) {
        std::size_t fresh = 0;
        r.rows.for_each([&](std::size_t i) {
            BitVector grow = r.cols.bits();
            grow.subtract(coverage_.row(i));
            fresh += grow.count();
            BitVector merged = coverage_.row(i) | r.cols.bits();
            coverage_.set_row(i, std::move(merged));
        });
        increments_.push_back(fresh);
        rects_.push_back(std::move(r));
        return fresh;
    }

private:
    std::size_t n_ = 0;
    std::size_t w_ = 1;
    std::uint64_t fingerprint_ = 0;
    std::vector<RectPair> rects_;
    std::vector<std::size_t> increments_;
    BitMatrix coverage_;
};

/// Greedy construction. Each round picks, among all-zero rectangles covering
/// at least n^{3/2}/sqrt(w) new cells, one maximizing the new cells, ties
/// broken by the smallest (row mask, column mask). For a fixed row set the
/// best column set is the set of zero columns that still add a new cell, so
/// each round costs 2^n * n rather than 4^n.
inline ZeroRectList cp_preprocess(const BitMatrix& a, std::size_t w, std::size_t n_max = kDefaultExhaustiveLimit) {
    if (!a.square()) throw ContractViolation("cp_preprocess: matrix must be square");
    if (w == 0) throw ConfigError("cp_preprocess: word size must be positive");
    const std::size_t n = a.rows();
    detail::check_exhaustive_scale(n, n_max, "cp_preprocess");
    ZeroRectList list(n, w, detail::fingerprint(a));
    if (n == 0) return list;

    const std::uint64_t all = detail::low_mask(n);
    std::vector<std::uint64_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = a.row(i).word(0);
    const double tau = probe_threshold(n, w);

    while (true) {
        std::vector<std::uint64_t> uncovered(n);
        for (std::size_t i = 0; i < n; ++i) uncovered[i] = ~list.coverage().row(i).word(0) & all;

        std::size_t best_fresh = 0;
        std::uint64_t best_u = 0, best_v = 0;
        for (std::uint64_t u = 1; u <= all; ++u) {
            std::uint64_t ones = 0, open = 0;
            for (std::uint64_t r = u; r; r &= r - 1) {
                const auto i = static_cast<std::size_t>(std::countr_zero(r));
                ones |= rows[i];
                open |= uncovered[i];
            }
            const std::uint64_t v = ~ones & all & open;
            if (v == 0) continue;
            std::size_t fresh = 0;
            for (std::uint64_t r = u; r; r &= r - 1)
                fresh += static_cast<std::size_t>(std::popcount(uncovered[std::countr_zero(r)] & v));
            if (static_cast<double>(fresh) >= tau && fresh > best_fresh) {
                best_fresh = fresh;
                best_u = u;
                best_v = v;
            }
        }
        if (best_fresh == 0) break;
        list.add({detail::mask_to_set(n, best_u), detail::mask_to_set(n, best_v)});
    }
    return list;
}

struct CpAnswer {
    bool answer = false;
    std::uint64_t probes = 0;
};

/// Answers u^T A v, charging probes to the ledger. Returns the charge of
/// this call alone.
inline CpAnswer cp_query(const BitMatrix& a, const ZeroRectList& list, const IndexSet& u, const IndexSet& v,
                         ProbeLedger& ledger) {
    const std::size_t n = a.rows();
    if (list.universe() != n || list.fingerprint() != detail::fingerprint(a))
        throw ContractViolation("cp_query: rectangle list was built for a different matrix");
    if (ledger.word_bits != list.word_bits())
        throw ContractViolation("cp_query: ledger word size differs from preprocessing word size");
    detail::require(u.universe() == n && v.universe() == n, "cp_query: universe mismatch");

    const std::uint64_t start = ledger.probes;
    if (ledger.charge_list_reads) ledger.charge(list.size() * rect_read_cost(n, list.word_bits()));

    std::vector<Cell> q;
    u.for_each([&](std::size_t i) {
        BitVector open = v.bits();
        open.subtract(list.coverage().row(i));
        open.for_each_set([&](std::size_t j) {
            q.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
        });
    });

    CpAnswer res;
    if (static_cast<double>(q.size()) >= list.threshold()) {
        res.answer = true;
    } else {
        if (ledger.charge_matrix_reads) ledger.charge(q.size());
        for (const Cell& c : q) res.answer = res.answer || a.get(c.row, c.col);
    }
    res.probes = ledger.probes - start;
    return res;
}

/// Cell-probe OMV: one zero-rectangle list per block of the padded grid.
struct CellProbeOmv {
    std::size_t n = 0;
    std::size_t side = 1;
    std::size_t grid = 0;
    std::size_t word_bits = 1;
    std::vector<BitMatrix> blocks;
    std::vector<ZeroRectList> lists;
};

inline CellProbeOmv cp_omv_build(const BitMatrix& a, std::size_t w, std::size_t n_max = kDefaultExhaustiveLimit) {
    if (!a.square()) throw ContractViolation("cp_omv_build: matrix must be square");
    CellProbeOmv s;
    s.n = a.rows();
    s.side = block_side(s.n);
    detail::check_exhaustive_scale(s.side, n_max, "cp_omv_build");
    s.grid = (s.n + s.side - 1) / s.side;
    s.word_bits = w;
    for (std::size_t bi = 0; bi < s.grid; ++bi)
        for (std::size_t bj = 0; bj < s.grid; ++bj) {
            s.blocks.push_back(a.window(bi * s.side, bj * s.side, s.side, s.side));
            s.lists.push_back(cp_preprocess(s.blocks.back(), w, n_max));
        }
    return s;
}

struct CpOmvAnswer {
    BitVector product;
    std::uint64_t probes = 0;
    std::uint64_t block_queries = 0;
};

/// Av with the same row-recovery procedure as OmvState; probes summed over
/// every block query issued.
inline CpOmvAnswer cp_omv_query(const CellProbeOmv& s, const BitVector& v, ProbeLedger& ledger) {
    detail::require(v.size() == s.n, "cp_omv_query: vector length mismatch");
    const std::uint64_t start = ledger.probes;
    OmvStats stats;
    CpOmvAnswer out;
    out.product = blocked_matvec(
        s.n, s.side, v,
        [&](std::size_t bi, std::size_t bj, const IndexSet& rows, const IndexSet& cols) {
            const std::size_t k = bi * s.grid + bj;
            return cp_query(s.blocks[k], s.lists[k], rows, cols, ledger).answer;
        },
        stats);
    out.probes = ledger.probes - start;
    out.block_queries = stats.block_queries;
    return out;
}

// ---------------------------------------------------------------------------
// Worst-case variant of the amortized structure

/// A query that would pass step 1, survive step 3, reach step 5 under the
/// exact count (|(U x V) n C| >= 2n^2/budget) and be stored. Searches all
/// 4^n (U, V) in increasing (row mask, column mask) order.
inline std::optional<RectPair> find_insertable_query(const VmvState& s,
                                                     std::size_t n_max = kDefaultExhaustiveLimit) {
    const std::size_t n = s.size();
    detail::check_exhaustive_scale(n, n_max, "find_insertable_query");
    const std::uint64_t all = detail::low_mask(n);
    const std::uint64_t n2 = n * n;
    const std::uint64_t budget = s.params().budget;
    const double bound = s.sparsity_bound();

    std::vector<std::uint64_t> m(n), d(n), seen_cols(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = s.matrix().row(i).word(0);
        d[i] = s.unseen().row(i).word(0);
    }
    for (const auto& t : s.triples())
        for (const Cell& c : t.ones) seen_cols[c.row] |= std::uint64_t{1} << c.col;

    for (std::uint64_t u = 1; u <= all; ++u) {
        const auto usize = static_cast<std::uint64_t>(std::popcount(u));
        std::uint64_t stored = 0;
        for (std::uint64_t r = u; r; r &= r - 1) stored |= seen_cols[std::countr_zero(r)];
        for (std::uint64_t v = 1; v <= all; ++v) {
            if (usize * static_cast<std::uint64_t>(std::popcount(v)) * budget < n2) continue;
            if (stored & v) continue;
            std::uint64_t fresh = 0, ones = 0;
            for (std::uint64_t r = u; r; r &= r - 1) {
                const auto i = static_cast<std::size_t>(std::countr_zero(r));
                fresh += static_cast<std::uint64_t>(std::popcount(d[i] & v));
                ones += static_cast<std::uint64_t>(std::popcount(m[i] & v));
            }
            if (fresh * budget < 2 * n2) continue;
            if (static_cast<double>(ones) > bound) continue;
            return RectPair{detail::mask_to_set(n, u), detail::mask_to_set(n, v)};
        }
    }
    return std::nullopt;
}

/// Runs step 5 on insertable queries until none is left.
inline VmvState wc_preprocess(BitMatrix m, VmvParams params, std::size_t n_max = kDefaultExhaustiveLimit) {
    detail::check_exhaustive_scale(m.rows(), n_max, "wc_preprocess");
    VmvState s(std::move(m), params);
    while (auto q = find_insertable_query(s, n_max)) {
        if (!s.brute_force_extract(q->rows, q->cols).extracted)
            throw InvariantViolation("wc_preprocess: insertable query was not stored");
    }
    return s;
}

/// Steps 1-4 and 6 as usual; a query headed for step 5 is answered 0.
inline bool wc_query(VmvState& s, const IndexSet& u, const IndexSet& v) {
    return s.query(u, v, HighEstimate::guess_zero);
}

/// The matrix cut into side x side blocks, each preprocessed separately. A vMv
/// query ORs the per-block answers.
class BlockedWorstCase {
public:
    BlockedWorstCase(const BitMatrix& m, std::size_t side, const VmvParams& block_params,
                     std::size_t n_max = kDefaultExhaustiveLimit)
        : n_(m.rows()), side_(side) {
        if (!m.square()) throw ContractViolation("BlockedWorstCase: matrix must be square");
        if (side == 0) throw ConfigError("BlockedWorstCase: block side must be positive");
        grid_ = (n_ + side_ - 1) / side_;
        for (std::size_t bi = 0; bi < grid_; ++bi)
            for (std::size_t bj = 0; bj < grid_; ++bj) {
                auto p = block_params;
                p.seed = mix_seed(block_params.seed, bi * grid_ + bj);
                blocks_.push_back(wc_preprocess(m.window(bi * side_, bj * side_, side_, side_), p, n_max));
            }
    }

    std::size_t grid() const noexcept { return grid_; }
    const VmvState& block(std::size_t bi, std::size_t bj) const { return blocks_[bi * grid_ + bj]; }

    bool query(const IndexSet& u, const IndexSet& v) {
        detail::require(u.universe() == n_ && v.universe() == n_, "BlockedWorstCase::query: universe mismatch");
        bool any = false;
        for (std::size_t bi = 0; bi < grid_; ++bi) {
            const IndexSet us(u.bits().slice(bi * side_, side_));
            if (us.empty()) continue;
            for (std::size_t bj = 0; bj < grid_; ++bj) {
                const IndexSet vs(v.bits().slice(bj * side_, side_));
                if (vs.empty()) continue;
                any = wc_query(blocks_[bi * grid_ + bj], us, vs) || any;
            }
        }
        return any;
    }

private:
    std::size_t n_;
    std::size_t side_;
    std::size_t grid_ = 0;
    std::vector<VmvState> blocks_;
};

}  // namespace omv
