#pragma once

// Amortized online vector-Matrix-vector queries: given (U, V), decide whether
// M[U x V] contains a 1.
//
// The structure keeps the set C of cells not covered by any past brute-forced
// rectangle (as the indicator matrix D) and the list of those rectangles with
// their sparse 1-entries. A query runs six steps:
//   1. small rectangle           -> scan it directly
//   2. dense rectangle           -> random sampling finds a 1
//   3. 1-entry seen before       -> scan the stored sparse lists
//   4. estimate |(U x V) n C|    -> sample cells of C
//   5. estimate high             -> brute force, maybe store the rectangle
//   6. estimate low              -> list the unseen cells via orthogonal vectors
// Answers are always exact; randomness only affects which step answers.

#include <omv/bitcore.hpp>
#include <omv/errors.hpp>
#include <omv/ovlist.hpp>
#include <omv/random.hpp>
#include <omv/triple.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace omv {

struct VmvParams {
    /// Samples drawn from U x V by the dense check.
    std::size_t dense_samples = 1;
    /// Cap on stored rectangles; also the divisor in the n^2/budget thresholds.
    std::size_t budget = 1;
    /// Constant in the sparsity bound c * n^2 * ln(n) / dense_samples.
    double sparsity_constant = 8.0;
    /// Listing group size is floor(budget^group_exponent).
    double group_exponent = 0.5;
    std::uint64_t seed = 0;

    /// n / log2(n), with log2 clamped below at 1 so tiny n stay usable.
    static double budget_cap(std::size_t n) {
        const double lg = std::max(1.0, std::log2(static_cast<double>(n)));
        return static_cast<double>(n) / lg;
    }

    /// dense_samples = ceil(n^1.5); budget = min(floor(n / log2 n), 2^ceil(delta sqrt(log2 n))).
    static VmvParams defaults(std::size_t n, double delta = 1.0, double epsilon = 0.5, double c = 8.0,
                              std::uint64_t seed = 0) {
        VmvParams p;
        const double nd = static_cast<double>(n);
        p.dense_samples = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::pow(nd, 1.5))));
        const double lg = n > 1 ? std::log2(nd) : 0.0;
        const double exponent = std::ceil(delta * std::sqrt(lg));
        const double wanted = std::pow(2.0, std::min(exponent, 62.0));
        const double cap = std::floor(budget_cap(n));
        p.budget = std::max<std::size_t>(1, static_cast<std::size_t>(std::min(wanted, cap)));
        p.sparsity_constant = c;
        p.group_exponent = epsilon;
        p.seed = seed;
        return p;
    }

    void validate(std::size_t n) const {
        if (n == 0) throw ConfigError("VmvParams: matrix must be non-empty");
        if (dense_samples < 1) throw ConfigError("VmvParams: dense_samples must be >= 1");
        if (budget < 1) throw ConfigError("VmvParams: budget must be >= 1");
        if (static_cast<double>(budget) > budget_cap(n))
            throw ConfigError("VmvParams: budget " + std::to_string(budget) + " exceeds n/log2(n) for n=" +
                              std::to_string(n));
        if (!(sparsity_constant > 0)) throw ConfigError("VmvParams: sparsity constant must be positive");
        if (!(group_exponent > 0)) throw ConfigError("VmvParams: group exponent must be positive");
    }
};

enum class Step : std::uint8_t { small = 1, dense = 2, extracted = 3, estimate = 4, brute_force = 5, listing = 6 };

struct VmvStats {
    std::uint64_t queries = 0;
    /// entered[k] / answered[k]: how often step k was reached / returned the answer.
    std::array<std::uint64_t, 7> entered{};
    std::array<std::uint64_t, 7> answered{};
    std::uint64_t triples_added = 0;
    std::uint64_t brute_force_without_insert = 0;
    /// Step-5 entries answered by a guess instead of brute force.
    std::uint64_t guessed = 0;
    std::uint64_t listings = 0;
    std::uint64_t listed_total = 0;
    std::uint64_t listed_max = 0;

    void merge(const VmvStats& o) {
        queries += o.queries;
        for (std::size_t k = 0; k < entered.size(); ++k) {
            entered[k] += o.entered[k];
            answered[k] += o.answered[k];
        }
        triples_added += o.triples_added;
        brute_force_without_insert += o.brute_force_without_insert;
        guessed += o.guessed;
        listings += o.listings;
        listed_total += o.listed_total;
        listed_max = std::max(listed_max, o.listed_max);
    }
};

/// What an insertion looked like when it happened; kept for audits.
struct InsertionRecord {
    std::size_t removed = 0;
    std::size_t ones = 0;
    std::size_t unseen_before = 0;
};

enum class HighEstimate { brute_force, guess_zero };

class VmvState {
public:
    struct ExtractResult {
        bool answer = false;
        bool extracted = false;
    };

    VmvState(BitMatrix m, VmvParams params)
        : m_(std::move(m)), params_(params), rng_(params.seed) {
        if (!m_.square()) throw ConfigError("VmvState: matrix must be square");
        params_.validate(m_.rows());
        const std::size_t n = m_.rows();
        d_ = BitMatrix::ones(n, n);
        unseen_count_ = n * n;
        row_counts_.assign(n, n);
        side_ = SideVectors(n);
        group_size_ = default_group_size(params_.budget, params_.group_exponent);
        rebuild_prefix();
    }

    std::size_t size() const noexcept { return m_.rows(); }
    const BitMatrix& matrix() const noexcept { return m_; }
    const BitMatrix& unseen() const noexcept { return d_; }
    std::size_t unseen_count() const noexcept { return unseen_count_; }
    std::span<const std::size_t> row_counts() const noexcept { return row_counts_; }
    std::span<const ExtractedTriple> triples() const noexcept { return triples_; }
    std::span<const InsertionRecord> insertions() const noexcept { return insertions_; }
    const SideVectors& side() const noexcept { return side_; }
    const VmvParams& params() const noexcept { return params_; }
    const VmvStats& stats() const noexcept { return stats_; }
    std::size_t group_size() const noexcept { return group_size_; }

    /// |U||V| < n^2 / budget
    bool is_small(std::size_t area) const noexcept {
        return wide(area) * params_.budget < wide(size()) * size();
    }

    /// c n^2 ln(n) / dense_samples
    double sparsity_bound() const {
        const double n = static_cast<double>(size());
        return params_.sparsity_constant * n * n * std::log(n) / static_cast<double>(params_.dense_samples);
    }

    /// ceil(n^2 / budget); the number of cells of C sampled by the estimate.
    std::size_t estimate_samples() const noexcept {
        const std::size_t n2 = size() * size();
        return (n2 + params_.budget - 1) / params_.budget;
    }

    /// Uniform member of C: pick the rank among |C| cells, locate the row by
    /// prefix sums of the per-row counts, then the column inside the row.
    Cell sample_unseen() {
        if (unseen_count_ == 0) throw EmptySetError("sample_unseen: every cell has been covered");
        const std::uint64_t r = uniform_below(rng_, unseen_count_);
        const auto it = std::upper_bound(prefix_.begin(), prefix_.end(), r);
        const auto i = static_cast<std::size_t>(it - prefix_.begin()) - 1;
        std::uint64_t rank = r - prefix_[i];
        const BitVector& row = d_.row(i);
        for (std::size_t k = 0; k < row.word_count(); ++k) {
            const auto pc = static_cast<std::uint64_t>(std::popcount(row.word(k)));
            if (rank < pc) {
                const auto bit = select_in_word(row.word(k), static_cast<unsigned>(rank));
                return {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(k * kWordBits + bit)};
            }
            rank -= pc;
        }
        throw InvariantViolation("sample_unseen: row counts out of sync with D");
    }

    /// Samples dense_samples cells of U x V with replacement; returns the first 1.
    std::optional<Cell> dense_check(const IndexSet& u, const IndexSet& v) {
        check_universe(u, v);
        if (u.empty() || v.empty()) return std::nullopt;
        fill_members(u, row_ids_);
        fill_members(v, col_ids_);
        const std::uint64_t width = col_ids_.size();
        const std::uint64_t area = row_ids_.size() * width;
        for (std::size_t t = 0; t < params_.dense_samples; ++t) {
            const std::uint64_t r = uniform_below(rng_, area);
            const auto i = row_ids_[r / width];
            const auto j = col_ids_[r % width];
            if (m_.get(i, j)) return Cell{i, j};
        }
        return std::nullopt;
    }

    /// Some stored 1-entry that lies in U x V, if any.
    std::optional<Cell> scan_extracted(const IndexSet& u, const IndexSet& v) const {
        check_universe(u, v);
        for (const auto& t : triples_)
            for (const Cell& c : t.ones)
                if (u.contains(c.row) && v.contains(c.col)) return c;
        return std::nullopt;
    }

    /// B = (fraction of estimate_samples() draws from C inside U x V) * |C|.
    /// Zero when C is empty.
    double estimate_unseen(const IndexSet& u, const IndexSet& v) {
        check_universe(u, v);
        if (unseen_count_ == 0) return 0.0;
        const std::size_t m = estimate_samples();
        const std::size_t hits = sample_hits(u, v, m);
        return static_cast<double>(hits) / static_cast<double>(m) * static_cast<double>(unseen_count_);
    }

    /// Exact answer plus, when the rectangle is worth remembering, storing it.
    ExtractResult brute_force_extract(const IndexSet& u, const IndexSet& v) {
        check_universe(u, v);
        std::vector<Cell> ones;
        std::size_t fresh = 0;
        u.for_each([&](std::size_t i) {
            fresh += intersection_count(d_.row(i), v.bits());
            const BitVector hit = m_.row(i) & v.bits();
            hit.for_each_set([&](std::size_t j) {
                ones.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
            });
        });
        const bool answer = !ones.empty();
        const bool too_few_unseen = wide(fresh) * params_.budget < wide(size()) * size();
        const bool too_dense = static_cast<double>(ones.size()) > sparsity_bound();
        if (too_few_unseen || too_dense) {
            ++stats_.brute_force_without_insert;
            return {answer, false};
        }
        insert_triple(u, v, std::move(ones));
        return {answer, true};
    }

    /// Stores (U, V, ones) and removes U x V from C. Used by step 5 and by
    /// worst-case preprocessing.
    void insert_triple(const IndexSet& u, const IndexSet& v, std::vector<Cell> ones) {
        check_universe(u, v);
        if (triples_.size() >= params_.budget)
            throw InvariantViolation("insert_triple: rectangle list already holds budget entries");
        const std::size_t before = unseen_count_;
        const std::size_t removed = zero_rectangle(d_, u, v);
        u.for_each([&](std::size_t i) { row_counts_[i] = d_.row(i).count(); });
        unseen_count_ -= removed;
        rebuild_prefix();
        insertions_.push_back({removed, ones.size(), before});
        side_.append(u, v);
        triples_.push_back({u, v, std::move(ones)});
        ++stats_.triples_added;
    }

    /// W = (U x V) n C, listed through the side vectors.
    std::vector<Cell> list_unseen(const IndexSet& u, const IndexSet& v) const {
        check_universe(u, v);
        return list_orthogonal_pairs(OvInstance{side_, u, v, group_size_, d_});
    }

    bool query(const IndexSet& u, const IndexSet& v, HighEstimate policy = HighEstimate::brute_force) {
        check_universe(u, v);
        ++stats_.queries;

        enter(Step::small);
        if (is_small(u.size() * v.size())) return answer(Step::small, submatrix_has_one(m_, u, v));

        enter(Step::dense);
        if (dense_check(u, v)) return answer(Step::dense, true);

        enter(Step::extracted);
        if (scan_extracted(u, v)) return answer(Step::extracted, true);

        enter(Step::estimate);
        const bool high = unseen_count_ != 0 && estimate_is_high(u, v);

        if (high) {
            enter(Step::brute_force);
            if (policy == HighEstimate::guess_zero) {
                ++stats_.guessed;
                return answer(Step::brute_force, false);
            }
            return answer(Step::brute_force, brute_force_extract(u, v).answer);
        }

        enter(Step::listing);
        listed_.clear();
        if (unseen_count_ != 0) list_orthogonal_pairs(OvInstance{side_, u, v, group_size_, d_}, listed_);
        ++stats_.listings;
        stats_.listed_total += listed_.size();
        stats_.listed_max = std::max<std::uint64_t>(stats_.listed_max, listed_.size());
        const bool found =
            std::any_of(listed_.begin(), listed_.end(), [&](const Cell& c) { return m_.get(c.row, c.col); });
        return answer(Step::listing, found);
    }

private:
    using Wide = unsigned __int128;
    static Wide wide(std::size_t x) noexcept { return static_cast<Wide>(x); }

    void check_universe(const IndexSet& u, const IndexSet& v) const {
        detail::require(u.universe() == size() && v.universe() == size(), "VmvState: query universe mismatch");
    }

    void enter(Step s) noexcept { ++stats_.entered[static_cast<std::size_t>(s)]; }
    bool answer(Step s, bool value) noexcept {
        ++stats_.answered[static_cast<std::size_t>(s)];
        return value;
    }

    static void fill_members(const IndexSet& s, std::vector<std::uint32_t>& out) {
        out.clear();
        s.for_each([&](std::size_t i) { out.push_back(static_cast<std::uint32_t>(i)); });
    }

    std::size_t sample_hits(const IndexSet& u, const IndexSet& v, std::size_t m) {
        std::size_t hits = 0;
        for (std::size_t t = 0; t < m; ++t) {
            const Cell c = sample_unseen();
            hits += (u.contains(c.row) && v.contains(c.col)) ? 1 : 0;
        }
        return hits;
    }

    /// Same decision as estimate_unseen(u, v) > 2n^2/budget, but stops
    /// drawing once the remaining samples cannot change the outcome.
    bool estimate_is_high(const IndexSet& u, const IndexSet& v) {
        const std::size_t n = size();
        const std::size_t m = estimate_samples();
        // B > 2n^2/Z  <=>  hits * |C| * Z > 2 n^2 m
        const Wide lhs_unit = wide(unseen_count_) * params_.budget;
        const Wide rhs = wide(2) * n * n * m;
        const Wide needed = rhs / lhs_unit + 1;  // smallest hit count that is high
        if (needed > m) return false;
        std::size_t hits = 0;
        for (std::size_t t = 0; t < m; ++t) {
            const Cell c = sample_unseen();
            if (u.contains(c.row) && v.contains(c.col) && ++hits >= needed) return true;
            if (wide(hits) + (m - t - 1) < needed) return false;
        }
        return false;
    }

    void rebuild_prefix() {
        prefix_.assign(size() + 1, 0);
        for (std::size_t i = 0; i < size(); ++i) prefix_[i + 1] = prefix_[i] + row_counts_[i];
    }

    BitMatrix m_;
    VmvParams params_;
    Rng rng_;
    BitMatrix d_;
    std::size_t unseen_count_ = 0;
    std::vector<std::size_t> row_counts_;
    std::vector<std::uint64_t> prefix_;
    std::vector<ExtractedTriple> triples_;
    std::vector<InsertionRecord> insertions_;
    SideVectors side_;
    std::size_t group_size_ = 1;
    VmvStats stats_;

    std::vector<std::uint32_t> row_ids_, col_ids_;
    std::vector<Cell> listed_;
};

/// Recomputes every structural invariant of a state from scratch and returns
/// a description of each violation (empty when healthy).
inline std::vector<std::string> audit_invariants(const VmvState& s) {
    std::vector<std::string> bad;
    const std::size_t n = s.size();
    const auto& p = s.params();
    const auto& triples = s.triples();

    if (triples.size() > p.budget) bad.push_back("list longer than budget");

    // Coverage from scratch, cell by cell.
    std::size_t unseen_total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t row_total = 0;
        for (std::size_t j = 0; j < n; ++j) {
            bool covered = false;
            for (const auto& t : triples) covered = covered || (t.rows.contains(i) && t.cols.contains(j));
            if (s.unseen().get(i, j) == covered) {
                bad.push_back("D disagrees with coverage at (" + std::to_string(i) + "," + std::to_string(j) + ")");
                return bad;
            }
            row_total += covered ? 0 : 1;
        }
        if (s.row_counts()[i] != row_total) bad.push_back("row count stale for row " + std::to_string(i));
        unseen_total += row_total;
    }
    if (unseen_total != s.unseen_count()) bad.push_back("|C| out of sync");

    const auto& side = s.side();
    if (side.dimension() != triples.size()) bad.push_back("side vector dimension != |L|");
    for (std::size_t k = 0; k < triples.size() && k < side.dimension(); ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            if (side.row_vector(i).get(k) != triples[k].rows.contains(i)) bad.push_back("row side vector stale");
            if (side.col_vector(i).get(k) != triples[k].cols.contains(i)) bad.push_back("col side vector stale");
        }
        std::size_t ones = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                ones += (triples[k].rows.contains(i) && triples[k].cols.contains(j) && s.matrix().get(i, j)) ? 1 : 0;
        if (ones != triples[k].ones.size()) bad.push_back("stored 1-entries incomplete for triple " + std::to_string(k));
        for (const Cell& c : triples[k].ones)
            if (!s.matrix().get(c.row, c.col) || !triples[k].rows.contains(c.row) || !triples[k].cols.contains(c.col))
                bad.push_back("stored entry is not a 1 inside its rectangle");
    }

    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    for (const auto& rec : s.insertions()) {
        if (static_cast<double>(rec.removed) * static_cast<double>(p.budget) < n2)
            bad.push_back("insertion removed fewer than n^2/budget cells");
        if (static_cast<double>(rec.ones) > s.sparsity_bound()) bad.push_back("insertion exceeded sparsity bound");
    }
    return bad;
}

}  // namespace omv
