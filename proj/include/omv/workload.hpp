#pragma once

// Deterministic random workloads shared by the CLI, tests and benchmarks.

#include <omv/apps.hpp>
#include <omv/bitcore.hpp>
#include <omv/errors.hpp>
#include <omv/random.hpp>

#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace omv::workload {

enum class QueryMix {
    uniform,   // each bit set with probability 1/2
    repeated,  // a handful of random vectors, cycled
    basis,     // unit vectors e_i (and single rows / columns for pairs)
    dense,     // all-ones or nearly so
    varied,    // per-query density drawn uniformly from [0, 1]
    mixed,     // round robin over uniform, repeated, basis, dense
};

inline QueryMix parse_mix(std::string_view s) {
    if (s == "uniform") return QueryMix::uniform;
    if (s == "repeated") return QueryMix::repeated;
    if (s == "basis") return QueryMix::basis;
    if (s == "dense") return QueryMix::dense;
    if (s == "varied") return QueryMix::varied;
    if (s == "mixed") return QueryMix::mixed;
    throw InputError("unknown query mix '" + std::string(s) + "'");
}

inline const char* mix_name(QueryMix m) {
    switch (m) {
        case QueryMix::uniform: return "uniform";
        case QueryMix::repeated: return "repeated";
        case QueryMix::basis: return "basis";
        case QueryMix::dense: return "dense";
        case QueryMix::varied: return "varied";
        case QueryMix::mixed: return "mixed";
    }
    return "?";
}

inline BitVector random_vector(std::size_t n, double density, Rng& rng) {
    BitVector v(n);
    if (density <= 0) return v;
    if (density >= 1) return BitVector::ones(n);
    std::bernoulli_distribution bit(density);
    for (std::size_t j = 0; j < n; ++j)
        if (bit(rng)) v.set(j);
    return v;
}

inline BitMatrix random_matrix(std::size_t rows, std::size_t cols, double density, Rng& rng) {
    BitMatrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) a.set_row(i, random_vector(cols, density, rng));
    return a;
}

/// Simple undirected G(n, p).
inline BitMatrix random_graph(std::size_t n, double p, Rng& rng) {
    BitMatrix a(n, n);
    std::bernoulli_distribution edge(p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (edge(rng)) {
                a.set(i, j);
                a.set(j, i);
            }
    return a;
}

inline std::vector<Clause> random_cnf(std::size_t variables, std::size_t clauses, Rng& rng) {
    std::vector<Clause> out;
    for (std::size_t c = 0; c < clauses; ++c) {
        auto lit = [&] {
            return Literal{static_cast<std::uint32_t>(uniform_below(rng, variables)), (rng() & 1) != 0};
        };
        const Literal a = lit();
        out.push_back({a, lit()});
    }
    return out;
}

inline Pattern random_pattern(std::size_t m, std::size_t k, double wildcard_rate, Rng& rng) {
    std::bernoulli_distribution star(wildcard_rate);
    Pattern p(m);
    for (auto& c : p) c = star(rng) ? kWildcard : static_cast<Symbol>(uniform_below(rng, k));
    return p;
}

/// Vector query stream of length q over [n].
inline std::vector<BitVector> vector_queries(std::size_t n, std::size_t q, QueryMix mix, Rng& rng) {
    std::vector<BitVector> pool;
    for (int k = 0; k < 4; ++k) pool.push_back(random_vector(n, 0.5, rng));
    std::vector<BitVector> out;
    out.reserve(q);
    for (std::size_t t = 0; t < q; ++t) {
        QueryMix m = mix;
        if (mix == QueryMix::mixed) {
            constexpr QueryMix cycle[] = {QueryMix::uniform, QueryMix::repeated, QueryMix::basis, QueryMix::dense};
            m = cycle[t % 4];
        }
        switch (m) {
            case QueryMix::uniform: out.push_back(random_vector(n, 0.5, rng)); break;
            case QueryMix::repeated: out.push_back(pool[t % pool.size()]); break;
            case QueryMix::basis: {
                BitVector e(n);
                e.set(uniform_below(rng, n));
                out.push_back(std::move(e));
                break;
            }
            case QueryMix::dense:
                out.push_back((t / 4) % 2 == 0 ? BitVector::ones(n) : random_vector(n, 0.95, rng));
                break;
            case QueryMix::varied: {
                std::uniform_real_distribution<double> dens(0.0, 1.0);
                out.push_back(random_vector(n, dens(rng), rng));
                break;
            }
            case QueryMix::mixed: break;
        }
    }
    return out;
}

using PairQuery = std::pair<IndexSet, IndexSet>;

/// (U, V) query stream of length q over [n] x [n].
inline std::vector<PairQuery> pair_queries(std::size_t n, std::size_t q, QueryMix mix, Rng& rng) {
    std::vector<PairQuery> pool;
    for (int k = 0; k < 4; ++k)
        pool.emplace_back(IndexSet(random_vector(n, 0.5, rng)), IndexSet(random_vector(n, 0.5, rng)));
    std::vector<PairQuery> out;
    out.reserve(q);
    for (std::size_t t = 0; t < q; ++t) {
        QueryMix m = mix;
        if (mix == QueryMix::mixed) {
            constexpr QueryMix cycle[] = {QueryMix::uniform, QueryMix::repeated, QueryMix::basis, QueryMix::dense};
            m = cycle[t % 4];
        }
        switch (m) {
            case QueryMix::uniform:
                out.emplace_back(IndexSet(random_vector(n, 0.5, rng)), IndexSet(random_vector(n, 0.5, rng)));
                break;
            case QueryMix::repeated: out.push_back(pool[t % pool.size()]); break;
            case QueryMix::basis: {
                const auto i = uniform_below(rng, n);
                if ((t / 4) % 2 == 0)
                    out.emplace_back(IndexSet::of(n, {i}), IndexSet::full(n));
                else
                    out.emplace_back(IndexSet::full(n), IndexSet::of(n, {i}));
                break;
            }
            case QueryMix::dense:
                if ((t / 4) % 2 == 0)
                    out.emplace_back(IndexSet::full(n), IndexSet::full(n));
                else
                    out.emplace_back(IndexSet(random_vector(n, 0.95, rng)), IndexSet(random_vector(n, 0.95, rng)));
                break;
            case QueryMix::varied: {
                std::uniform_real_distribution<double> dens(0.0, 1.0);
                const double du = dens(rng), dv = dens(rng);
                out.emplace_back(IndexSet(random_vector(n, du, rng)), IndexSet(random_vector(n, dv, rng)));
                break;
            }
            case QueryMix::mixed: break;
        }
    }
    return out;
}

}  // namespace omv::workload
