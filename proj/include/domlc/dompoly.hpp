#pragma once

// Exact domination-polynomial computation.
//
// Two independent routes, kept independent on purpose:
//  * brute_force      — enumerates all 2^n vertex subsets of a general graph
//                       and tests domination directly from the definition.
//                       Exponential; serves as the oracle for everything else.
//  * tree_dompoly     — linear-size dynamic program over rooted subtree
//                       states (root chosen / dominated from below / deferred
//                       to the parent), valid for trees of any size.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "domlc/graph.hpp"
#include "domlc/parallel.hpp"
#include "domlc/poly.hpp"

namespace domlc {

struct BruteForceOptions {
    int max_n = 26;  // 2^26 subsets; raise deliberately, runtime doubles per vertex
    int threads = 1;
};

namespace detail {

// DFS over the remaining vertices, carrying the union of closed neighborhoods.
// Visits each subset once with O(1) incremental work.
inline void brute_force_rec(const Graph& g, int v, std::uint64_t covered, int size,
                            std::uint64_t full, std::vector<std::uint64_t>& hist) {
    if (v == g.n) {
        if (covered == full) ++hist[size];
        return;
    }
    brute_force_rec(g, v + 1, covered, size, full, hist);
    brute_force_rec(g, v + 1, covered | g.closed_nbhd[v], size + 1, full, hist);
}

}  // namespace detail

// Subset counts as raw uint64 histogram; hist[j] = number of dominating sets
// of size j. Counts are bounded by C(n,j) < 2^64 for n <= 64.
inline std::vector<std::uint64_t> brute_force_counts(const Graph& g,
                                                     const BruteForceOptions& opts = {}) {
    if (g.n > opts.max_n)
        throw std::invalid_argument("brute_force: n=" + std::to_string(g.n) +
                                    " exceeds the cap of " + std::to_string(opts.max_n) +
                                    " (override max_n to raise it)");
    const std::uint64_t full = g.full_mask();
    if (g.n == 0) return {1};  // the empty set dominates the empty graph

    // Split on a fixed prefix of vertices so the chunking is independent of
    // the worker count; each chunk accumulates a private histogram.
    int prefix = std::min(g.n, 8);
    std::size_t chunks = std::size_t{1} << prefix;
    std::vector<std::vector<std::uint64_t>> partial(
        chunks, std::vector<std::uint64_t>(g.n + 1, 0));
    run_chunks(chunks, opts.threads, [&](std::size_t chunk) {
        std::uint64_t covered = 0;
        int size = 0;
        for (int v = 0; v < prefix; ++v)
            if ((chunk >> v) & 1) {
                covered |= g.closed_nbhd[v];
                ++size;
            }
        detail::brute_force_rec(g, prefix, covered, size, full, partial[chunk]);
    });

    std::vector<std::uint64_t> hist(g.n + 1, 0);
    for (const auto& part : partial)
        for (int j = 0; j <= g.n; ++j) hist[j] += part[j];
    return hist;
}

inline IntPoly brute_force(const Graph& g, const BruteForceOptions& opts = {}) {
    auto hist = brute_force_counts(g, opts);
    IntPoly p;
    p.c.reserve(hist.size());
    for (std::uint64_t v : hist) p.c.emplace_back(static_cast<unsigned long>(v));
    return p;
}

// Rooted subtree states. For a subtree S with root r:
//   a — r is chosen;
//   b — r unchosen, dominated by a chosen child;
//   c — r unchosen and undominated inside S (its parent must cover it).
// All other vertices of S are dominated within S in every case.
template <typename T>
struct StateTripleT {
    basic_poly<T> a, b, c;
};

using StateTriple = StateTripleT<BigInt>;

// Post-order evaluation of
//   a = x * prod(a_i + b_i + c_i),  b = prod(a_i + b_i) - prod(b_i),
//   c = prod(b_i)
// over the child subtrees. Iterative, so paths thousands of vertices deep are
// fine.
template <typename T>
StateTripleT<T> tree_states(const Tree& t, int root) {
    if (root < 0 || root >= t.n)
        throw std::invalid_argument("tree_states: root " + std::to_string(root) +
                                    " out of range");
    auto adj = t.adjacency();

    // Build a processing order: children before parents.
    std::vector<int> order, parent(t.n, -1), stack{root};
    order.reserve(t.n);
    parent[root] = root;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        order.push_back(v);
        for (int w : adj[v])
            if (parent[w] < 0) {
                parent[w] = v;
                stack.push_back(w);
            }
    }

    const basic_poly<T> x = basic_poly<T>::monomial(1);
    std::vector<StateTripleT<T>> st(t.n);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int v = *it;
        basic_poly<T> all = basic_poly<T>::one();   // prod(a+b+c)
        basic_poly<T> ab = basic_poly<T>::one();    // prod(a+b)
        basic_poly<T> bonly = basic_poly<T>::one(); // prod(b)
        for (int w : adj[v]) {
            if (w == parent[v]) continue;
            all *= st[w].a + st[w].b + st[w].c;
            ab *= st[w].a + st[w].b;
            bonly *= st[w].b;
        }
        st[v].a = x * all;
        st[v].b = ab - bonly;
        st[v].c = std::move(bonly);
    }
    return std::move(st[root]);
}

// At the global root there is no parent to defer to, so D = a + b.
// Returned with exactly n+1 coefficients.
template <typename T>
basic_poly<T> tree_dompoly_as(const Tree& t, int root = 0) {
    StateTripleT<T> s = tree_states<T>(t, root);
    return (s.a + s.b).padded(static_cast<std::size_t>(t.n) + 1);
}

inline IntPoly tree_dompoly(const Tree& t, int root = 0) {
    return tree_dompoly_as<BigInt>(t, root);
}

// uint64 fast path for the search inner loop. Safe for n <= 60: every state
// coefficient counts subsets of the vertex set, so it is < 2^n.
inline std::vector<std::uint64_t> tree_dompoly_u64(const Tree& t) {
    if (t.n > 60)
        throw std::invalid_argument("tree_dompoly_u64: n <= 60 required, got " +
                                    std::to_string(t.n));
    return tree_dompoly_as<std::uint64_t>(t).c;
}

}  // namespace domlc
