#pragma once

// Prufer bijection between labeled trees on n >= 2 vertices and sequences of
// length n-2 over {0..n-1}. Convention: repeatedly remove the smallest-labeled
// leaf and record its neighbor. Fixed so datasets are portable.

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "domlc/graph.hpp"
#include "domlc/rng.hpp"

namespace domlc {

using PruferCode = std::vector<int>;

inline PruferCode prufer_encode(const Tree& t) {
    if (t.n < 2) throw std::invalid_argument("prufer_encode: need n >= 2");
    auto adj = t.adjacency();
    std::vector<int> deg(t.n);
    for (int v = 0; v < t.n; ++v) deg[v] = static_cast<int>(adj[v].size());
    std::vector<bool> removed(t.n, false);

    std::priority_queue<int, std::vector<int>, std::greater<int>> leaves;
    for (int v = 0; v < t.n; ++v)
        if (deg[v] == 1) leaves.push(v);

    PruferCode code;
    code.reserve(t.n - 2);
    for (int step = 0; step < t.n - 2; ++step) {
        int leaf = leaves.top();
        leaves.pop();
        removed[leaf] = true;
        int parent = -1;
        for (int w : adj[leaf])
            if (!removed[w]) {
                parent = w;
                break;
            }
        code.push_back(parent);
        if (--deg[parent] == 1) leaves.push(parent);
    }
    return code;
}

inline Tree prufer_decode(const PruferCode& code, int n) {
    if (n < 2) throw std::invalid_argument("prufer_decode: need n >= 2");
    if (static_cast<int>(code.size()) != n - 2)
        throw std::invalid_argument("prufer_decode: code length " +
                                    std::to_string(code.size()) + " does not match n=" +
                                    std::to_string(n));
    std::vector<int> deg(n, 1);
    for (int v : code) {
        if (v < 0 || v >= n)
            throw std::invalid_argument("prufer_decode: label " + std::to_string(v) +
                                        " out of range [0," + std::to_string(n) + ")");
        ++deg[v];
    }
    std::priority_queue<int, std::vector<int>, std::greater<int>> leaves;
    for (int v = 0; v < n; ++v)
        if (deg[v] == 1) leaves.push(v);

    std::vector<std::pair<int, int>> edges;
    edges.reserve(n - 1);
    for (int v : code) {
        int leaf = leaves.top();
        leaves.pop();
        edges.emplace_back(std::min(leaf, v), std::max(leaf, v));
        if (--deg[v] == 1) leaves.push(v);
    }
    int a = leaves.top();
    leaves.pop();
    int b = leaves.top();
    edges.emplace_back(std::min(a, b), std::max(a, b));
    return Tree::from_edges(n, std::move(edges));
}

// Uniform labeled tree via a uniform code.
inline Tree random_tree(int n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("random_tree: need n >= 2");
    Rng rng(seed);
    PruferCode code(n - 2);
    for (int& v : code) v = rng.next_index(n);
    return prufer_decode(code, n);
}

// Connected G(n,p)-flavored graph: a uniform spanning tree plus each
// remaining pair independently with probability extra_edge_prob.
inline Graph random_connected_graph(int n, double extra_edge_prob, std::uint64_t seed) {
    if (n == 1) return Graph::empty(1);
    Tree t = random_tree(n, derive_seed(seed, {0}));
    Graph g = t.to_graph();
    Rng rng(derive_seed(seed, {1}));
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
            double toss = rng.next_unit();
            if (!g.has_edge(u, v) && toss < extra_edge_prob) g.add_edge(u, v);
        }
    return g;
}

}  // namespace domlc
