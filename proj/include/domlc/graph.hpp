#pragma once

// Graph and tree representations.
//
// Graph packs closed neighborhoods N[v] into 64-bit masks, which caps it at
// 64 vertices; the subset-enumeration oracle is exponential anyway, so the
// cap costs nothing. Trees of any size use an edge list and are validated
// (connected, acyclic) on construction.

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "domlc/rng.hpp"

namespace domlc {

struct Graph {
    int n = 0;
    std::vector<std::uint64_t> closed_nbhd;  // closed_nbhd[v] = {v} | neighbors(v)
    int edge_count = 0;

    static constexpr int kMaxVertices = 64;

    static Graph empty(int n) {
        if (n < 0 || n > kMaxVertices)
            throw std::invalid_argument("Graph: vertex count must be in [0," +
                                        std::to_string(kMaxVertices) + "], got " +
                                        std::to_string(n));
        Graph g;
        g.n = n;
        g.closed_nbhd.resize(n);
        for (int v = 0; v < n; ++v) g.closed_nbhd[v] = std::uint64_t{1} << v;
        return g;
    }

    static Graph from_edge_list(int n, const std::vector<std::pair<int, int>>& edges) {
        Graph g = empty(n);
        for (auto [u, v] : edges) g.add_edge(u, v);
        return g;
    }

    bool has_edge(int u, int v) const {
        check_vertex(u);
        check_vertex(v);
        return u != v && (closed_nbhd[u] >> v) & 1;
    }

    void add_edge(int u, int v) {
        check_vertex(u);
        check_vertex(v);
        if (u == v)
            throw std::invalid_argument("Graph: self-loop at vertex " + std::to_string(u));
        if (has_edge(u, v))
            throw std::invalid_argument("Graph: duplicate edge (" + std::to_string(u) + "," +
                                        std::to_string(v) + ")");
        closed_nbhd[u] |= std::uint64_t{1} << v;
        closed_nbhd[v] |= std::uint64_t{1} << u;
        ++edge_count;
    }

    void remove_edge(int u, int v) {
        if (!has_edge(u, v))
            throw std::invalid_argument("Graph: no edge (" + std::to_string(u) + "," +
                                        std::to_string(v) + ") to remove");
        closed_nbhd[u] &= ~(std::uint64_t{1} << v);
        closed_nbhd[v] &= ~(std::uint64_t{1} << u);
        --edge_count;
    }

    void toggle_edge(int u, int v) {
        if (has_edge(u, v)) remove_edge(u, v);
        else add_edge(u, v);
    }

    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        out.reserve(edge_count);
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if ((closed_nbhd[u] >> v) & 1) out.emplace_back(u, v);
        return out;
    }

    int degree(int v) const {
        check_vertex(v);
        return __builtin_popcountll(closed_nbhd[v]) - 1;
    }

    bool has_isolated_vertex() const {
        for (int v = 0; v < n; ++v)
            if (closed_nbhd[v] == (std::uint64_t{1} << v)) return true;
        return false;
    }

    std::uint64_t full_mask() const {
        return n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    }

    bool is_connected() const {
        if (n == 0) return true;
        std::uint64_t seen = 0, frontier = 1;
        while (frontier) {
            seen |= frontier;
            std::uint64_t next = 0;
            std::uint64_t f = frontier;
            while (f) {
                int v = __builtin_ctzll(f);
                f &= f - 1;
                next |= closed_nbhd[v];
            }
            frontier = next & ~seen;
        }
        return seen == full_mask();
    }

    bool is_tree() const { return edge_count == n - 1 && is_connected(); }

private:
    void check_vertex(int v) const {
        if (v < 0 || v >= n)
            throw std::invalid_argument("Graph: vertex " + std::to_string(v) +
                                        " out of range [0," + std::to_string(n) + ")");
    }
};

struct Tree {
    int n = 0;
    std::vector<std::pair<int, int>> edges;  // exactly n-1 of them

    // Validates connectivity and acyclicity via union-find.
    static Tree from_edges(int n, std::vector<std::pair<int, int>> edges) {
        if (n < 1) throw std::invalid_argument("Tree: need at least one vertex");
        if (static_cast<int>(edges.size()) != n - 1)
            throw std::invalid_argument("Tree: expected " + std::to_string(n - 1) +
                                        " edges, got " + std::to_string(edges.size()));
        std::vector<int> parent(n);
        for (int v = 0; v < n; ++v) parent[v] = v;
        auto find = [&](int v) {
            while (parent[v] != v) v = parent[v] = parent[parent[v]];
            return v;
        };
        for (auto [u, v] : edges) {
            if (u < 0 || u >= n || v < 0 || v >= n || u == v)
                throw std::invalid_argument("Tree: bad edge (" + std::to_string(u) + "," +
                                            std::to_string(v) + ")");
            int ru = find(u), rv = find(v);
            if (ru == rv)
                throw std::invalid_argument("Tree: edge (" + std::to_string(u) + "," +
                                            std::to_string(v) + ") closes a cycle");
            parent[ru] = rv;
        }
        Tree t;
        t.n = n;
        t.edges = std::move(edges);
        return t;
    }

    std::vector<std::vector<int>> adjacency() const {
        std::vector<std::vector<int>> adj(n);
        for (auto [u, v] : edges) {
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
        return adj;
    }

    Graph to_graph() const { return Graph::from_edge_list(n, edges); }
};

// Relabels so that vertices appear in BFS order from the given root; keeps
// constructed families stable and documented.
inline Tree bfs_relabel(const Tree& t, int root) {
    auto adj = t.adjacency();
    std::vector<int> newlabel(t.n, -1);
    std::queue<int> q;
    q.push(root);
    newlabel[root] = 0;
    int next = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int w : adj[v])
            if (newlabel[w] < 0) {
                newlabel[w] = next++;
                q.push(w);
            }
    }
    std::vector<std::pair<int, int>> edges;
    edges.reserve(t.edges.size());
    for (auto [u, v] : t.edges) {
        int a = newlabel[u], b = newlabel[v];
        edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    return Tree::from_edges(t.n, std::move(edges));
}

// Erdos-Renyi G(n,p), deterministic per seed. Edge (u,v) draws are made in
// lexicographic order so the result is a pure function of (n, p, seed).
inline Graph random_graph(int n, double edge_prob, std::uint64_t seed) {
    Graph g = Graph::empty(n);
    Rng rng(seed);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.next_unit() < edge_prob) g.add_edge(u, v);
    return g;
}

}  // namespace domlc
