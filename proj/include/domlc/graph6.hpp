#pragma once

// graph6 text format: 6-bit packing of the adjacency upper triangle in
// column-major order, every byte offset by 63. Short form covers n <= 62;
// the 126-prefixed long form is accepted on decode up to this library's
// 64-vertex graph cap.

#include <cstdint>
#include <stdexcept>
#include <string>

#include "domlc/graph.hpp"

namespace domlc {

struct Graph6Error : std::invalid_argument {
    Graph6Error(const std::string& msg, std::size_t offset)
        : std::invalid_argument("graph6: " + msg + " at byte " + std::to_string(offset)),
          offset(offset) {}
    std::size_t offset;
};

inline std::string graph6_encode(const Graph& g) {
    if (g.n > 62)
        throw std::invalid_argument("graph6_encode: short form supports n <= 62, got n=" +
                                    std::to_string(g.n));
    std::string out;
    out.push_back(static_cast<char>(g.n + 63));
    int bit = 5;
    char cur = 0;
    for (int v = 1; v < g.n; ++v)
        for (int u = 0; u < v; ++u) {
            if (g.has_edge(u, v)) cur |= static_cast<char>(1 << bit);
            if (--bit < 0) {
                out.push_back(static_cast<char>(cur + 63));
                cur = 0;
                bit = 5;
            }
        }
    if (bit != 5) out.push_back(static_cast<char>(cur + 63));
    return out;
}

inline Graph graph6_decode(const std::string& text) {
    if (text.empty()) throw Graph6Error("empty input", 0);
    std::size_t pos = 0;
    auto next6 = [&]() -> int {
        if (pos >= text.size()) throw Graph6Error("truncated input", pos);
        int b = static_cast<unsigned char>(text[pos]) - 63;
        if (b < 0 || b > 63) throw Graph6Error("byte out of printable range", pos);
        ++pos;
        return b;
    };

    long n;
    int first = next6();
    if (first < 63) {
        n = first;
    } else {
        // long form: 126 then three 6-bit groups, big-endian
        n = 0;
        for (int i = 0; i < 3; ++i) n = (n << 6) | next6();
    }
    if (n > Graph::kMaxVertices)
        throw std::invalid_argument("graph6_decode: graph has " + std::to_string(n) +
                                    " vertices, this build caps at " +
                                    std::to_string(Graph::kMaxVertices));

    Graph g = Graph::empty(static_cast<int>(n));
    int bits_left = 0, cur = 0;
    for (int v = 1; v < n; ++v)
        for (int u = 0; u < v; ++u) {
            if (bits_left == 0) {
                cur = next6();
                bits_left = 6;
            }
            if ((cur >> (bits_left - 1)) & 1) g.add_edge(u, v);
            --bits_left;
        }
    if (pos != text.size()) throw Graph6Error("trailing bytes", pos);
    return g;
}

}  // namespace domlc
