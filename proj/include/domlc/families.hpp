#pragma once

// Parametric tree families with closed-form domination polynomials, used both
// as constructions in their own right and as cross-checks against the generic
// tree DP.
//
// Gadgets (all rooted):
//   L       path u-v-w rooted at u
//   F_t     root with t children, each a copy of L
//   H_t     root with three children, each a copy of F_t
//   X       path a-b rooted at a
//   W_{m,t} root with m children H_t plus one child X
//
// Building-block polynomials:
//   P_t = (1+3x+x^2)^t,  Q_t = (2+3x+x^2)^t,  R_t = (P_t - (1+x)^t)/x,
//   U_t = (P_t + x Q_t)^3,  V_t = (Q_t + R_t)^3 - R_t^3.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "domlc/dompoly.hpp"
#include "domlc/graph.hpp"
#include "domlc/poly.hpp"

namespace domlc {

struct CaterpillarSpec {
    std::vector<int> legs;  // legs[i] = leaf count on spine vertex i, >= 0

    int vertex_count() const {
        int n = static_cast<int>(legs.size());
        for (int a : legs) n += a;
        return n;
    }
};

// Spine labeled 0..k-1, then leaves appended in spine order.
inline Tree build_caterpillar(const CaterpillarSpec& spec) {
    int k = static_cast<int>(spec.legs.size());
    if (k < 1) throw std::invalid_argument("build_caterpillar: need at least one spine vertex");
    for (int a : spec.legs)
        if (a < 0) throw std::invalid_argument("build_caterpillar: negative leg count");
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < k; ++i) edges.emplace_back(i, i + 1);
    int next = k;
    for (int i = 0; i < k; ++i)
        for (int a = 0; a < spec.legs[i]; ++a) edges.emplace_back(i, next++);
    return Tree::from_edges(spec.vertex_count(), std::move(edges));
}

// D(T(a_1..a_k)) = prod_i (x^{a_i} + x(1+x)^{a_i}), valid when every a_i >= 1.
inline IntPoly caterpillar_dompoly_closed(const CaterpillarSpec& spec) {
    if (spec.legs.empty())
        throw std::invalid_argument("caterpillar closed form: need at least one spine vertex");
    const IntPoly one_plus_x{BigInt(1), BigInt(1)};
    IntPoly prod = IntPoly::one();
    for (int a : spec.legs) {
        if (a < 1)
            throw std::invalid_argument("legless caterpillar: closed form unsupported");
        IntPoly factor = IntPoly::monomial(static_cast<std::size_t>(a)) +
                         pow(one_plus_x, static_cast<unsigned long>(a)).shifted_up(1);
        prod *= factor;
    }
    return prod.padded(static_cast<std::size_t>(spec.vertex_count()) + 1);
}

// Rooted gadget builders. Each returns the tree with root = vertex 0 and BFS
// labeling from the root, children laid out in declaration order.
namespace gadgets {

struct Rooted {
    Tree tree;
    int root;
};

// Appends a path of `len` vertices hanging from `attach`; returns nothing,
// labels are allocated from `next`.
inline void append_path(std::vector<std::pair<int, int>>& edges, int attach, int len,
                        int& next) {
    int prev = attach;
    for (int i = 0; i < len; ++i) {
        edges.emplace_back(prev, next);
        prev = next++;
    }
}

inline Rooted build_L() {
    return {Tree::from_edges(3, {{0, 1}, {1, 2}}), 0};
}

inline Rooted build_X() {
    return {Tree::from_edges(2, {{0, 1}}), 0};
}

inline Rooted build_F(int t) {
    if (t < 1) throw std::invalid_argument("F_t: need t >= 1");
    std::vector<std::pair<int, int>> edges;
    int next = 1;
    for (int i = 0; i < t; ++i) {
        edges.emplace_back(0, next);  // root of this L copy
        int u = next++;
        append_path(edges, u, 2, next);
    }
    return {bfs_relabel(Tree::from_edges(1 + 3 * t, std::move(edges)), 0), 0};
}

inline Rooted build_H(int t) {
    if (t < 1) throw std::invalid_argument("H_t: need t >= 1");
    std::vector<std::pair<int, int>> edges;
    int next = 1;
    for (int branch = 0; branch < 3; ++branch) {
        int c = next++;
        edges.emplace_back(0, c);  // F_t root
        for (int i = 0; i < t; ++i) {
            int u = next++;
            edges.emplace_back(c, u);
            append_path(edges, u, 2, next);
        }
    }
    return {bfs_relabel(Tree::from_edges(1 + 3 * (1 + 3 * t), std::move(edges)), 0), 0};
}

}  // namespace gadgets

struct WmtSpec {
    int m = 1;  // number of H_t branches
    int t = 1;  // fan width inside each F_t

    int vertex_count() const { return 1 + m * (9 * t + 4) + 2; }
};

inline void validate(const WmtSpec& spec) {
    if (spec.m < 1 || spec.t < 1)
        throw std::invalid_argument("W_{m,t}: need m >= 1 and t >= 1, got m=" +
                                    std::to_string(spec.m) + " t=" + std::to_string(spec.t));
}

// gamma(W_{m,t}) = m(3t+1) + 1.
inline int wmt_gamma(const WmtSpec& spec) {
    validate(spec);
    return spec.m * (3 * spec.t + 1) + 1;
}

inline Tree build_wmt(const WmtSpec& spec) {
    validate(spec);
    std::vector<std::pair<int, int>> edges;
    int next = 1;
    for (int branch = 0; branch < spec.m; ++branch) {
        int h = next++;
        edges.emplace_back(0, h);
        for (int f = 0; f < 3; ++f) {
            int c = next++;
            edges.emplace_back(h, c);
            for (int i = 0; i < spec.t; ++i) {
                int u = next++;
                edges.emplace_back(c, u);
                gadgets::append_path(edges, u, 2, next);
            }
        }
    }
    int a = next++;
    edges.emplace_back(0, a);  // the X whisker
    edges.emplace_back(a, next++);
    return bfs_relabel(Tree::from_edges(spec.vertex_count(), std::move(edges)), 0);
}

// P_t, Q_t, R_t. The division defining R_t must be exact; a nonzero constant
// term would mean the identity x*R_t + (1+x)^t = P_t failed structurally.
inline std::tuple<IntPoly, IntPoly, IntPoly> pqr(int t) {
    if (t < 0) throw std::invalid_argument("pqr: need t >= 0");
    const IntPoly p_base{BigInt(1), BigInt(3), BigInt(1)};
    const IntPoly q_base{BigInt(2), BigInt(3), BigInt(1)};
    const IntPoly one_plus_x{BigInt(1), BigInt(1)};
    IntPoly P = pow(p_base, static_cast<unsigned long>(t));
    IntPoly Q = pow(q_base, static_cast<unsigned long>(t));
    IntPoly R = (P - pow(one_plus_x, static_cast<unsigned long>(t))).divided_by_x();
    return {std::move(P), std::move(Q), std::move(R)};
}

// U_t = (P_t + x Q_t)^3 and V_t = (Q_t + R_t)^3 - R_t^3.
inline std::pair<IntPoly, IntPoly> uv(int t) {
    auto [P, Q, R] = pqr(t);
    IntPoly U = pow(P + Q.shifted_up(1), 3);
    IntPoly V = pow(Q + R, 3) - pow(R, 3);
    return {std::move(U), std::move(V)};
}

// Closed-form D(W_{m,t}) assembled from the rooted states at the top root:
//   B-part: x^gamma  * ((2+x)(U_t + x^2 V_t)^m - x^{2m} V_t^m)
//   A-part: x^{gamma+1} * (2+x)(U_t + x^2 (V_t + R_t^3))^m
inline IntPoly wmt_closed_dompoly(const WmtSpec& spec) {
    validate(spec);
    auto [P, Q, R] = pqr(spec.t);
    IntPoly U = pow(P + Q.shifted_up(1), 3);
    IntPoly R3 = pow(R, 3);
    IntPoly V = pow(Q + R, 3) - R3;
    const IntPoly two_plus_x{BigInt(2), BigInt(1)};
    const unsigned long m = static_cast<unsigned long>(spec.m);

    IntPoly b_part = two_plus_x * pow(U + V.shifted_up(2), m) -
                     pow(V, m).shifted_up(2 * spec.m);
    IntPoly a_part = two_plus_x * pow(U + (V + R3).shifted_up(2), m);

    std::size_t gamma = static_cast<std::size_t>(wmt_gamma(spec));
    IntPoly d = b_part.shifted_up(gamma) + a_part.shifted_up(gamma + 1);
    return d.padded(static_cast<std::size_t>(spec.vertex_count()) + 1);
}

// Shifted coefficient view e_r(m,t) = d_{gamma + r}(W_{m,t}).
inline BigInt wmt_shifted_coeff(const WmtSpec& spec, int r) {
    IntPoly d = wmt_closed_dompoly(spec);
    return d.coeff(static_cast<std::size_t>(wmt_gamma(spec) + r));
}

// log2 of a positive big integer, accurate to ~1e-15 relative.
inline double log2_mpz(const BigInt& z) {
    if (z <= 0) throw std::invalid_argument("log2_mpz: need a positive integer");
    long exp2;
    double mant = mpz_get_d_2exp(&exp2, z.get_mpz_t());
    return static_cast<double>(exp2) + std::log2(mant);
}

struct GrowthTable {
    int m;
    std::vector<int> r_values;                       // rows
    std::vector<int> t_values;                       // columns: ratio at t uses t and t+1
    std::vector<std::vector<double>> log2_ratio;     // [r][t-index]; NaN marks a zero cell
};

// Consecutive-t ratios log2(e_r(m,t+1)/e_r(m,t)). No fitting on purpose:
// convergence thresholds belong to the callers.
inline GrowthTable growth_exponents(int m, int r_max, int t_lo, int t_hi) {
    if (m < 1 || r_max < 0 || t_lo < 1 || t_hi <= t_lo)
        throw std::invalid_argument("growth_exponents: bad parameter range");
    if (r_max > 2 * m)
        throw std::invalid_argument("growth_exponents: r_max must be <= 2m");
    GrowthTable table;
    table.m = m;
    for (int r = 0; r <= r_max; ++r) table.r_values.push_back(r);
    for (int t = t_lo; t < t_hi; ++t) table.t_values.push_back(t);

    std::vector<std::vector<BigInt>> coeffs;  // [t-index][r]
    for (int t = t_lo; t <= t_hi; ++t) {
        IntPoly d = wmt_closed_dompoly({m, t});
        int gamma = wmt_gamma({m, t});
        std::vector<BigInt> row;
        for (int r = 0; r <= r_max; ++r)
            row.push_back(d.coeff(static_cast<std::size_t>(gamma + r)));
        coeffs.push_back(std::move(row));
    }

    table.log2_ratio.assign(r_max + 1, std::vector<double>(table.t_values.size(), 0.0));
    for (int r = 0; r <= r_max; ++r)
        for (std::size_t i = 0; i < table.t_values.size(); ++i) {
            const BigInt& lo = coeffs[i][r];
            const BigInt& hi = coeffs[i + 1][r];
            table.log2_ratio[r][i] = (lo == 0 || hi == 0)
                                         ? std::nan("")
                                         : log2_mpz(hi) - log2_mpz(lo);
        }
    return table;
}

}  // namespace domlc
