#pragma once

// Shape analysis of domination sequences: log-concavity breaks, unimodality,
// and the proven monotone-range bounds used as cross-checks on the counting
// code. Everything here is exact integer arithmetic.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "domlc/poly.hpp"

namespace domlc {

struct LCReport {
    int n = 0;                       // vertex count the sequence belongs to
    int gamma = 0;                   // smallest index with nonzero coefficient
    std::vector<int> break_indices;  // k with d_k^2 < d_{k-1} * d_{k+1}, strict
    bool unimodal = false;
    int mode_first = 0;  // first index attaining the maximum
    int mode_last = 0;   // last index attaining the maximum
};

// Strict-inequality test: equality counts as log-concave. An internal zero
// flanked by a nonzero pair is a break (0 < positive); an all-zero window is
// not (0 < 0 fails).
inline LCReport analyze(const IntPoly& p, int n) {
    IntPoly d = p.padded(static_cast<std::size_t>(n) + 1);
    LCReport rep;
    rep.n = n;

    int gamma = -1;
    for (int j = 0; j <= n; ++j)
        if (d.c[j] != 0) {
            gamma = j;
            break;
        }
    if (gamma < 0)
        throw std::invalid_argument("analyze: all-zero sequence has no dominating sets");
    rep.gamma = gamma;

    for (int k = 1; k <= n - 1; ++k)
        if (d.c[k] * d.c[k] < d.c[k - 1] * d.c[k + 1]) rep.break_indices.push_back(k);

    int mode_first = 0;
    for (int j = 1; j <= n; ++j)
        if (d.c[j] > d.c[mode_first]) mode_first = j;
    int mode_last = mode_first;
    while (mode_last < n && d.c[mode_last + 1] == d.c[mode_first]) ++mode_last;
    rep.mode_first = mode_first;
    rep.mode_last = mode_last;

    // Unimodal iff no strict rise occurs after the first strict fall.
    bool fell = false;
    rep.unimodal = true;
    for (int j = 0; j < n; ++j) {
        if (d.c[j + 1] < d.c[j]) fell = true;
        else if (d.c[j + 1] > d.c[j] && fell) {
            rep.unimodal = false;
            break;
        }
    }
    return rep;
}

struct BoundViolation {
    std::string bound;  // which monotone range failed
    int index;          // k such that the claimed relation between d_k, d_{k+1} fails
    std::string lhs;
    std::string rhs;

    std::string describe() const {
        return bound + " violated at k=" + std::to_string(index) + ": d_k=" + lhs +
               ", d_{k+1}=" + rhs;
    }
};

// Known sizes of the smallest dominating set and of the largest *minimal*
// dominating set. gamma is derivable from the sequence itself; big_gamma is
// not, so the descending tree bound is only checked when the caller supplies
// it.
struct GammaCaps {
    std::optional<int> gamma;
    std::optional<int> big_gamma;
};

// Executable form of the proven monotone ranges:
//   every graph:          d_0 <= ... <= d_{ceil(n/2)}
//   no isolated vertices: d_{floor(3n/4)} >= ... >= d_n
//   tree:                 d_gamma <= ... <= d_{floor((n+2*gamma+1)/3)}
//   tree with Gamma:      d_{ceil((n+2*Gamma-2)/3)} >= ... >= d_n
// These are theorems, so on an exact domination polynomial the returned list
// is empty; anything else means the counting code (or the input) is broken.
inline std::vector<BoundViolation> check_bounds(const IntPoly& p, int n, bool is_tree,
                                                bool has_isolated,
                                                const GammaCaps& caps = {}) {
    IntPoly d = p.padded(static_cast<std::size_t>(n) + 1);
    std::vector<BoundViolation> out;

    auto ascend = [&](int lo, int hi, const char* name) {
        for (int k = std::max(lo, 0); k < std::min(hi, n); ++k)
            if (d.c[k] > d.c[k + 1])
                out.push_back({name, k, d.c[k].get_str(), d.c[k + 1].get_str()});
    };
    auto descend = [&](int lo, int hi, const char* name) {
        for (int k = std::max(lo, 0); k < std::min(hi, n); ++k)
            if (d.c[k] < d.c[k + 1])
                out.push_back({name, k, d.c[k].get_str(), d.c[k + 1].get_str()});
    };

    ascend(0, (n + 1) / 2, "first-half ascent");

    if (!has_isolated) descend((3 * n) / 4, n, "tail descent");

    if (is_tree) {
        int gamma = -1;
        for (int j = 0; j <= n; ++j)
            if (d.c[j] != 0) {
                gamma = j;
                break;
            }
        if (gamma < 0) throw std::invalid_argument("check_bounds: all-zero sequence");
        if (caps.gamma && *caps.gamma != gamma)
            out.push_back({"gamma mismatch", gamma, std::to_string(*caps.gamma),
                           std::to_string(gamma)});
        ascend(gamma, (n + 2 * gamma + 1) / 3, "tree ascent");
        if (caps.big_gamma) {
            int start = (n + 2 * *caps.big_gamma - 2 + 2) / 3;  // ceil
            descend(start, n, "tree descent");
        }
    }
    return out;
}

}  // namespace domlc
