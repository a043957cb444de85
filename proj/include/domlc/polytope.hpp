#pragma once

// The closed-neighborhood polytope P(G) = {x in [0,1]^n : sum over N[v] of
// x_u >= 1 for every v} and Monte-Carlo estimates of its slice volumes
//   ~d_k(G) = Vol_{n-1}({x in P(G) : sum x_i = k}).
//
// Measure convention: the projected measure obtained by dropping the last
// coordinate. Draw (x_1..x_{n-1}) uniformly in the unit cube, reconstruct
// x_n = k - sum, and accept iff the point lies in P(G); the acceptance
// fraction is the estimate. This differs from the intrinsic Hausdorff
// measure of the slice by the constant factor sqrt(n), which cancels in
// every log-concavity ratio.
//
// The sampler tests constraints with a 1e-9 slack. Some slices lie entirely
// inside a constraint hyperplane (K2 at k=1: every point has x_0+x_1 = 1),
// where the reconstructed coordinate makes the sums land at 1 +- 1ulp and an
// exact test would reject half the slice. The slack inflates acceptance
// regions by O(1e-9) per facet, orders of magnitude below the Monte-Carlo
// standard error at any feasible sample count.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "domlc/graph.hpp"
#include "domlc/parallel.hpp"
#include "domlc/rng.hpp"

namespace domlc {

// Exact membership: x in [0,1]^n and every closed-neighborhood sum >= 1.
inline bool in_polytope(const Graph& g, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != g.n)
        throw std::invalid_argument("in_polytope: vector has " + std::to_string(x.size()) +
                                    " entries for an n=" + std::to_string(g.n) + " graph");
    for (double v : x)
        if (!(v >= 0.0 && v <= 1.0)) return false;
    for (int v = 0; v < g.n; ++v) {
        double s = 0.0;
        std::uint64_t mask = g.closed_nbhd[v];
        while (mask) {
            int u = __builtin_ctzll(mask);
            mask &= mask - 1;
            s += x[u];
        }
        if (!(s >= 1.0)) return false;
    }
    return true;
}

struct SliceEstimate {
    double k = 0.0;
    double estimate = 0.0;   // acceptance fraction, in [0,1]
    double std_error = 0.0;  // sqrt(p(1-p)/samples)
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
};

namespace detail {

constexpr double kBoundaryEps = 1e-9;

inline bool accept_slice_point(const Graph& g, const std::vector<double>& x) {
    for (int v = 0; v < g.n; ++v) {
        double s = 0.0;
        std::uint64_t mask = g.closed_nbhd[v];
        while (mask) {
            int u = __builtin_ctzll(mask);
            mask &= mask - 1;
            s += x[u];
        }
        if (s < 1.0 - kBoundaryEps) return false;
    }
    return true;
}

}  // namespace detail

// Rejection-sampling estimate of the projected slice measure. Samples are
// split into fixed 2^16-size chunks, each with an RNG stream keyed by
// (seed, chunk index); the accept counts are integers, so the merged result
// is identical for any worker count.
inline SliceEstimate slice_volume(const Graph& g, double k, std::int64_t samples,
                                  std::uint64_t seed, int threads = 1) {
    if (g.n < 2)
        throw std::invalid_argument("slice_volume: need n >= 2, got n=" + std::to_string(g.n));
    if (!(k >= 0.0 && k <= static_cast<double>(g.n)))
        throw std::invalid_argument("slice_volume: k must lie in [0,n]");
    if (samples < 1) throw std::invalid_argument("slice_volume: need samples >= 1");

    const std::int64_t chunk_size = std::int64_t{1} << 16;
    const std::size_t chunks = static_cast<std::size_t>((samples + chunk_size - 1) / chunk_size);
    std::vector<std::int64_t> accepted(chunks, 0);

    run_chunks(chunks, threads, [&](std::size_t chunk) {
        Rng rng(derive_seed(seed, {chunk}));
        std::int64_t quota =
            std::min(chunk_size, samples - static_cast<std::int64_t>(chunk) * chunk_size);
        std::vector<double> x(g.n);
        std::int64_t hits = 0;
        for (std::int64_t s = 0; s < quota; ++s) {
            double sum = 0.0;
            for (int i = 0; i + 1 < g.n; ++i) {
                x[i] = rng.next_unit();
                sum += x[i];
            }
            double last = k - sum;
            if (last < -detail::kBoundaryEps || last > 1.0 + detail::kBoundaryEps) continue;
            x[g.n - 1] = last;
            if (detail::accept_slice_point(g, x)) ++hits;
        }
        accepted[chunk] = hits;
    });

    std::int64_t total = 0;
    for (std::int64_t h : accepted) total += h;

    SliceEstimate est;
    est.k = k;
    est.samples = samples;
    est.seed = seed;
    est.estimate = static_cast<double>(total) / static_cast<double>(samples);
    est.std_error = std::sqrt(est.estimate * (1.0 - est.estimate) /
                              static_cast<double>(samples));
    return est;
}

struct SliceViolation {
    int index = 0;    // grid position of the middle slice
    double k = 0.0;   // its k value
    double deficit = 0.0;  // neighbors' product minus middle^2 (positive = violated)
    double sigma = 0.0;    // deficit / combined standard error
};

struct CertificateReport {
    std::vector<SliceEstimate> points;
    std::vector<SliceViolation> violations;
    double sigma_threshold = 3.0;
};

// Flags consecutive triples where middle^2 < left * right beyond the sigma
// threshold. The combined standard error comes from first-order propagation
// over independent estimates:
//   Var(ac - b^2) ~ (c se_a)^2 + (a se_c)^2 + (2b se_b)^2.
inline std::vector<SliceViolation> flag_violations(const std::vector<SliceEstimate>& points,
                                                   double sigma_threshold) {
    std::vector<SliceViolation> out;
    for (std::size_t i = 1; i + 1 < points.size(); ++i) {
        const SliceEstimate& a = points[i - 1];
        const SliceEstimate& b = points[i];
        const SliceEstimate& c = points[i + 1];
        double deficit = a.estimate * c.estimate - b.estimate * b.estimate;
        if (deficit <= 0.0) continue;
        double var = c.estimate * c.estimate * a.std_error * a.std_error +
                     a.estimate * a.estimate * c.std_error * c.std_error +
                     4.0 * b.estimate * b.estimate * b.std_error * b.std_error;
        double se = std::sqrt(var);
        if (se == 0.0 || deficit > sigma_threshold * se)
            out.push_back({static_cast<int>(i), b.k, deficit, se == 0.0 ? INFINITY : deficit / se});
    }
    return out;
}

// Estimates every grid slice with an independent derived stream (so the
// propagation formula's independence assumption holds), then applies
// flag_violations. The true slice volumes are log-concave by theorem, so a
// flagged triple means either a counting bug or a statistical fluke; 3 sigma
// keeps the per-grid false-alarm rate negligible.
inline CertificateReport lc_certificate(const Graph& g, const std::vector<double>& grid,
                                        std::int64_t samples, std::uint64_t seed,
                                        int threads = 1, double sigma_threshold = 3.0) {
    if (grid.empty()) throw std::invalid_argument("lc_certificate: empty grid");
    if (grid.size() >= 2) {
        double delta = grid[1] - grid[0];
        if (delta <= 0.0)
            throw std::invalid_argument("lc_certificate: grid must be strictly increasing");
        for (std::size_t i = 1; i + 1 < grid.size(); ++i)
            if (std::abs((grid[i + 1] - grid[i]) - delta) > 1e-9)
                throw std::invalid_argument("lc_certificate: grid spacing is not uniform");
    }

    CertificateReport report;
    report.sigma_threshold = sigma_threshold;
    for (std::size_t i = 0; i < grid.size(); ++i)
        report.points.push_back(slice_volume(g, grid[i], samples,
                                             derive_seed(seed, {std::uint64_t{i}}), threads));
    report.violations = flag_violations(report.points, sigma_threshold);
    return report;
}

}  // namespace domlc
