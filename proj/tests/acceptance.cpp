// Acceptance suite: twelve end-to-end checks covering the oracle, the
// closed-form families, search, the polytope certificate, the sampler, and
// CLI determinism. One line per criterion; exits nonzero if any fail.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "domlc/analysis.hpp"
#include "domlc/dompoly.hpp"
#include "domlc/families.hpp"
#include "domlc/graph6.hpp"
#include "domlc/polytope.hpp"
#include "domlc/prufer.hpp"
#include "domlc/sampler.hpp"
#include "domlc/search.hpp"

namespace fs = std::filesystem;
using namespace domlc;

namespace {

int failures = 0;

void report(int idx, bool pass, const std::string& what) {
    std::printf("[%2d] %s  %s\n", idx, pass ? "pass" : "FAIL", what.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

// 1. Tree DP against the subset oracle on every labeled tree with n = 8.
void criterion_exhaustive() {
    const int n = 8;
    std::size_t total = 1;
    for (int i = 0; i < n - 2; ++i) total *= n;
    std::size_t mismatches = 0;
    PruferCode code(n - 2, 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t x = idx;
        for (int i = 0; i < n - 2; ++i) {
            code[i] = static_cast<int>(x % n);
            x /= n;
        }
        Tree t = prufer_decode(code, n);
        if (tree_dompoly_u64(t) != brute_force_counts(t.to_graph())) ++mismatches;
    }
    report(1, mismatches == 0,
           "tree DP equals the subset oracle on all " + std::to_string(total) +
               " labeled trees with n=8 (" + std::to_string(mismatches) + " mismatches)");
}

// 2. Rooted-state closed forms for the four gadgets, exact.
void criterion_gadget_states() {
    const IntPoly x = IntPoly::monomial(1);
    const IntPoly one_plus_x{BigInt(1), BigInt(1)};
    const IntPoly two_plus_x{BigInt(2), BigInt(1)};
    bool ok = true;

    {
        auto r = gadgets::build_L();
        StateTriple s = tree_states<BigInt>(r.tree, r.root);
        ok = ok && s.a == two_plus_x.shifted_up(2) && s.b == one_plus_x.shifted_up(1) &&
             s.c == x;
    }
    {
        auto r = gadgets::build_X();
        StateTriple s = tree_states<BigInt>(r.tree, r.root);
        ok = ok && s.a == one_plus_x.shifted_up(1) && s.b == x && s.c == IntPoly{};
    }
    for (int t = 1; t <= 10; ++t) {
        auto [P, Q, R] = pqr(t);
        auto r = gadgets::build_F(t);
        StateTriple s = tree_states<BigInt>(r.tree, r.root);
        ok = ok && s.a == Q.shifted_up(t + 1) && s.b == R.shifted_up(t + 1) &&
             s.c == pow(one_plus_x, t).shifted_up(t);
    }
    for (int t = 1; t <= 6; ++t) {
        auto [P, Q, R] = pqr(t);
        auto [U, V] = uv(t);
        auto r = gadgets::build_H(t);
        StateTriple s = tree_states<BigInt>(r.tree, r.root);
        ok = ok && s.a == U.shifted_up(3 * t + 1) && s.b == V.shifted_up(3 * t + 3) &&
             s.c == pow(R, 3).shifted_up(3 * t + 3);
    }
    report(2, ok,
           "rooted-state closed forms hold for the path, whisker, fan (t<=10), and "
           "triple-fan (t<=6) gadgets");
}

// 3. Caterpillar closed form vs DP, plus log-concavity, on random legged specs.
void criterion_caterpillars() {
    Rng rng(derive_seed(0, {0xca7}));
    int bad = 0;
    for (int i = 0; i < 500; ++i) {
        CaterpillarSpec spec;
        int spine = 1 + rng.next_index(6);
        for (int j = 0; j < spine; ++j) spec.legs.push_back(1 + rng.next_index(4));
        Tree t = build_caterpillar(spec);
        IntPoly closed = caterpillar_dompoly_closed(spec);
        if (closed != tree_dompoly(t) || !analyze(closed, t.n).break_indices.empty()) ++bad;
    }
    report(3, bad == 0,
           "caterpillar closed form matches the DP and has no log-concavity breaks on 500 "
           "random legged specs (" + std::to_string(bad) + " bad)");
}

// 4. Branch-tree domination number formula.
void criterion_wmt_gamma() {
    bool ok = true;
    for (int m = 1; m <= 3; ++m)
        for (int t = 1; t <= 6; ++t) {
            WmtSpec spec{m, t};
            IntPoly d = wmt_closed_dompoly(spec);
            ok = ok && analyze(d, spec.vertex_count()).gamma == m * (3 * t + 1) + 1 &&
                 wmt_gamma(spec) == m * (3 * t + 1) + 1;
        }
    report(4, ok, "branch-tree domination number equals m(3t+1)+1 for m<=3, t<=6");
}

// 5. First t with strict breaks at gamma+1, gamma+3, ..., gamma+2m-1.
void criterion_break_onset() {
    const int expected[4] = {0, 4, 5, 6};
    bool ok = true;
    std::string found_str;
    for (int m = 1; m <= 3; ++m) {
        int found = -1;
        for (int t = 1; t <= 60 && found < 0; ++t) {
            WmtSpec spec{m, t};
            LCReport rep = analyze(wmt_closed_dompoly(spec), spec.vertex_count());
            std::set<int> breaks(rep.break_indices.begin(), rep.break_indices.end());
            int gamma = wmt_gamma(spec);
            bool all = true;
            for (int j = 0; j < m; ++j) all = all && breaks.count(gamma + 2 * j + 1);
            if (all) found = t;
        }
        ok = ok && found == expected[m];
        found_str += (m > 1 ? ", " : "") + std::to_string(found);
    }
    report(5, ok,
           "strict breaks at gamma+1, gamma+3, ..., gamma+2m-1 first appear at t = " +
               found_str + " for m = 1, 2, 3");
}

// 6. Growth exponents of the three leading shifted coefficients.
void criterion_growth() {
    GrowthTable table = growth_exponents(1, 2, 18, 24);
    const double targets[3] = {0.0, 1.0, 3.0};
    double worst = 0.0;
    bool finite = true;
    for (std::size_t ri = 0; ri < table.r_values.size(); ++ri)
        for (double v : table.log2_ratio[ri]) {
            if (std::isnan(v)) finite = false;
            worst = std::max(worst, std::fabs(v - targets[table.r_values[ri]]));
        }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", worst);
    report(6, finite && worst <= 0.2,
           "log2 growth ratios stay within 0.2 of 0, 1, 3 for t in [18,24] (worst " +
               std::string(buf) + ")");
}

// 7+9 share the search-found 9-vertex graph.
Graph found_nine = Graph::empty(1);

// 7. Multi-start graph search recovers the unique break sequence at n = 9.
void criterion_graph_search() {
    std::vector<std::uint64_t> seeds(10);
    std::iota(seeds.begin(), seeds.end(), 1);
    MultiStartGraphReport rep = multi_start_graph(9, seeds, 50, 10000);
    found_nine = rep.best.graph;
    const std::vector<std::uint64_t> target{0, 0, 1, 7, 50, 89, 75, 35, 9, 1};
    bool ok = rep.best.sequence == target && rep.evaluations <= 10000;
    report(7, ok,
           "multi-start graph search at n=9 finds the sequence 0,0,1,7,50,89,75,35,9,1 "
           "within 10^4 evaluations (" + graph6_encode(rep.best.graph) + ", " +
               std::to_string(rep.evaluations) + " evals)");
}

// 8. Multi-start tree search reaches positive reward at n = 32.
void criterion_tree_search() {
    std::vector<std::uint64_t> seeds(10);
    std::iota(seeds.begin(), seeds.end(), 1);
    MultiStartTreeReport rep = multi_start_tree(32, seeds, 2000, 100000);
    bool ok = rep.best.reward > 0 && rep.evaluations <= 100000;
    report(8, ok,
           "multi-start tree search at n=32 reaches positive reward within 10^5 evaluations "
           "(reward " + rep.best.reward.get_str() + ", " + std::to_string(rep.evaluations) +
               " evals)");
}

// 9. Slice volumes against analytic values, plus violation-free certificates.
void criterion_polytope() {
    Graph k2 = Graph::from_edge_list(2, {{0, 1}});
    Graph p3 = Graph::from_edge_list(3, {{0, 1}, {1, 2}});
    bool ok = true;
    double worst_sigma = 0.0;

    auto analytic = [&](const Graph& g, double k, double truth, std::uint64_t seed) {
        SliceEstimate e = slice_volume(g, k, 1000000, seed, 1);
        if (e.std_error == 0.0) {
            ok = ok && e.estimate == truth;
            return;
        }
        double sigma = std::fabs(e.estimate - truth) / e.std_error;
        worst_sigma = std::max(worst_sigma, sigma);
        ok = ok && sigma <= 4.0;
    };
    for (double k : {1.0, 1.25, 1.5, 1.75}) analytic(k2, k, 2.0 - k, 11);
    analytic(p3, 1.5, 0.125, 12);

    std::size_t violations = 0;
    violations += lc_certificate(k2, {1.0, 1.25, 1.5, 1.75}, 200000, 13, 1).violations.size();
    violations +=
        lc_certificate(p3, {1.0, 1.25, 1.5, 1.75, 2.0}, 200000, 13, 1).violations.size();
    violations += lc_certificate(found_nine, {3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0}, 200000, 13, 1)
                      .violations.size();
    ok = ok && violations == 0;

    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", worst_sigma);
    report(9, ok,
           "slice volumes match analytic values within 4 sigma (worst " + std::string(buf) +
               ") and certificates report " + std::to_string(violations) + " violations");
}

// 10. Coefficient bounds as executable invariants on random objects.
void criterion_bounds() {
    int bad = 0;
    Rng pick(2024);
    for (int i = 0; i < 1000; ++i) {
        int n = 2 + pick.next_index(39);
        Tree t = random_tree(n, derive_seed(9000, {(std::uint64_t)i}));
        if (!check_bounds(tree_dompoly(t), n, true, false).empty()) ++bad;
    }
    Rng pick2(4048);
    for (int i = 0; i < 1000; ++i) {
        int n = 1 + pick2.next_index(12);
        Graph g = random_connected_graph(n, 0.3, derive_seed(17000, {(std::uint64_t)i}));
        if (!check_bounds(brute_force(g), n, false, g.has_isolated_vertex()).empty()) ++bad;
    }
    report(10, bad == 0,
           "coefficient bounds hold on 1000 random trees (n<=40) and 1000 random connected "
           "graphs (n<=12) (" + std::to_string(bad) + " violating objects)");
}

// 11. Sampler numerics: stochastic rows, equivariance, gradients, training.
AttentionParams bare_params(int dim, int heads, double beta, std::uint64_t seed) {
    Rng rng(seed);
    AttentionParams p;
    p.beta = beta;
    p.dim = dim;
    for (int j = 0; j < heads; ++j) {
        p.heads_a.push_back(detail::random_matrix(dim, dim, 1.0, rng));
        p.heads_b.push_back(detail::random_matrix(dim, dim, 1.0, rng));
    }
    return p;
}

void criterion_sampler() {
    bool rows_ok = true;
    {
        Rng rng(314);
        for (int iter = 0; iter < 200; ++iter) {
            int len = 1 + rng.next_index(12);
            Vec x(len);
            for (int i = 0; i < len; ++i) x[i] = (rng.next_unit() - 0.5) * 2e8;
            Vec p = softmax(x, 0.5 + rng.next_unit());
            rows_ok = rows_ok && std::abs(p.sum() - 1.0) < 1e-12;
            for (int i = 0; i < len; ++i) rows_ok = rows_ok && p[i] >= 0.0;
        }
    }

    bool equi_ok = true;
    {
        Rng rng(21);
        for (int iter = 0; iter < 25; ++iter) {
            int m = 2 + rng.next_index(6);
            int dim = 2 + rng.next_index(4);
            Mat y = detail::random_matrix(m, dim, 3.0, rng);
            AttentionParams p = bare_params(dim, 2, 0.7 + rng.next_unit(), rng.next_u64());
            std::vector<int> perm(m);
            std::iota(perm.begin(), perm.end(), 0);
            for (int i = m - 1; i > 0; --i) std::swap(perm[i], perm[rng.next_index(i + 1)]);
            Mat py(m, dim);
            for (int i = 0; i < m; ++i) py.row(i) = y.row(perm[i]);
            Mat lhs = attention_forward(py, p);
            Mat rhs = attention_forward(y, p);
            for (int i = 0; i < m; ++i)
                equi_ok = equi_ok && (lhs.row(i) - rhs.row(perm[i])).norm() < 1e-10;
        }
    }

    double worst_grad = 0.0;
    {
        const double h = 1e-4;
        Rng rng(20240814);
        auto rel_err = [](double analytic, double numeric) {
            return std::abs(analytic - numeric) / std::max(1.0, std::abs(numeric));
        };
        for (int iter = 0; iter < 20; ++iter) {
            Mat y = detail::random_matrix(4, 3, 2.0, rng);
            AttentionParams p = bare_params(3, 2, 0.5 + rng.next_unit(), rng.next_u64());
            Mat upstream = detail::random_matrix(4, 3, 2.0, rng);
            AttentionGrads g = attention_grad(y, p, upstream);
            auto loss = [&](const Mat& yy, const AttentionParams& pp) {
                return (upstream.array() * attention_forward(yy, pp).array()).sum();
            };
            for (int i = 0; i < y.rows(); ++i)
                for (int j = 0; j < y.cols(); ++j) {
                    Mat yp = y, ym = y;
                    yp(i, j) += h;
                    ym(i, j) -= h;
                    worst_grad = std::max(
                        worst_grad, rel_err(g.y(i, j), (loss(yp, p) - loss(ym, p)) / (2 * h)));
                }
            for (int head = 0; head < 2; ++head)
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) {
                        AttentionParams pp = p, pm = p;
                        pp.heads_a[head](i, j) += h;
                        pm.heads_a[head](i, j) -= h;
                        worst_grad = std::max(worst_grad,
                                              rel_err(g.heads_a[head](i, j),
                                                      (loss(y, pp) - loss(y, pm)) / (2 * h)));
                        pp = p;
                        pm = p;
                        pp.heads_b[head](i, j) += h;
                        pm.heads_b[head](i, j) -= h;
                        worst_grad = std::max(worst_grad,
                                              rel_err(g.heads_b[head](i, j),
                                                      (loss(y, pp) - loss(y, pm)) / (2 * h)));
                    }
        }
    }

    TokenDataset data;
    data.vocab = tree_vocab(10);
    data.sequences = {encode_prufer_tokens({4, 0, 2, 2, 6, 1, 3, 3}, 10)};
    TrainResult r = train(data, TrainHyper{});
    double final_loss = dataset_loss(r.params, data);

    bool ok = rows_ok && equi_ok && worst_grad <= 1e-5 && final_loss < std::log(2.0);
    char buf[96];
    std::snprintf(buf, sizeof buf, "grad err %.2e, train loss %.4f", worst_grad, final_loss);
    report(11, ok,
           "sampler: stochastic softmax rows, permutation equivariance, finite-difference "
           "gradients, memorization (" + std::string(buf) + ")");
}

// 12. CLI machine output across thread counts and manifest replay.
int shell(const std::string& cmd) {
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void criterion_cli_determinism() {
    fs::path dir = fs::temp_directory_path() / "domlc-acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "c5.json") << R"({"n":5,"edges":[[0,1],[1,2],[2,3],[3,4],[4,0]]})";

    auto cli = [&](const std::string& args) {
        return shell("cd '" + dir.string() + "' && '" DOMLC_BIN "' " + args +
                     " >/dev/null 2>&1");
    };
    bool ok = true;
    ok = ok && cli("dompoly --edge-list c5.json --threads 1 --out o1.json --manifest m.json") == 0;
    ok = ok && cli("dompoly --edge-list c5.json --threads 4 --out o4.json --manifest m4.json") == 0;
    std::string oracle_out = slurp(dir / "o1.json");
    ok = ok && !oracle_out.empty() && oracle_out == slurp(dir / "o4.json");

    fs::remove(dir / "o1.json");
    ok = ok && cli("rerun m.json") == 0 && slurp(dir / "o1.json") == oracle_out;

    std::string search =
        "search tree --n 6 --population 6 --epochs 2 --keep 0.5 --steps 10 --seed 11";
    ok = ok && cli(search + " --threads 1 --out s1.json --manifest ms.json") == 0;
    ok = ok && cli(search + " --threads 5 --out s5.json --manifest ms5.json") == 0;
    std::string search_out = slurp(dir / "s1.json");
    ok = ok && !search_out.empty() && search_out == slurp(dir / "s5.json");

    fs::remove(dir / "s1.json");
    ok = ok && cli("rerun ms.json") == 0 && slurp(dir / "s1.json") == search_out;

    report(12, ok,
           "CLI machine output is byte-identical across thread counts and manifest replays");
}

}  // namespace

int main() {
    criterion_exhaustive();
    criterion_gadget_states();
    criterion_caterpillars();
    criterion_wmt_gamma();
    criterion_break_onset();
    criterion_growth();
    criterion_graph_search();
    criterion_tree_search();
    criterion_polytope();
    criterion_bounds();
    criterion_sampler();
    criterion_cli_determinism();
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
