// domlc command-line tool. One subcommand per module: dompoly, construct,
// verify, search, polytope, sampler, plus rerun for manifest replay.
//
// Conventions: machine-readable JSON goes to stdout (or --out), human
// summaries go to stderr, and every run writes a manifest recording the
// exact argv, resolved configuration, library versions, and timestamps.
// Replaying a manifest reproduces the machine output byte for byte; nothing
// that depends on the thread count or the clock is ever written to stdout.
// Exact counts are serialized as decimal strings.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or input error.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "domlc/analysis.hpp"
#include "domlc/dompoly.hpp"
#include "domlc/families.hpp"
#include "domlc/graph.hpp"
#include "domlc/graph6.hpp"
#include "domlc/polytope.hpp"
#include "domlc/prufer.hpp"
#include "domlc/sampler.hpp"
#include "domlc/search.hpp"

namespace {

using json = nlohmann::json;
using namespace domlc;

constexpr const char* kToolVersion = "0.1.0";

// --- small serialization helpers -----------------------------------------

json poly_json(const IntPoly& p) {
    json arr = json::array();
    for (const BigInt& v : p.c) arr.push_back(v.get_str());
    return arr;
}

json hist_json(const std::vector<std::uint64_t>& hist) {
    json arr = json::array();
    for (std::uint64_t v : hist) arr.push_back(std::to_string(v));
    return arr;
}

json lc_json(const LCReport& r) {
    return json{{"gamma", r.gamma},
                {"break_indices", r.break_indices},
                {"unimodal", r.unimodal},
                {"mode_first", r.mode_first},
                {"mode_last", r.mode_last}};
}

json edges_json(const std::vector<std::pair<int, int>>& edges) {
    json arr = json::array();
    for (auto [u, v] : edges) arr.push_back(json::array({u, v}));
    return arr;
}

std::string prufer_text(const Tree& t) {
    std::string s;
    for (int v : prufer_encode(t)) {
        if (!s.empty()) s += ',';
        s += std::to_string(v);
    }
    return s;
}

json versions_json() {
    return json{{"domlc", kToolVersion},
                {"gmp", gmp_version},
                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                              std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION)},
                {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                      std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                      std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                {"cli11", CLI11_VERSION}};
}

std::string iso_utc(std::chrono::system_clock::time_point tp) {
    std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// --- input parsing --------------------------------------------------------

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::string tok;
    std::istringstream in(text);
    while (std::getline(in, tok, ',')) {
        if (tok.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(std::stoi(tok));
    }
    return out;
}

std::vector<double> parse_grid(const std::string& text) {
    double lo = 0, hi = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0) ||
        hi < lo)
        throw std::invalid_argument("grid: expected lo:hi:step with step > 0, got \"" + text +
                                    "\"");
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        double k = lo + i * step;
        if (k > hi + 1e-9) break;
        grid.push_back(k);
    }
    return grid;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

// Graph input shared by dompoly and polytope. Exactly one source must be set.
struct GraphInput {
    std::string graph6, edge_list, prufer;
};

Graph load_graph(const GraphInput& in, bool* came_from_prufer = nullptr) {
    if (came_from_prufer) *came_from_prufer = false;
    if (!in.graph6.empty()) return graph6_decode(in.graph6);
    if (!in.edge_list.empty()) {
        json j = json::parse(read_file(in.edge_list));
        int n = j.at("n").get<int>();
        std::vector<std::pair<int, int>> edges;
        for (const auto& e : j.at("edges"))
            edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        return Graph::from_edge_list(n, edges);
    }
    if (came_from_prufer) *came_from_prufer = true;
    std::vector<int> code = parse_int_list(in.prufer);
    return prufer_decode(code, static_cast<int>(code.size()) + 2).to_graph();
}

// --- run context: machine output plus manifest ----------------------------

struct RunCtx {
    std::vector<std::string> argv;
    std::string out_path;
    std::string manifest_path = "domlc-manifest.json";
    std::uint64_t seed = 0;
    int threads = 0;  // 0 = THREADS env or hardware default
    std::chrono::system_clock::time_point started = std::chrono::system_clock::now();
};

void add_common(CLI::App* cmd, RunCtx& ctx) {
    cmd->add_option("--seed", ctx.seed, "RNG seed");
    cmd->add_option("--threads", ctx.threads, "worker threads (0 = THREADS env or all cores)");
    cmd->add_option("--out", ctx.out_path, "write machine output to this file instead of stdout");
    cmd->add_option("--manifest", ctx.manifest_path, "manifest path");
}

void finish(const RunCtx& ctx, const std::string& command, json config, const json& payload,
            std::vector<std::string> outputs = {}) {
    std::string text = payload.dump(2) + "\n";
    if (ctx.out_path.empty()) {
        std::fputs(text.c_str(), stdout);
        outputs.insert(outputs.begin(), "stdout");
    } else {
        std::ofstream out(ctx.out_path, std::ios::binary);
        if (!out) throw std::invalid_argument("cannot write " + ctx.out_path);
        out << text;
        outputs.insert(outputs.begin(), ctx.out_path);
    }

    config["seed"] = ctx.seed;
    config["threads"] = ctx.threads;
    json manifest{{"command", ctx.argv},
                  {"subcommand", command},
                  {"config", std::move(config)},
                  {"seed", ctx.seed},
                  {"versions", versions_json()},
                  {"started", iso_utc(ctx.started)},
                  {"finished", iso_utc(std::chrono::system_clock::now())},
                  {"outputs", outputs}};
    std::ofstream m(ctx.manifest_path, std::ios::binary);
    if (!m) throw std::invalid_argument("cannot write " + ctx.manifest_path);
    m << manifest.dump(2) << "\n";
}

// --- dompoly ---------------------------------------------------------------

int run_dompoly(const RunCtx& ctx, const GraphInput& input) {
    bool from_prufer = false;
    Graph g = load_graph(input, &from_prufer);
    IntPoly d;
    std::string method;
    if (from_prufer || g.is_tree()) {
        Tree t = Tree::from_edges(g.n, g.edges());
        d = tree_dompoly(t);
        method = "tree-dp";
    } else {
        BruteForceOptions opts;
        opts.threads = ctx.threads;
        d = brute_force(g, opts);
        method = "brute-force";
    }
    LCReport rep = analyze(d, g.n);

    json payload{{"command", "dompoly"},
                 {"n", g.n},
                 {"method", method},
                 {"sequence", poly_json(d)},
                 {"analysis", lc_json(rep)}};
    std::fprintf(stderr, "n=%d method=%s gamma=%d breaks=%zu unimodal=%s\n", g.n,
                 method.c_str(), rep.gamma, rep.break_indices.size(),
                 rep.unimodal ? "yes" : "no");

    json config{{"graph6", input.graph6}, {"edge_list", input.edge_list},
                {"prufer", input.prufer}};
    finish(ctx, "dompoly", std::move(config), payload);
    return 0;
}

// --- construct ---------------------------------------------------------------

int run_construct_caterpillar(const RunCtx& ctx, const std::string& legs_text) {
    CaterpillarSpec spec{parse_int_list(legs_text)};
    Tree t = build_caterpillar(spec);
    IntPoly d = caterpillar_dompoly_closed(spec);
    LCReport rep = analyze(d, t.n);

    json payload{{"command", "construct"},
                 {"family", "caterpillar"},
                 {"legs", spec.legs},
                 {"n", t.n},
                 {"sequence", poly_json(d)},
                 {"analysis", lc_json(rep)},
                 {"edges", edges_json(t.edges)},
                 {"prufer", prufer_text(t)}};
    std::fprintf(stderr, "caterpillar: n=%d gamma=%d breaks=%zu\n", t.n, rep.gamma,
                 rep.break_indices.size());
    finish(ctx, "construct", json{{"family", "caterpillar"}, {"legs", spec.legs}}, payload);
    return 0;
}

int run_construct_wmt(const RunCtx& ctx, int m, int t) {
    WmtSpec spec{m, t};
    Tree tree = build_wmt(spec);
    IntPoly d = wmt_closed_dompoly(spec);
    LCReport rep = analyze(d, tree.n);

    json payload{{"command", "construct"},
                 {"family", "wmt"},
                 {"m", m},
                 {"t", t},
                 {"n", tree.n},
                 {"gamma", wmt_gamma(spec)},
                 {"sequence", poly_json(d)},
                 {"analysis", lc_json(rep)},
                 {"edges", edges_json(tree.edges)},
                 {"prufer", prufer_text(tree)}};
    std::fprintf(stderr, "W_{%d,%d}: n=%d gamma=%d breaks=%zu\n", m, t, tree.n, rep.gamma,
                 rep.break_indices.size());
    finish(ctx, "construct", json{{"family", "wmt"}, {"m", m}, {"t", t}}, payload);
    return 0;
}

// --- verify -----------------------------------------------------------------

struct CheckList {
    json checks = json::array();
    bool all_pass = true;

    void add(const std::string& name, bool pass, json extra = json::object()) {
        extra["name"] = name;
        extra["pass"] = pass;
        checks.push_back(std::move(extra));
        all_pass = all_pass && pass;
        std::fprintf(stderr, "  [%s] %s\n", pass ? "pass" : "FAIL", name.c_str());
    }
};

int finish_verify(const RunCtx& ctx, const std::string& suite, json config, CheckList& list,
                  json extra = json::object()) {
    json payload{{"command", "verify"},
                 {"suite", suite},
                 {"checks", std::move(list.checks)},
                 {"pass", list.all_pass}};
    for (auto& [k, v] : extra.items()) payload[k] = v;
    config["suite"] = suite;
    finish(ctx, "verify", std::move(config), payload);
    return list.all_pass ? 0 : 1;
}

int run_verify_lemmas(const RunCtx& ctx, int t_max_fan, int t_max_triple, int caterpillars) {
    CheckList list;
    const IntPoly x = IntPoly::monomial(1);
    const IntPoly one_plus_x{BigInt(1), BigInt(1)};
    const IntPoly two_plus_x{BigInt(2), BigInt(1)};

    {
        auto r = gadgets::build_L();
        StateTriple s = tree_states<BigInt>(r.tree, r.root);
        bool ok = s.a == two_plus_x.shifted_up(2) && s.b == one_plus_x.shifted_up(1) &&
                  s.c == x;
        list.add("three-path rooted states", ok);
    }
    {
        auto r = gadgets::build_X();
        StateTriple s = tree_states<BigInt>(r.tree, r.root);
        bool ok = s.a == one_plus_x.shifted_up(1) && s.b == x && s.c == IntPoly{};
        list.add("whisker deferred state vanishes", ok);
    }
    {
        bool ok = true;
        for (int t = 1; t <= t_max_fan; ++t) {
            auto [P, Q, R] = pqr(t);
            auto r = gadgets::build_F(t);
            StateTriple s = tree_states<BigInt>(r.tree, r.root);
            ok = ok && s.a == Q.shifted_up(t + 1) && s.b == R.shifted_up(t + 1) &&
                 s.c == pow(one_plus_x, t).shifted_up(t);
        }
        list.add("fan rooted states", ok, {{"t_max", t_max_fan}});
    }
    {
        bool ok = true;
        for (int t = 1; t <= t_max_triple; ++t) {
            auto [P, Q, R] = pqr(t);
            auto [U, V] = uv(t);
            auto r = gadgets::build_H(t);
            StateTriple s = tree_states<BigInt>(r.tree, r.root);
            ok = ok && s.a == U.shifted_up(3 * t + 1) && s.b == V.shifted_up(3 * t + 3) &&
                 s.c == pow(R, 3).shifted_up(3 * t + 3);
        }
        list.add("triple-fan rooted states", ok, {{"t_max", t_max_triple}});
    }
    {
        bool ok = true;
        for (int t = 0; t <= 30; ++t) {
            auto [P, Q, R] = pqr(t);
            ok = ok && R.shifted_up(1) + pow(one_plus_x, t) == P;
        }
        list.add("remainder identity", ok);
    }
    {
        bool ok = true;
        Rng rng(derive_seed(ctx.seed, {0xca7}));
        for (int i = 0; i < caterpillars && ok; ++i) {
            CaterpillarSpec spec;
            int spine = 1 + rng.next_index(6);
            for (int j = 0; j < spine; ++j) spec.legs.push_back(1 + rng.next_index(4));
            IntPoly closed = caterpillar_dompoly_closed(spec);
            Tree t = build_caterpillar(spec);
            ok = closed == tree_dompoly(t) &&
                 analyze(closed, t.n).break_indices.empty();
        }
        list.add("caterpillar closed form and log-concavity", ok, {{"cases", caterpillars}});
    }
    {
        bool ok = true;
        for (auto [m, t] : {std::pair{1, 1}, {1, 2}, {2, 1}, {2, 2}, {3, 1}}) {
            WmtSpec spec{m, t};
            ok = ok && wmt_closed_dompoly(spec) == tree_dompoly(build_wmt(spec));
        }
        list.add("branch-tree closed form", ok);
    }
    return finish_verify(ctx, "lemmas", json{{"caterpillars", caterpillars}}, list);
}

int run_verify_thm_main(const RunCtx& ctx, int m_arg, int t_max) {
    CheckList list;
    json results = json::array();
    std::vector<int> ms = m_arg > 0 ? std::vector<int>{m_arg} : std::vector<int>{1, 2, 3};
    for (int m : ms) {
        int found = -1;
        json detail;
        for (int t = 1; t <= t_max && found < 0; ++t) {
            WmtSpec spec{m, t};
            IntPoly d = wmt_closed_dompoly(spec);
            int gamma = wmt_gamma(spec);
            LCReport rep = analyze(d, spec.vertex_count());
            std::set<int> breaks(rep.break_indices.begin(), rep.break_indices.end());
            bool all = true;
            for (int j = 0; j < m; ++j) all = all && breaks.count(gamma + 2 * j + 1);
            if (all) {
                found = t;
                detail = json{{"m", m},
                              {"t_min", t},
                              {"n", spec.vertex_count()},
                              {"gamma", gamma},
                              {"break_indices", rep.break_indices}};
            }
        }
        if (found < 0) detail = json{{"m", m}, {"t_min", nullptr}};
        results.push_back(detail);
        list.add("breaks at gamma+1,3,..,2m-1 for m=" + std::to_string(m), found > 0,
                 {{"t_min", found > 0 ? json(found) : json(nullptr)}});
    }
    return finish_verify(ctx, "thm-main", json{{"m", m_arg}, {"t_max", t_max}}, list,
                         json{{"results", results}});
}

int run_verify_growth(const RunCtx& ctx, int m, const std::string& t_range, double tol) {
    auto dots = t_range.find("..");
    if (dots == std::string::npos)
        throw std::invalid_argument("growth: --t expects lo..hi, got \"" + t_range + "\"");
    int t_lo = std::stoi(t_range.substr(0, dots));
    int t_hi = std::stoi(t_range.substr(dots + 2));

    GrowthTable table = growth_exponents(m, std::min(2, 2 * m), t_lo, t_hi);
    const double targets[3] = {0.0, 1.0, 3.0};
    CheckList list;
    json rows = json::array();
    for (std::size_t ri = 0; ri < table.r_values.size(); ++ri) {
        int r = table.r_values[ri];
        double worst = 0.0;
        for (double v : table.log2_ratio[ri])
            worst = std::max(worst, std::fabs(v - targets[r]));
        rows.push_back(json{{"r", r},
                            {"target", targets[r]},
                            {"log2_ratios", table.log2_ratio[ri]},
                            {"max_abs_error", worst}});
        list.add("growth exponent r=" + std::to_string(r), worst <= tol,
                 {{"max_abs_error", worst}, {"tolerance", tol}});
    }
    return finish_verify(ctx, "growth",
                         json{{"m", m}, {"t", t_range}, {"tolerance", tol}}, list,
                         json{{"rows", rows}, {"t_values", table.t_values}});
}

int run_verify_polytope(const RunCtx& ctx, long samples, long cert_samples, double sigma,
                        const std::string& extra_graph6, const std::string& extra_grid) {
    CheckList list;
    Graph k2 = Graph::from_edge_list(2, {{0, 1}});
    Graph p3 = Graph::from_edge_list(3, {{0, 1}, {1, 2}});

    auto analytic = [&](const Graph& g, double k, double truth, std::uint64_t seed) {
        SliceEstimate e = slice_volume(g, k, samples, seed, ctx.threads);
        double err = std::fabs(e.estimate - truth);
        bool pass = e.std_error > 0 ? err <= sigma * e.std_error : err == 0.0;
        return std::pair{pass, json{{"k", k},
                                    {"estimate", e.estimate},
                                    {"expected", truth},
                                    {"std_error", e.std_error}}};
    };

    {
        bool ok = true;
        json points = json::array();
        int i = 0;
        for (double k : {1.0, 1.25, 1.5, 1.75}) {
            auto [pass, detail] = analytic(k2, k, 2.0 - k, derive_seed(ctx.seed, {1, (std::uint64_t)i++}));
            ok = ok && pass;
            points.push_back(std::move(detail));
        }
        list.add("two-vertex slice matches 2-k", ok, {{"points", points}});
    }
    {
        auto [pass, detail] = analytic(p3, 1.5, 0.125, derive_seed(ctx.seed, {2}));
        list.add("three-path slice at k=1.5 matches 1/8", pass, {{"point", detail}});
    }
    auto cert = [&](const Graph& g, const std::vector<double>& grid, const std::string& name,
                    std::uint64_t seed) {
        CertificateReport r = lc_certificate(g, grid, cert_samples, seed, ctx.threads);
        list.add(name, r.violations.empty(),
                 {{"grid_points", grid.size()}, {"violations", r.violations.size()}});
    };
    cert(k2, {1.0, 1.25, 1.5, 1.75}, "two-vertex certificate", derive_seed(ctx.seed, {3}));
    cert(p3, {1.0, 1.25, 1.5, 1.75, 2.0}, "three-path certificate", derive_seed(ctx.seed, {4}));
    if (!extra_graph6.empty()) {
        Graph g = graph6_decode(extra_graph6);
        cert(g, parse_grid(extra_grid), "certificate for " + extra_graph6,
             derive_seed(ctx.seed, {5}));
    }
    return finish_verify(ctx, "polytope",
                         json{{"samples", samples},
                              {"cert_samples", cert_samples},
                              {"sigma", sigma},
                              {"graph6", extra_graph6}},
                         list);
}

int run_verify_bounds(const RunCtx& ctx, int trees, int tree_n, int graphs, int graph_n,
                      double edge_prob) {
    CheckList list;
    {
        int bad = 0;
        Rng pick(derive_seed(ctx.seed, {0xb1}));
        for (int i = 0; i < trees; ++i) {
            int n = 2 + pick.next_index(tree_n - 1);
            Tree t = random_tree(n, derive_seed(ctx.seed, {0xb2, (std::uint64_t)i}));
            if (!check_bounds(tree_dompoly(t), n, true, false).empty()) ++bad;
        }
        list.add("tree bounds", bad == 0, {{"cases", trees}, {"violations", bad}});
    }
    {
        int bad = 0;
        Rng pick(derive_seed(ctx.seed, {0xb3}));
        BruteForceOptions opts;
        opts.threads = ctx.threads;
        for (int i = 0; i < graphs; ++i) {
            int n = 1 + pick.next_index(graph_n);
            Graph g =
                random_connected_graph(n, edge_prob, derive_seed(ctx.seed, {0xb4, (std::uint64_t)i}));
            if (!check_bounds(brute_force(g, opts), n, false, g.has_isolated_vertex()).empty())
                ++bad;
        }
        list.add("connected graph bounds", bad == 0, {{"cases", graphs}, {"violations", bad}});
    }
    return finish_verify(ctx, "bounds",
                         json{{"trees", trees},
                              {"tree_n", tree_n},
                              {"graphs", graphs},
                              {"graph_n", graph_n},
                              {"edge_prob", edge_prob}},
                         list);
}

// --- search -----------------------------------------------------------------

int run_search(const RunCtx& ctx, SearchConfig cfg, const std::string& log_path) {
    cfg.seed = ctx.seed;
    cfg.threads = ctx.threads;

    std::ofstream log_file;
    std::ostream* log = nullptr;
    if (!log_path.empty()) {
        log_file.open(log_path, std::ios::binary);
        if (!log_file) throw std::invalid_argument("cannot write " + log_path);
        log = &log_file;
    }
    PipelineResult r = run_pipeline(cfg, log);

    const bool graph_mode = cfg.mode == SearchMode::graph;
    json population = json::array();
    auto emit = [&](const std::string& object, const auto& cand) {
        population.push_back(json{{"object", object},
                                  {"reward", cand.reward.get_str()},
                                  {"lineage", cand.lineage}});
    };
    for (const auto& c : r.graphs) emit(graph6_encode(c.graph), c);
    for (const auto& c : r.trees) emit(prufer_text(c.tree), c);

    json config{{"mode", graph_mode ? "graph" : "tree"},
                {"n", cfg.n},
                {"population_size", cfg.population_size},
                {"epochs", cfg.epochs},
                {"local_search_steps", cfg.local_search_steps},
                {"keep_fraction", cfg.keep_fraction},
                {"sampler", cfg.sampler == SamplerKind::attention ? "attention" : "none"},
                {"reward_window",
                 cfg.reward_window == RewardWindow::best ? "best" : "gamma"},
                {"edge_prob", cfg.edge_prob}};
    json payload{{"command", "search"},
                 {"config", config},
                 {"seed", ctx.seed},
                 {"best",
                  json{{"object", r.best_object},
                       {"reward", r.best_reward.get_str()},
                       {"sequence", hist_json(r.best_sequence)}}},
                 {"population", population},
                 {"evaluations", r.evaluations},
                 {"invalid_samples", r.invalid_samples}};
    std::fprintf(stderr, "search %s n=%d: best reward %s after %lld evaluations\n",
                 graph_mode ? "graph" : "tree", cfg.n, r.best_reward.get_str().c_str(),
                 (long long)r.evaluations);

    config["log"] = log_path;
    std::vector<std::string> outputs;
    if (!log_path.empty()) outputs.push_back(log_path);
    finish(ctx, "search", std::move(config), payload, std::move(outputs));
    return 0;
}

// --- polytope ----------------------------------------------------------------

int run_polytope(const RunCtx& ctx, const GraphInput& input, const std::string& grid_text,
                 long samples, double sigma) {
    Graph g = load_graph(input);
    std::vector<double> grid = parse_grid(grid_text);
    CertificateReport r = lc_certificate(g, grid, samples, ctx.seed, ctx.threads, sigma);

    json points = json::array();
    for (const SliceEstimate& e : r.points)
        points.push_back(json{{"k", e.k},
                              {"estimate", e.estimate},
                              {"std_error", e.std_error},
                              {"samples", e.samples},
                              {"seed", e.seed}});
    json violations = json::array();
    for (const SliceViolation& v : r.violations)
        violations.push_back(
            json{{"index", v.index}, {"k", v.k}, {"deficit", v.deficit}, {"sigma", v.sigma}});
    json payload{{"command", "polytope"},
                 {"n", g.n},
                 {"sigma_threshold", r.sigma_threshold},
                 {"points", points},
                 {"violations", violations}};
    for (const SliceEstimate& e : r.points)
        std::fprintf(stderr, "k=%-6.3f estimate=%.6f +- %.6f\n", e.k, e.estimate, e.std_error);
    std::fprintf(stderr, "%zu violation(s) at %.1f sigma\n", r.violations.size(), sigma);

    finish(ctx, "polytope",
           json{{"graph6", input.graph6}, {"edge_list", input.edge_list},
                {"prufer", input.prufer}, {"grid", grid_text}, {"samples", samples},
                {"sigma", sigma}},
           payload);
    return 0;
}

// --- sampler -------------------------------------------------------------------

TokenDataset load_dataset(const std::string& path) {
    std::string body = read_file(path);
    TokenDataset data;
    if (json::accept(body)) {
        json j = json::parse(body);
        data.vocab = j.at("vocab").get<int>();
        for (const auto& seq : j.at("sequences"))
            data.sequences.push_back(seq.get<std::vector<int>>());
        return data;
    }
    // Prufer text: one comma-separated code per line, all for the same n.
    std::istringstream in(body);
    std::string line;
    int n = -1;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<int> code = parse_int_list(line);
        int line_n = static_cast<int>(code.size()) + 2;
        if (n < 0) n = line_n;
        if (line_n != n)
            throw std::invalid_argument("dataset: mixed code lengths in " + path);
        data.sequences.push_back(encode_prufer_tokens(code, n));
    }
    if (n < 0) throw std::invalid_argument("dataset: no sequences in " + path);
    data.vocab = tree_vocab(n);
    return data;
}

int run_sampler_train(const RunCtx& ctx, const std::string& data_path,
                      const std::string& checkpoint_path, const std::string& loss_log_path,
                      TrainHyper hyper) {
    TokenDataset data = load_dataset(data_path);
    if (hyper.context == 0)
        for (const auto& s : data.sequences)
            hyper.context = std::max(hyper.context, static_cast<int>(s.size()));
    hyper.seed = ctx.seed;
    TrainResult result = train(data, hyper);

    {
        std::ofstream out(checkpoint_path, std::ios::binary);
        if (!out) throw std::invalid_argument("cannot write " + checkpoint_path);
        out << params_to_json(result.params).dump(2) << "\n";
    }
    std::vector<std::string> outputs{checkpoint_path};
    if (!loss_log_path.empty()) {
        std::ofstream out(loss_log_path, std::ios::binary);
        if (!out) throw std::invalid_argument("cannot write " + loss_log_path);
        for (std::size_t i = 0; i < result.loss_log.size(); ++i)
            out << json{{"step", i}, {"loss", result.loss_log[i]}}.dump() << "\n";
        outputs.push_back(loss_log_path);
    }

    json payload{{"command", "sampler-train"},
                 {"vocab", data.vocab},
                 {"sequences", data.sequences.size()},
                 {"steps", hyper.steps},
                 {"context", hyper.context},
                 {"first_loss", result.loss_log.empty() ? json(nullptr)
                                                        : json(result.loss_log.front())},
                 {"final_loss", dataset_loss(result.params, data)},
                 {"checkpoint", checkpoint_path}};
    std::fprintf(stderr, "trained %d steps on %zu sequences, final loss %.6f\n", hyper.steps,
                 data.sequences.size(), payload["final_loss"].get<double>());

    finish(ctx, "sampler-train",
           json{{"data", data_path}, {"checkpoint", checkpoint_path},
                {"loss_log", loss_log_path}, {"lr", hyper.lr}, {"steps", hyper.steps},
                {"context", hyper.context}, {"dim", hyper.dim}, {"heads", hyper.heads},
                {"beta", hyper.beta}},
           payload, std::move(outputs));
    return 0;
}

int run_sampler_sample(const RunCtx& ctx, const std::string& checkpoint_path, int count,
                       double output_beta, const std::string& decode, int decode_n) {
    AttentionParams params = params_from_json(json::parse(read_file(checkpoint_path)));
    std::optional<double> beta;
    if (output_beta > 0) beta = output_beta;
    std::vector<SampledSequence> samples = sample_tokens(params, count, ctx.seed, beta);

    int invalid = 0;
    json arr = json::array();
    for (const SampledSequence& s : samples) {
        json entry{{"tokens", s.tokens}, {"ended", s.ended}};
        if (decode == "tree") {
            auto t = s.ended ? decode_prufer_tokens(s.tokens, decode_n) : std::nullopt;
            entry["decoded"] = t ? json(prufer_text(*t)) : json(nullptr);
            if (!t) ++invalid;
        } else if (decode == "graph") {
            auto g = s.ended ? decode_adjacency_tokens(s.tokens, decode_n) : std::nullopt;
            entry["decoded"] = g ? json(graph6_encode(*g)) : json(nullptr);
            if (!g) ++invalid;
        }
        arr.push_back(std::move(entry));
    }
    json payload{{"command", "sampler-sample"},
                 {"count", count},
                 {"samples", arr},
                 {"invalid", decode == "none" ? json(nullptr) : json(invalid)}};
    std::fprintf(stderr, "sampled %d sequence(s), %d invalid\n", count, invalid);

    finish(ctx, "sampler-sample",
           json{{"checkpoint", checkpoint_path}, {"count", count},
                {"output_beta", output_beta}, {"decode", decode}, {"decode_n", decode_n}},
           payload);
    return 0;
}

// --- rerun ---------------------------------------------------------------------

int dispatch(std::vector<std::string> args);

int run_rerun(const std::string& manifest_path) {
    json manifest = json::parse(read_file(manifest_path));
    std::vector<std::string> argv = manifest.at("command").get<std::vector<std::string>>();
    if (!argv.empty() && argv[0] == "rerun")
        throw std::invalid_argument("rerun: refusing to replay another rerun");
    return dispatch(std::move(argv));
}

// --- dispatch --------------------------------------------------------------------

int dispatch(std::vector<std::string> args) {
    CLI::App app{"exact domination-sequence toolkit"};
    app.require_subcommand(1);
    int rc = 0;

    RunCtx ctx;
    ctx.argv = args;

    // dompoly
    GraphInput dp_in;
    auto* dompoly = app.add_subcommand("dompoly", "domination sequence of one graph or tree");
    auto* dp_g6 = dompoly->add_option("--graph6", dp_in.graph6, "graph6 text");
    auto* dp_el = dompoly->add_option("--edge-list", dp_in.edge_list, "JSON edge list file");
    auto* dp_pr = dompoly->add_option("--prufer", dp_in.prufer, "comma-separated Prufer code");
    dp_g6->excludes(dp_el)->excludes(dp_pr);
    dp_el->excludes(dp_pr);
    add_common(dompoly, ctx);
    dompoly->callback([&] {
        if (dp_g6->count() + dp_el->count() + dp_pr->count() != 1)
            throw CLI::ValidationError("dompoly", "need exactly one of --graph6, --edge-list, --prufer");
        rc = run_dompoly(ctx, dp_in);
    });

    // construct
    auto* construct = app.add_subcommand("construct", "build a tree family member");
    construct->require_subcommand(1);
    std::string legs = "1";
    auto* cat = construct->add_subcommand("caterpillar", "legged caterpillar");
    cat->add_option("--legs", legs, "comma-separated leg counts per spine vertex");
    add_common(cat, ctx);
    cat->callback([&] { rc = run_construct_caterpillar(ctx, legs); });
    int wm = 1, wt = 1;
    auto* wmt = construct->add_subcommand("wmt", "branch tree with gamma = m(3t+1)+1");
    wmt->add_option("--m", wm, "branch count");
    wmt->add_option("--t", wt, "fan width");
    add_common(wmt, ctx);
    wmt->callback([&] { rc = run_construct_wmt(ctx, wm, wt); });

    // verify
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->require_subcommand(1);

    int t_max_fan = 10, t_max_triple = 6, caterpillars = 500;
    auto* lemmas = verify->add_subcommand("lemmas", "closed forms vs tree DP");
    lemmas->add_option("--t-max-fan", t_max_fan, "fan sizes to check");
    lemmas->add_option("--t-max-triple", t_max_triple, "triple-fan sizes to check");
    lemmas->add_option("--caterpillars", caterpillars, "random caterpillar cases");
    add_common(lemmas, ctx);
    lemmas->callback([&] { rc = run_verify_lemmas(ctx, t_max_fan, t_max_triple, caterpillars); });

    int vm = 0, vt_max = 60;
    auto* thm = verify->add_subcommand("thm-main", "first t with all prescribed breaks");
    thm->add_option("--m", vm, "branch count (0 = 1..3)");
    thm->add_option("--t-max", vt_max, "largest t to scan");
    add_common(thm, ctx);
    thm->callback([&] { rc = run_verify_thm_main(ctx, vm, vt_max); });

    int gm = 1;
    std::string g_range = "18..24";
    double g_tol = 0.2;
    auto* growth = verify->add_subcommand("growth", "coefficient growth exponents");
    growth->add_option("--m", gm, "branch count");
    growth->add_option("--t", g_range, "t window lo..hi");
    growth->add_option("--tol", g_tol, "allowed deviation from the limit exponents");
    add_common(growth, ctx);
    growth->callback([&] { rc = run_verify_growth(ctx, gm, g_range, g_tol); });

    long vp_samples = 1000000, vp_cert = 200000;
    double vp_sigma = 4.0;
    std::string vp_g6, vp_grid = "3.0:6.0:0.5";
    auto* vpoly = verify->add_subcommand("polytope", "slice volumes vs analytic values");
    vpoly->add_option("--samples", vp_samples, "samples per analytic point");
    vpoly->add_option("--cert-samples", vp_cert, "samples per certificate point");
    vpoly->add_option("--sigma", vp_sigma, "analytic tolerance in standard errors");
    vpoly->add_option("--graph6", vp_g6, "extra graph to certify");
    vpoly->add_option("--grid", vp_grid, "grid for the extra certificate");
    add_common(vpoly, ctx);
    vpoly->callback(
        [&] { rc = run_verify_polytope(ctx, vp_samples, vp_cert, vp_sigma, vp_g6, vp_grid); });

    int vb_trees = 1000, vb_tree_n = 40, vb_graphs = 1000, vb_graph_n = 12;
    double vb_p = 0.3;
    auto* vbounds = verify->add_subcommand("bounds", "coefficient bounds on random objects");
    vbounds->add_option("--trees", vb_trees, "random tree cases");
    vbounds->add_option("--tree-n", vb_tree_n, "max tree size");
    vbounds->add_option("--graphs", vb_graphs, "random connected graph cases");
    vbounds->add_option("--graph-n", vb_graph_n, "max graph size");
    vbounds->add_option("--edge-prob", vb_p, "edge probability for random graphs");
    add_common(vbounds, ctx);
    vbounds->callback(
        [&] { rc = run_verify_bounds(ctx, vb_trees, vb_tree_n, vb_graphs, vb_graph_n, vb_p); });

    // search
    auto* search = app.add_subcommand("search", "reward-driven population search");
    search->require_subcommand(1);
    SearchConfig scfg;
    std::string s_log, s_sampler = "none", s_window = "gamma";
    auto add_search_options = [&](CLI::App* cmd) {
        cmd->add_option("--n", scfg.n, "object size");
        cmd->add_option("--population", scfg.population_size, "population per epoch");
        cmd->add_option("--epochs", scfg.epochs, "epoch count");
        cmd->add_option("--steps", scfg.local_search_steps, "local search steps per member");
        cmd->add_option("--keep", scfg.keep_fraction, "fraction retained per epoch");
        cmd->add_option("--sampler", s_sampler, "none or attention")
            ->check(CLI::IsMember({"none", "attention"}));
        cmd->add_option("--window", s_window, "reward window: gamma or best")
            ->check(CLI::IsMember({"gamma", "best"}));
        cmd->add_option("--edge-prob", scfg.edge_prob, "random graph start density");
        cmd->add_option("--log", s_log, "JSONL epoch log path");
        cmd->add_option("--sampler-steps", scfg.sampler_hyper.steps, "training steps per epoch");
        cmd->add_option("--sampler-lr", scfg.sampler_hyper.lr, "training learning rate");
        cmd->add_option("--sampler-dim", scfg.sampler_hyper.dim, "embedding dimension");
        cmd->add_option("--sampler-heads", scfg.sampler_hyper.heads, "attention heads");
        cmd->add_option("--sampler-beta", scfg.sampler_hyper.beta, "softmax inverse temperature");
        add_common(cmd, ctx);
    };
    auto* sg = search->add_subcommand("graph", "search simple graphs");
    add_search_options(sg);
    sg->callback([&] {
        scfg.mode = SearchMode::graph;
        scfg.sampler = s_sampler == "attention" ? SamplerKind::attention : SamplerKind::none;
        scfg.reward_window = s_window == "best" ? RewardWindow::best : RewardWindow::gamma;
        rc = run_search(ctx, scfg, s_log);
    });
    auto* st = search->add_subcommand("tree", "search labeled trees");
    add_search_options(st);
    st->callback([&] {
        scfg.mode = SearchMode::tree;
        scfg.sampler = s_sampler == "attention" ? SamplerKind::attention : SamplerKind::none;
        scfg.reward_window = s_window == "best" ? RewardWindow::best : RewardWindow::gamma;
        rc = run_search(ctx, scfg, s_log);
    });

    // polytope
    GraphInput pt_in;
    std::string pt_grid;
    long pt_samples = 100000;
    double pt_sigma = 3.0;
    auto* polytope = app.add_subcommand("polytope", "slice-volume log-concavity certificate");
    auto* pt_g6 = polytope->add_option("--graph6", pt_in.graph6, "graph6 text");
    auto* pt_el = polytope->add_option("--edge-list", pt_in.edge_list, "JSON edge list file");
    auto* pt_pr = polytope->add_option("--prufer", pt_in.prufer, "comma-separated Prufer code");
    pt_g6->excludes(pt_el)->excludes(pt_pr);
    pt_el->excludes(pt_pr);
    polytope->add_option("--grid", pt_grid, "slice grid lo:hi:step")->required();
    polytope->add_option("--samples", pt_samples, "samples per grid point");
    polytope->add_option("--sigma", pt_sigma, "violation threshold in standard errors");
    add_common(polytope, ctx);
    polytope->callback([&] {
        if (pt_g6->count() + pt_el->count() + pt_pr->count() != 1)
            throw CLI::ValidationError("polytope", "need exactly one of --graph6, --edge-list, --prufer");
        rc = run_polytope(ctx, pt_in, pt_grid, pt_samples, pt_sigma);
    });

    // sampler
    auto* sampler = app.add_subcommand("sampler", "token model training and sampling");
    sampler->require_subcommand(1);
    std::string data_path, checkpoint_path, loss_log_path;
    TrainHyper hyper;
    hyper.context = 0;  // auto: longest training sequence
    auto* strain = sampler->add_subcommand("train", "fit the attention model");
    strain->add_option("--data", data_path, "JSON token dataset or Prufer text lines")
        ->required();
    strain->add_option("--checkpoint", checkpoint_path, "output checkpoint path")->required();
    strain->add_option("--loss-log", loss_log_path, "JSONL loss log path");
    strain->add_option("--lr", hyper.lr, "learning rate");
    strain->add_option("--steps", hyper.steps, "gradient steps");
    strain->add_option("--dim", hyper.dim, "embedding dimension");
    strain->add_option("--heads", hyper.heads, "attention heads");
    strain->add_option("--beta", hyper.beta, "softmax inverse temperature");
    strain->add_option("--context", hyper.context, "context length (0 = longest sequence)");
    add_common(strain, ctx);
    strain->callback(
        [&] { rc = run_sampler_train(ctx, data_path, checkpoint_path, loss_log_path, hyper); });

    int sample_count = 1, decode_n = 0;
    double output_beta = 0.0;
    std::string decode = "none";
    auto* ssample = sampler->add_subcommand("sample", "draw sequences from a checkpoint");
    ssample->add_option("--checkpoint", checkpoint_path, "checkpoint path")->required();
    ssample->add_option("--count", sample_count, "sequences to draw");
    ssample->add_option("--output-beta", output_beta, "override output softmax beta (0 = keep)");
    ssample->add_option("--decode", decode, "decode samples: none, tree, graph")
        ->check(CLI::IsMember({"none", "tree", "graph"}));
    ssample->add_option("--decode-n", decode_n, "object size for decoding");
    add_common(ssample, ctx);
    ssample->callback([&] {
        if (decode != "none" && decode_n < 1)
            throw CLI::ValidationError("sampler", "--decode requires --decode-n");
        rc = run_sampler_sample(ctx, checkpoint_path, sample_count, output_beta, decode,
                                decode_n);
    });

    // rerun
    std::string manifest_in;
    auto* rerun = app.add_subcommand("rerun", "replay a run from its manifest");
    rerun->add_option("manifest", manifest_in, "manifest file")->required();
    rerun->callback([&] { rc = run_rerun(manifest_in); });

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return dispatch(std::move(args));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
