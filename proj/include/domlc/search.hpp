#pragma once

// Reward-driven local search for non-log-concave domination sequences, plus
// the generate/train/sample/search/retain outer loop with a pluggable
// attention sampler.
//
// The reward of a sequence with first nonzero index k is
//   d_{k+2} d_k - d_{k+1}^2,
// positive exactly when log-concavity fails at k+1. The "best" window
// variant takes the maximum of the same expression over j from k through
// two below the last nonzero index (so padding with zeros cannot change
// the answer), falling back to the k term when that range is empty.
//
// Inner loops run on uint64 histograms: every coefficient counts subsets of
// an n-vertex set, so values stay below 2^n and pairwise products fit
// __int128 for every size this module accepts (graphs are oracle-capped far
// lower, trees are capped at 60 by tree_dompoly_u64).

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "domlc/dompoly.hpp"
#include "domlc/graph.hpp"
#include "domlc/graph6.hpp"
#include "domlc/parallel.hpp"
#include "domlc/poly.hpp"
#include "domlc/prufer.hpp"
#include "domlc/rng.hpp"
#include "domlc/sampler.hpp"

namespace domlc {

enum class RewardWindow { gamma, best };

namespace detail {

inline BigInt int128_to_bigint(__int128 v) {
    bool neg = v < 0;
    unsigned __int128 mag = neg ? static_cast<unsigned __int128>(-v)
                                : static_cast<unsigned __int128>(v);
    BigInt hi = static_cast<unsigned long>(mag >> 64);
    BigInt out = (hi << 64) + static_cast<unsigned long>(mag & ~0ULL);
    return neg ? BigInt(-out) : out;
}

inline int first_nonzero(const std::vector<std::uint64_t>& hist) {
    for (std::size_t j = 0; j < hist.size(); ++j)
        if (hist[j]) return static_cast<int>(j);
    return -1;
}

inline __int128 window_value(const std::vector<std::uint64_t>& hist, int j) {
    auto at = [&](int i) -> __int128 {
        return (i >= 0 && i < static_cast<int>(hist.size())) ? hist[i] : 0;
    };
    return at(j + 2) * at(j) - at(j + 1) * at(j + 1);
}

}  // namespace detail

// Reward of a uint64 histogram; the caller guarantees entries < 2^63.
inline __int128 reward_u64(const std::vector<std::uint64_t>& hist,
                           RewardWindow window = RewardWindow::gamma) {
    int gamma = detail::first_nonzero(hist);
    if (gamma < 0) throw std::invalid_argument("reward: all-zero sequence");
    __int128 best = detail::window_value(hist, gamma);
    if (window == RewardWindow::best) {
        int top = static_cast<int>(hist.size()) - 1;
        while (hist[top] == 0) --top;
        for (int j = gamma + 1; j <= top - 2; ++j)
            best = std::max(best, detail::window_value(hist, j));
    }
    return best;
}

// Exact-arithmetic reward for sequences of any magnitude.
inline BigInt reward(const IntPoly& seq, RewardWindow window = RewardWindow::gamma) {
    long deg = seq.degree();
    if (deg < 0) throw std::invalid_argument("reward: all-zero sequence");
    int gamma = 0;
    while (seq.coeff(gamma) == 0) ++gamma;
    auto value = [&](int j) -> BigInt {
        return seq.coeff(j + 2) * seq.coeff(j) - seq.coeff(j + 1) * seq.coeff(j + 1);
    };
    BigInt best = value(gamma);
    if (window == RewardWindow::best)
        for (int j = gamma + 1; j <= static_cast<int>(deg) - 2; ++j)
            best = std::max(best, value(j));
    return best;
}

struct GraphCandidate {
    Graph graph;
    std::vector<std::uint64_t> sequence;
    BigInt reward;
    std::string lineage;
    std::int64_t evaluations = 0;  // oracle calls spent producing this candidate
};

struct TreeCandidate {
    Tree tree;
    std::vector<std::uint64_t> sequence;
    BigInt reward;
    std::string lineage;
    std::int64_t evaluations = 0;
};

// Best-improvement edge toggling: each step evaluates every add/delete of a
// single edge, takes the strictly best one (ties broken by the
// lexicographically smallest vertex pair), and stops at a local optimum or
// the step cap. Deterministic: the seed parameter exists for interface
// symmetry with the tree search and is unused. A step is only entered when
// its full move enumeration fits into max_evals (-1 = unlimited).
inline GraphCandidate local_search_graph(const Graph& start, int steps, std::uint64_t seed,
                                         RewardWindow window = RewardWindow::gamma,
                                         std::int64_t max_evals = -1,
                                         const BruteForceOptions& oracle = {}) {
    (void)seed;
    Graph cur = start;
    std::vector<std::uint64_t> cur_hist = brute_force_counts(cur, oracle);
    __int128 cur_reward = reward_u64(cur_hist, window);
    std::int64_t evals = 1;
    const std::int64_t per_step =
        static_cast<std::int64_t>(cur.n) * (cur.n - 1) / 2;

    for (int step = 0; step < steps; ++step) {
        if (max_evals >= 0 && evals + per_step > max_evals) break;
        __int128 best_reward = cur_reward;
        int best_u = -1, best_v = -1;
        std::vector<std::uint64_t> best_hist;
        for (int u = 0; u < cur.n; ++u)
            for (int v = u + 1; v < cur.n; ++v) {
                cur.toggle_edge(u, v);
                std::vector<std::uint64_t> hist = brute_force_counts(cur, oracle);
                ++evals;
                __int128 r = reward_u64(hist, window);
                if (r > best_reward) {
                    best_reward = r;
                    best_u = u;
                    best_v = v;
                    best_hist = std::move(hist);
                }
                cur.toggle_edge(u, v);  // restore
            }
        if (best_u < 0) break;  // local optimum
        cur.toggle_edge(best_u, best_v);
        cur_hist = std::move(best_hist);
        cur_reward = best_reward;
    }

    GraphCandidate out{std::move(cur), std::move(cur_hist),
                       detail::int128_to_bigint(cur_reward), "local-search", evals};
    return out;
}

// The random-pair cycle move: connect two random vertices, evaluate every
// tree obtained by deleting one cycle edge (deleting the new edge itself
// reverts, at no evaluation cost), and keep the best, first-in-path-order
// on ties. Reverting is always available, so the reward never decreases. A
// drawn pair that is already adjacent (or equal) degenerates to a no-op
// step; both draws still consume randomness, keeping the stream aligned.
inline TreeCandidate local_search_tree(const Tree& start, int steps, std::uint64_t seed,
                                       RewardWindow window = RewardWindow::gamma,
                                       std::int64_t max_evals = -1) {
    Tree cur = start;
    std::vector<std::uint64_t> cur_hist = tree_dompoly_u64(cur);
    __int128 cur_reward = reward_u64(cur_hist, window);
    std::int64_t evals = 1;
    Rng rng(seed);

    for (int step = 0; step < steps; ++step) {
        int u = rng.next_index(cur.n);
        int v = rng.next_index(cur.n);
        if (u == v) continue;

        // path from u to v
        auto adj = cur.adjacency();
        std::vector<int> parent(cur.n, -2);
        parent[u] = -1;
        std::vector<int> queue{u};
        for (std::size_t qi = 0; qi < queue.size() && parent[v] == -2; ++qi)
            for (int w : adj[queue[qi]])
                if (parent[w] == -2) {
                    parent[w] = queue[qi];
                    queue.push_back(w);
                }
        std::vector<std::pair<int, int>> path;  // edges v..u order
        for (int w = v; parent[w] >= 0; w = parent[w]) path.emplace_back(parent[w], w);
        if (path.size() == 1) continue;  // adjacent pair: the cycle is the edge itself

        if (max_evals >= 0 && evals + static_cast<std::int64_t>(path.size()) > max_evals)
            break;

        __int128 best_reward = cur_reward;
        Tree best_tree = cur;
        std::vector<std::uint64_t> best_hist = cur_hist;
        for (auto it = path.rbegin(); it != path.rend(); ++it) {  // u-side first
            std::vector<std::pair<int, int>> edges;
            edges.reserve(cur.edges.size());
            for (auto e : cur.edges)
                if (!(std::min(e.first, e.second) == std::min(it->first, it->second) &&
                      std::max(e.first, e.second) == std::max(it->first, it->second)))
                    edges.push_back(e);
            edges.emplace_back(std::min(u, v), std::max(u, v));
            Tree alt = Tree::from_edges(cur.n, std::move(edges));
            std::vector<std::uint64_t> hist = tree_dompoly_u64(alt);
            ++evals;
            __int128 r = reward_u64(hist, window);
            if (r > best_reward) {
                best_reward = r;
                best_tree = std::move(alt);
                best_hist = std::move(hist);
            }
        }
        if (best_reward < cur_reward)
            throw std::logic_error("local_search_tree: reward decreased with revert available");
        cur = std::move(best_tree);
        cur_hist = std::move(best_hist);
        cur_reward = best_reward;
    }

    TreeCandidate out{std::move(cur), std::move(cur_hist),
                      detail::int128_to_bigint(cur_reward), "local-search", evals};
    return out;
}

struct MultiStartGraphReport {
    GraphCandidate best;
    std::int64_t evaluations = 0;
    int starts = 0;
};

struct MultiStartTreeReport {
    TreeCandidate best;
    std::int64_t evaluations = 0;
    int starts = 0;
};

// Runs one local search per seed (random start drawn from that seed) until
// the seed list or the evaluation budget is exhausted; keeps the first
// candidate attaining the best reward.
inline MultiStartGraphReport multi_start_graph(int n, const std::vector<std::uint64_t>& seeds,
                                               int steps, std::int64_t eval_budget,
                                               RewardWindow window = RewardWindow::gamma,
                                               double edge_prob = 0.5) {
    if (seeds.empty()) throw std::invalid_argument("multi_start_graph: no seeds");
    MultiStartGraphReport report;
    bool have = false;
    for (std::uint64_t s : seeds) {
        std::int64_t remaining =
            eval_budget < 0 ? -1 : eval_budget - report.evaluations;
        if (eval_budget >= 0 && remaining <= 0) break;
        Graph start = random_graph(n, edge_prob, derive_seed(s, {0x577a7d}));
        GraphCandidate cand = local_search_graph(start, steps, s, window, remaining);
        report.evaluations += cand.evaluations;
        ++report.starts;
        if (!have || cand.reward > report.best.reward) {
            report.best = std::move(cand);
            have = true;
        }
    }
    return report;
}

inline MultiStartTreeReport multi_start_tree(int n, const std::vector<std::uint64_t>& seeds,
                                             int steps, std::int64_t eval_budget,
                                             RewardWindow window = RewardWindow::gamma) {
    if (seeds.empty()) throw std::invalid_argument("multi_start_tree: no seeds");
    MultiStartTreeReport report;
    bool have = false;
    for (std::uint64_t s : seeds) {
        std::int64_t remaining =
            eval_budget < 0 ? -1 : eval_budget - report.evaluations;
        if (eval_budget >= 0 && remaining <= 0) break;
        Tree start = random_tree(n, derive_seed(s, {0x577a7e}));
        TreeCandidate cand = local_search_tree(start, steps, derive_seed(s, {0x11}), window,
                                               remaining);
        report.evaluations += cand.evaluations;
        ++report.starts;
        if (!have || cand.reward > report.best.reward) {
            report.best = std::move(cand);
            have = true;
        }
    }
    return report;
}

// --- generate/train/sample/search/retain loop ----------------------------

enum class SearchMode { graph, tree };
enum class SamplerKind { none, attention };

struct SearchConfig {
    int n = 9;
    SearchMode mode = SearchMode::graph;
    int population_size = 500;
    int epochs = 5;
    int local_search_steps = 50;
    double keep_fraction = 0.10;
    SamplerKind sampler = SamplerKind::none;
    std::uint64_t seed = 0;
    RewardWindow reward_window = RewardWindow::gamma;
    double edge_prob = 0.5;     // density of random graph starts
    TrainHyper sampler_hyper{}; // context and seed are overridden per epoch
    int threads = 1;
};

struct PipelineResult {
    std::vector<GraphCandidate> graphs;  // final retained population, ranked
    std::vector<TreeCandidate> trees;
    BigInt best_reward;
    std::string best_object;  // graph6 text or comma-separated Prufer code
    std::vector<std::uint64_t> best_sequence;
    std::int64_t evaluations = 0;
    std::int64_t invalid_samples = 0;
};

namespace detail {

struct GraphDomain {
    int n;
    double edge_prob;
    using Object = Graph;
    using Candidate = GraphCandidate;
    Object random(std::uint64_t seed) const { return random_graph(n, edge_prob, seed); }
    Candidate search(const Object& o, int steps, std::uint64_t seed, RewardWindow w) const {
        return local_search_graph(o, steps, seed, w);
    }
    std::vector<int> encode(const Object& o) const { return encode_adjacency_tokens(o); }
    std::optional<Object> decode(const std::vector<int>& toks) const {
        return decode_adjacency_tokens(toks, n);
    }
    int vocab() const { return kGraphVocab; }
    int token_len() const { return n * (n - 1) / 2 + 1; }
    static std::string canonical(const Object& o) { return graph6_encode(o); }
    static const Object& object(const Candidate& c) { return c.graph; }
    static void store(PipelineResult& r, std::vector<Candidate> pop) {
        r.graphs = std::move(pop);
    }
};

struct TreeDomain {
    int n;
    using Object = Tree;
    using Candidate = TreeCandidate;
    Object random(std::uint64_t seed) const { return random_tree(n, seed); }
    Candidate search(const Object& o, int steps, std::uint64_t seed, RewardWindow w) const {
        return local_search_tree(o, steps, seed, w);
    }
    std::vector<int> encode(const Object& o) const {
        return encode_prufer_tokens(prufer_encode(o), n);
    }
    std::optional<Object> decode(const std::vector<int>& toks) const {
        return decode_prufer_tokens(toks, n);
    }
    int vocab() const { return tree_vocab(n); }
    int token_len() const { return n - 1; }
    static std::string canonical(const Object& o) {
        std::string s;
        for (int v : prufer_encode(o)) {
            if (!s.empty()) s += ',';
            s += std::to_string(v);
        }
        return s;
    }
    static const Object& object(const Candidate& c) { return c.tree; }
    static void store(PipelineResult& r, std::vector<Candidate> pop) {
        r.trees = std::move(pop);
    }
};

template <class Domain>
PipelineResult run_pipeline_impl(const Domain& dom, const SearchConfig& cfg,
                                 std::ostream* log) {
    using Candidate = typename Domain::Candidate;
    using Object = typename Domain::Object;

    const int keep_count = std::max(
        1, static_cast<int>(cfg.population_size * cfg.keep_fraction));
    PipelineResult result;
    std::vector<Candidate> population;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<Object> starts;
        starts.reserve(cfg.population_size);
        std::vector<std::string> origins(cfg.population_size, "random");
        std::int64_t invalid = 0;

        if (epoch == 0 || cfg.sampler == SamplerKind::none) {
            for (int i = 0; i < cfg.population_size; ++i)
                starts.push_back(dom.random(derive_seed(
                    cfg.seed, {static_cast<std::uint64_t>(epoch),
                               static_cast<std::uint64_t>(i), 0xa11})));
        } else {
            TokenDataset data;
            data.vocab = dom.vocab();
            for (const Candidate& c : population)
                data.sequences.push_back(dom.encode(Domain::object(c)));
            TrainHyper hyper = cfg.sampler_hyper;
            hyper.context = dom.token_len();
            hyper.seed = derive_seed(cfg.seed,
                                     {static_cast<std::uint64_t>(epoch), 0x7a1});
            TrainResult tr = train(data, hyper);
            auto samples = sample_tokens(
                tr.params, cfg.population_size,
                derive_seed(cfg.seed, {static_cast<std::uint64_t>(epoch), 0x5a3}));
            for (int i = 0; i < cfg.population_size; ++i) {
                std::optional<Object> obj;
                if (samples[i].ended) obj = dom.decode(samples[i].tokens);
                if (obj) {
                    starts.push_back(std::move(*obj));
                    origins[i] = "sampled";
                } else {
                    ++invalid;
                    starts.push_back(dom.random(derive_seed(
                        cfg.seed, {static_cast<std::uint64_t>(epoch),
                                   static_cast<std::uint64_t>(i), 0xfb})));
                }
            }
        }

        std::vector<Candidate> fresh(cfg.population_size);
        run_chunks(cfg.population_size, cfg.threads, [&](std::size_t i) {
            fresh[i] = dom.search(
                starts[i], cfg.local_search_steps,
                derive_seed(cfg.seed, {static_cast<std::uint64_t>(epoch), i, 0x15}),
                cfg.reward_window);
            fresh[i].lineage = "local-search(" + origins[i] + ")";
        });
        for (Candidate& c : fresh) {
            result.evaluations += c.evaluations;
            population.push_back(std::move(c));
        }
        result.invalid_samples += invalid;

        std::stable_sort(population.begin(), population.end(),
                         [](const Candidate& a, const Candidate& b) {
                             if (a.reward != b.reward) return a.reward > b.reward;
                             return Domain::canonical(Domain::object(a)) <
                                    Domain::canonical(Domain::object(b));
                         });
        if (static_cast<int>(population.size()) > keep_count)
            population.resize(keep_count);

        if (log) {
            nlohmann::json line{
                {"epoch", epoch},
                {"generated", cfg.population_size},
                {"invalid_samples", invalid},
                {"kept", static_cast<int>(population.size())},
                {"best_reward", population.front().reward.get_str()},
                {"best_object", Domain::canonical(Domain::object(population.front()))},
                {"evaluations_total", result.evaluations},
            };
            *log << line.dump() << "\n";
        }
    }

    result.best_reward = population.front().reward;
    result.best_object = Domain::canonical(Domain::object(population.front()));
    result.best_sequence = population.front().sequence;
    Domain::store(result, std::move(population));
    return result;
}

}  // namespace detail

// One call runs the full loop: draw or sample a population, locally search
// every member, pool with the retained elite, rank by reward (ties broken by
// canonical encoding so logs are byte-stable), retain the top keep_fraction,
// and repeat for cfg.epochs rounds. With sampler == attention, every epoch
// after the first trains the token model on the retained elite and draws the
// next population from it; sampled sequences that fail to decode are counted
// and replaced by fresh random objects. Each log line is one JSON object per
// epoch. Identical results for any thread count.
inline PipelineResult run_pipeline(const SearchConfig& cfg, std::ostream* log = nullptr) {
    if (cfg.population_size < 1)
        throw std::invalid_argument("run_pipeline: population_size must be >= 1");
    if (cfg.epochs < 1) throw std::invalid_argument("run_pipeline: epochs must be >= 1");
    if (cfg.local_search_steps < 0)
        throw std::invalid_argument("run_pipeline: local_search_steps must be >= 0");
    if (!(cfg.keep_fraction > 0.0 && cfg.keep_fraction <= 1.0))
        throw std::invalid_argument("run_pipeline: keep_fraction must be in (0, 1]");
    if (!(cfg.edge_prob >= 0.0 && cfg.edge_prob <= 1.0))
        throw std::invalid_argument("run_pipeline: edge_prob must be in [0, 1]");
    if (cfg.mode == SearchMode::graph) {
        if (cfg.n < 1 || cfg.n > BruteForceOptions{}.max_n)
            throw std::invalid_argument("run_pipeline: graph mode needs 1 <= n <= " +
                                        std::to_string(BruteForceOptions{}.max_n));
        return detail::run_pipeline_impl(detail::GraphDomain{cfg.n, cfg.edge_prob}, cfg, log);
    }
    if (cfg.n < 2 || cfg.n > 60)
        throw std::invalid_argument("run_pipeline: tree mode needs 2 <= n <= 60");
    return detail::run_pipeline_impl(detail::TreeDomain{cfg.n}, cfg, log);
}

}  // namespace domlc
