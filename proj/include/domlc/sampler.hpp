#pragma once

// A minimal trainable next-token sampler: token embedding + positional
// embedding, one multi-head attention layer with a residual connection, and
// a linear output head. Trained by plain full-batch gradient descent on
// cross-entropy; no masking — the model is run once per prefix and only the
// last row's output is read, which matches the attention definition exactly
// at desk scale.
//
// Conventions:
//   * vocab counts the real tokens including the terminator, whose id is
//     vocab-1. The start-of-sequence row is embed.row(vocab), never emitted.
//   * a training sequence ends with the terminator token; sampled sequences
//     come back without it (`ended` records whether it was produced).
//   * params.beta drives both the attention softmax and the output softmax;
//     sample_tokens can override the output temperature only, leaving the
//     trained attention untouched.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "domlc/attention.hpp"
#include "domlc/graph.hpp"
#include "domlc/prufer.hpp"
#include "domlc/rng.hpp"

namespace domlc {

struct TokenDataset {
    std::vector<std::vector<int>> sequences;
    int vocab = 0;
};

inline void validate_dataset(const TokenDataset& data, int context) {
    if (data.sequences.empty())
        throw std::invalid_argument("sampler: dataset has no sequences");
    if (data.vocab < 2) throw std::invalid_argument("sampler: vocab must be >= 2");
    for (const auto& seq : data.sequences) {
        if (seq.empty()) throw std::invalid_argument("sampler: empty sequence in dataset");
        if (static_cast<int>(seq.size()) > context)
            throw std::invalid_argument("sampler: sequence of length " +
                                        std::to_string(seq.size()) +
                                        " exceeds context " + std::to_string(context));
        for (int tok : seq)
            if (tok < 0 || tok >= data.vocab)
                throw std::invalid_argument("sampler: token " + std::to_string(tok) +
                                            " outside vocab " + std::to_string(data.vocab));
    }
}

struct TrainHyper {
    double lr = 0.5;
    int steps = 500;
    std::uint64_t seed = 0;
    int context = 32;
    int dim = 8;
    int heads = 2;
    double beta = 1.0;
};

namespace detail {

inline Mat random_matrix(Eigen::Index rows, Eigen::Index cols, double scale, Rng& rng) {
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = (rng.next_unit() - 0.5) * scale;
    return m;
}

}  // namespace detail

// Scaled-uniform initialization, entries U(-0.5, 0.5)/sqrt(dim), filled in a
// fixed order from the seed.
inline AttentionParams init_params(int vocab, int context, int dim, int heads, double beta,
                                   std::uint64_t seed) {
    if (vocab < 2 || context < 2 || dim < 1 || heads < 1 || !(beta > 0.0))
        throw std::invalid_argument("init_params: bad hyperparameters");
    Rng rng(derive_seed(seed, {0x1217}));
    double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    AttentionParams p;
    p.vocab = vocab;
    p.context = context;
    p.dim = dim;
    p.beta = beta;
    p.embed = detail::random_matrix(vocab + 1, dim, scale, rng);
    p.pos = detail::random_matrix(context, dim, scale, rng);
    p.proj = detail::random_matrix(dim, vocab, scale, rng);
    for (int j = 0; j < heads; ++j) {
        p.heads_a.push_back(detail::random_matrix(dim, dim, scale, rng));
        p.heads_b.push_back(detail::random_matrix(dim, dim, scale, rng));
    }
    return p;
}

namespace detail {

// Rows for the prefix: start token then prefix tokens, each with its
// positional vector.
inline Mat prefix_rows(const AttentionParams& p, const std::vector<int>& tokens,
                       std::size_t len) {
    Mat y(len + 1, p.dim);
    y.row(0) = p.embed.row(p.vocab) + p.pos.row(0);
    for (std::size_t i = 0; i < len; ++i)
        y.row(i + 1) = p.embed.row(tokens[i]) + p.pos.row(i + 1);
    return y;
}

inline Vec next_logits(const AttentionParams& p, const Mat& y, Mat* h_out = nullptr) {
    Mat h = y + attention_forward(y, p);
    if (h_out) *h_out = h;
    return (h.row(h.rows() - 1) * p.proj).transpose();
}

}  // namespace detail

struct ModelGrads {
    Mat embed, pos, proj;
    std::vector<Mat> heads_a, heads_b;

    static ModelGrads zero(const AttentionParams& p) {
        ModelGrads g;
        g.embed = Mat::Zero(p.embed.rows(), p.embed.cols());
        g.pos = Mat::Zero(p.pos.rows(), p.pos.cols());
        g.proj = Mat::Zero(p.proj.rows(), p.proj.cols());
        for (int j = 0; j < p.head_count(); ++j) {
            g.heads_a.push_back(Mat::Zero(p.dim, p.dim));
            g.heads_b.push_back(Mat::Zero(p.dim, p.dim));
        }
        return g;
    }
};

// Cross-entropy of one sequence, summed over its next-token targets; if
// grads is non-null the parameter gradients are accumulated into it.
inline double sequence_loss(const AttentionParams& p, const std::vector<int>& seq,
                            ModelGrads* grads = nullptr) {
    double loss = 0.0;
    for (std::size_t target_pos = 0; target_pos < seq.size(); ++target_pos) {
        Mat y = detail::prefix_rows(p, seq, target_pos);
        Mat h;
        Vec logits = detail::next_logits(p, y, &h);
        Vec prob = softmax(logits, p.beta);
        int target = seq[target_pos];
        loss += -std::log(prob[target]);
        if (!grads) continue;

        Vec dlogits = p.beta * prob;
        dlogits[target] -= p.beta;
        Eigen::Index last = y.rows() - 1;
        grads->proj += h.row(last).transpose() * dlogits.transpose();

        Mat dh = Mat::Zero(y.rows(), y.cols());
        dh.row(last) = (p.proj * dlogits).transpose();
        AttentionGrads ag = attention_grad(y, p, dh);
        Mat dy = dh + ag.y;  // residual path plus attention path
        for (int j = 0; j < p.head_count(); ++j) {
            grads->heads_a[j] += ag.heads_a[j];
            grads->heads_b[j] += ag.heads_b[j];
        }
        grads->embed.row(p.vocab) += dy.row(0);
        grads->pos.row(0) += dy.row(0);
        for (std::size_t i = 0; i < target_pos; ++i) {
            grads->embed.row(seq[i]) += dy.row(i + 1);
            grads->pos.row(i + 1) += dy.row(i + 1);
        }
    }
    return loss;
}

// Mean cross-entropy per target over the dataset.
inline double dataset_loss(const AttentionParams& p, const TokenDataset& data) {
    double total = 0.0;
    long targets = 0;
    for (const auto& seq : data.sequences) {
        total += sequence_loss(p, seq);
        targets += static_cast<long>(seq.size());
    }
    return total / static_cast<double>(targets);
}

struct TrainResult {
    AttentionParams params;
    std::vector<double> loss_log;  // mean loss at each step, before that step's update
};

// Full-batch gradient descent on mean cross-entropy. Deterministic per
// hyper.seed; hyper.lr = 0 leaves parameters exactly unchanged.
inline TrainResult train(const TokenDataset& data, const TrainHyper& hyper) {
    validate_dataset(data, hyper.context);
    if (hyper.steps < 0) throw std::invalid_argument("train: steps must be >= 0");
    TrainResult result;
    result.params =
        init_params(data.vocab, hyper.context, hyper.dim, hyper.heads, hyper.beta, hyper.seed);
    AttentionParams& p = result.params;

    long targets = 0;
    for (const auto& seq : data.sequences) targets += static_cast<long>(seq.size());

    for (int step = 0; step < hyper.steps; ++step) {
        ModelGrads g = ModelGrads::zero(p);
        double total = 0.0;
        for (const auto& seq : data.sequences) total += sequence_loss(p, seq, &g);
        result.loss_log.push_back(total / static_cast<double>(targets));

        double scale = hyper.lr / static_cast<double>(targets);
        p.embed -= scale * g.embed;
        p.pos -= scale * g.pos;
        p.proj -= scale * g.proj;
        for (int j = 0; j < p.head_count(); ++j) {
            p.heads_a[j] -= scale * g.heads_a[j];
            p.heads_b[j] -= scale * g.heads_b[j];
        }
    }
    return result;
}

struct SampledSequence {
    std::vector<int> tokens;  // terminator stripped
    bool ended = false;       // true iff the terminator was emitted in time
};

// Autoregressive sampling. output_beta overrides the output softmax
// temperature only; attention always runs at params.beta. Sequence i uses
// the stream derived from (seed, i), so results are independent of batching.
inline std::vector<SampledSequence> sample_tokens(const AttentionParams& p, int count,
                                                  std::uint64_t seed,
                                                  std::optional<double> output_beta = {}) {
    if (count < 0) throw std::invalid_argument("sample_tokens: count must be >= 0");
    double out_beta = output_beta.value_or(p.beta);
    if (!(out_beta > 0.0))
        throw std::invalid_argument("sample_tokens: output beta must be positive");
    const int end_token = p.vocab - 1;

    std::vector<SampledSequence> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
        SampledSequence s;
        while (static_cast<int>(s.tokens.size()) < p.context) {
            Mat y = detail::prefix_rows(p, s.tokens, s.tokens.size());
            Vec prob = softmax(detail::next_logits(p, y), out_beta);
            double u = rng.next_unit();
            int tok = p.vocab - 1;
            double acc = 0.0;
            for (int t = 0; t < p.vocab; ++t) {
                acc += prob[t];
                if (u < acc) {
                    tok = t;
                    break;
                }
            }
            if (tok == end_token) {
                s.ended = true;
                break;
            }
            s.tokens.push_back(tok);
        }
        out.push_back(std::move(s));
    }
    return out;
}

// --- token codecs ------------------------------------------------------
//
// Tree mode: vocab = n + 1 (labels 0..n-1, terminator n).
// Graph mode: vocab = 3 (bits 0/1, terminator 2); bits are the adjacency
// entries above the diagonal in row-major pair order (0,1),(0,2),...

inline int tree_vocab(int n) { return n + 1; }
inline constexpr int kGraphVocab = 3;

inline std::vector<int> encode_prufer_tokens(const PruferCode& code, int n) {
    std::vector<int> tokens;
    tokens.reserve(code.size() + 1);
    for (int v : code) {
        if (v < 0 || v >= n)
            throw std::invalid_argument("encode_prufer_tokens: label out of range");
        tokens.push_back(v);
    }
    tokens.push_back(n);  // terminator
    return tokens;
}

inline std::optional<Tree> decode_prufer_tokens(const std::vector<int>& tokens, int n) {
    if (n < 2 || static_cast<int>(tokens.size()) != n - 2) return std::nullopt;
    for (int tok : tokens)
        if (tok < 0 || tok >= n) return std::nullopt;
    return prufer_decode(tokens, n);
}

inline std::vector<int> encode_adjacency_tokens(const Graph& g) {
    std::vector<int> tokens;
    tokens.reserve(static_cast<std::size_t>(g.n) * (g.n - 1) / 2 + 1);
    for (int u = 0; u < g.n; ++u)
        for (int v = u + 1; v < g.n; ++v) tokens.push_back(g.has_edge(u, v) ? 1 : 0);
    tokens.push_back(2);  // terminator
    return tokens;
}

inline std::optional<Graph> decode_adjacency_tokens(const std::vector<int>& tokens, int n) {
    if (static_cast<int>(tokens.size()) != n * (n - 1) / 2) return std::nullopt;
    Graph g = Graph::empty(n);
    std::size_t idx = 0;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
            int bit = tokens[idx++];
            if (bit != 0 && bit != 1) return std::nullopt;
            if (bit) g.add_edge(u, v);
        }
    return g;
}

// --- checkpoint --------------------------------------------------------

namespace detail {

inline nlohmann::json matrix_to_json(const Mat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Mat matrix_from_json(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols,
                            const char* name) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
        throw std::invalid_argument(std::string("checkpoint: bad shape for ") + name);
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j[i];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw std::invalid_argument(std::string("checkpoint: bad shape for ") + name);
        for (Eigen::Index jj = 0; jj < cols; ++jj) m(i, jj) = row[jj].get<double>();
    }
    return m;
}

}  // namespace detail

inline nlohmann::json params_to_json(const AttentionParams& p) {
    nlohmann::json j;
    j["format"] = "domlc-sampler";
    j["version"] = 1;
    j["vocab"] = p.vocab;
    j["context"] = p.context;
    j["dim"] = p.dim;
    j["heads"] = p.head_count();
    j["beta"] = p.beta;
    j["embed"] = detail::matrix_to_json(p.embed);
    j["pos"] = detail::matrix_to_json(p.pos);
    j["proj"] = detail::matrix_to_json(p.proj);
    j["A"] = nlohmann::json::array();
    j["B"] = nlohmann::json::array();
    for (int h = 0; h < p.head_count(); ++h) {
        j["A"].push_back(detail::matrix_to_json(p.heads_a[h]));
        j["B"].push_back(detail::matrix_to_json(p.heads_b[h]));
    }
    return j;
}

inline AttentionParams params_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "domlc-sampler" || j.value("version", 0) != 1)
        throw std::invalid_argument("checkpoint: not a version-1 sampler checkpoint");
    AttentionParams p;
    p.vocab = j.at("vocab").get<int>();
    p.context = j.at("context").get<int>();
    p.dim = j.at("dim").get<int>();
    p.beta = j.at("beta").get<double>();
    int heads = j.at("heads").get<int>();
    if (p.vocab < 2 || p.context < 2 || p.dim < 1 || heads < 1 || !(p.beta > 0.0))
        throw std::invalid_argument("checkpoint: bad hyperparameters");
    p.embed = detail::matrix_from_json(j.at("embed"), p.vocab + 1, p.dim, "embed");
    p.pos = detail::matrix_from_json(j.at("pos"), p.context, p.dim, "pos");
    p.proj = detail::matrix_from_json(j.at("proj"), p.dim, p.vocab, "proj");
    if (static_cast<int>(j.at("A").size()) != heads ||
        static_cast<int>(j.at("B").size()) != heads)
        throw std::invalid_argument("checkpoint: head count mismatch");
    for (int h = 0; h < heads; ++h) {
        p.heads_a.push_back(detail::matrix_from_json(j.at("A")[h], p.dim, p.dim, "A"));
        p.heads_b.push_back(detail::matrix_from_json(j.at("B")[h], p.dim, p.dim, "B"));
    }
    return p;
}

}  // namespace domlc
