#pragma once

// Multi-head attention over row vectors, written out exactly as
//   [f(Y)](i) = sum_j p([Y A_j Y^T](i)) Y B_j
// with p the beta-softmax applied to row i of the score matrix. No masking,
// no scaling conventions beyond beta, no projections: those live in the
// sampler model that wraps this.
//
// attention_grad returns analytic reverse-mode gradients of <upstream, f(Y)>
// with respect to Y and every A_j, B_j. They are validated against central
// finite differences in the tests; keep both sides in sync when touching
// either.

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace domlc {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Stabilized softmax: exp(beta*(x - max)) normalized.
inline Vec softmax(const Vec& x, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("softmax: beta must be positive");
    if (x.size() == 0) throw std::invalid_argument("softmax: empty input");
    Vec shifted = beta * (x.array() - x.maxCoeff()).matrix();
    Vec e = shifted.array().exp();
    return e / e.sum();
}

// The model parameters of Definition-style attention plus the sampler
// plumbing around it. The pure attention math only reads heads_a, heads_b
// and beta; embed/pos/proj belong to the token model and may be empty when
// calling attention_forward/attention_grad directly.
struct AttentionParams {
    std::vector<Mat> heads_a;  // A_j, dim x dim
    std::vector<Mat> heads_b;  // B_j, dim x dim
    double beta = 1.0;

    Mat embed;  // (vocab+1) x dim; the extra final row embeds the start token
    Mat pos;    // context x dim
    Mat proj;   // dim x vocab
    int vocab = 0;
    int context = 0;
    int dim = 0;

    int head_count() const { return static_cast<int>(heads_a.size()); }
};

namespace detail {

inline void check_attention_shapes(const Mat& y, const AttentionParams& p) {
    if (p.heads_a.size() != p.heads_b.size())
        throw std::invalid_argument("attention: head count mismatch between A and B");
    if (p.heads_a.empty()) throw std::invalid_argument("attention: need at least one head");
    if (!(p.beta > 0.0)) throw std::invalid_argument("attention: beta must be positive");
    const auto n = y.cols();
    for (const Mat& a : p.heads_a)
        if (a.rows() != n || a.cols() != n)
            throw std::invalid_argument("attention: A head must be " + std::to_string(n) +
                                        "x" + std::to_string(n));
    for (const Mat& b : p.heads_b)
        if (b.rows() != n || b.cols() != n)
            throw std::invalid_argument("attention: B head must be " + std::to_string(n) +
                                        "x" + std::to_string(n));
}

// Row-wise beta-softmax of a score matrix.
inline Mat softmax_rows(const Mat& scores, double beta) {
    Mat s(scores.rows(), scores.cols());
    for (Eigen::Index i = 0; i < scores.rows(); ++i)
        s.row(i) = softmax(scores.row(i).transpose(), beta).transpose();
    return s;
}

}  // namespace detail

inline Mat attention_forward(const Mat& y, const AttentionParams& p) {
    detail::check_attention_shapes(y, p);
    Mat out = Mat::Zero(y.rows(), y.cols());
    for (int j = 0; j < p.head_count(); ++j) {
        Mat scores = y * p.heads_a[j] * y.transpose();
        Mat s = detail::softmax_rows(scores, p.beta);
        out += s * (y * p.heads_b[j]);
    }
    return out;
}

struct AttentionGrads {
    Mat y;                // dL/dY
    std::vector<Mat> heads_a;
    std::vector<Mat> heads_b;
};

inline AttentionGrads attention_grad(const Mat& y, const AttentionParams& p,
                                     const Mat& upstream) {
    detail::check_attention_shapes(y, p);
    if (upstream.rows() != y.rows() || upstream.cols() != y.cols())
        throw std::invalid_argument("attention_grad: upstream shape must match Y");

    AttentionGrads g;
    g.y = Mat::Zero(y.rows(), y.cols());
    for (int j = 0; j < p.head_count(); ++j) {
        const Mat& a = p.heads_a[j];
        const Mat& b = p.heads_b[j];
        Mat scores = y * a * y.transpose();
        Mat s = detail::softmax_rows(scores, p.beta);
        Mat w = y * b;  // values

        // out_j = S W
        Mat ds = upstream * w.transpose();
        Mat dw = s.transpose() * upstream;

        // softmax rows: dz_i = beta * s_i .* (ds_i - <ds_i, s_i>)
        Mat dz(s.rows(), s.cols());
        for (Eigen::Index i = 0; i < s.rows(); ++i) {
            double dot = s.row(i).dot(ds.row(i));
            dz.row(i) = p.beta * (s.row(i).array() * (ds.row(i).array() - dot)).matrix();
        }

        g.heads_a.push_back(y.transpose() * dz * y);
        g.heads_b.push_back(y.transpose() * dw);
        // scores = Y A Y^T and W = Y B both touch Y
        g.y += dz * y * a.transpose() + dz.transpose() * y * a + dw * b.transpose();
    }
    return g;
}

}  // namespace domlc
