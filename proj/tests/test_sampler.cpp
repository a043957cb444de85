#include <cmath>
#include <numeric>

#include <catch2/catch_amalgamated.hpp>

#include "domlc/sampler.hpp"

using namespace domlc;

namespace {

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

double rel_err(double analytic, double numeric) {
    return std::abs(analytic - numeric) / std::max(1.0, std::abs(numeric));
}

}  // namespace

TEST_CASE("softmax basics") {
    Vec two(2);
    two << 0.0, 0.0;
    Vec p = softmax(two, 3.7);
    CHECK(p[0] == Catch::Approx(0.5).epsilon(1e-14));
    CHECK(p[1] == Catch::Approx(0.5).epsilon(1e-14));

    Vec x(2);
    x << std::log(2.0), 0.0;
    Vec q = softmax(x, 1.0);
    CHECK(q[0] == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(q[1] == Catch::Approx(1.0 / 3.0).epsilon(1e-12));

    // near-zero temperature flattens
    Vec y(3);
    y << 5.0, -2.0, 0.4;
    Vec u = softmax(y, 1e-9);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(u[i] - 1.0 / 3.0) < 1e-6);

    CHECK_THROWS_AS(softmax(x, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(softmax(Vec(), 1.0), std::invalid_argument);
}

TEST_CASE("softmax rows are stochastic even at extreme scores") {
    Rng rng(314);
    for (int iter = 0; iter < 200; ++iter) {
        int len = 1 + rng.next_index(12);
        Vec x(len);
        for (int i = 0; i < len; ++i) x[i] = (rng.next_unit() - 0.5) * 2e8;
        Vec p = softmax(x, 0.5 + rng.next_unit());
        REQUIRE(std::abs(p.sum() - 1.0) < 1e-12);
        for (int i = 0; i < len; ++i) REQUIRE(p[i] >= 0.0);
    }
}

TEST_CASE("attention forward special cases") {
    Rng rng(9);
    Mat y = detail::random_matrix(5, 3, 2.0, rng);

    AttentionParams mean_map;
    mean_map.beta = 1.0;
    mean_map.heads_a.push_back(Mat::Zero(3, 3));
    mean_map.heads_b.push_back(Mat::Identity(3, 3));
    Mat out = attention_forward(y, mean_map);
    Vec mean = y.colwise().mean();
    for (int i = 0; i < 5; ++i)
        REQUIRE((out.row(i).transpose() - mean).norm() < 1e-14);

    AttentionParams zero_map = mean_map;
    zero_map.heads_b[0] = Mat::Zero(3, 3);
    CHECK(attention_forward(y, zero_map).norm() == 0.0);

    AttentionParams one_head = bare_params(3, 1, 0.8, 11);
    AttentionParams two_heads = one_head;
    two_heads.heads_a.push_back(one_head.heads_a[0]);
    two_heads.heads_b.push_back(one_head.heads_b[0]);
    Mat single = attention_forward(y, one_head);
    Mat doubled = attention_forward(y, two_heads);
    REQUIRE((doubled - 2.0 * single).norm() < 1e-12);

    // single row: softmax over one score is 1, so f(Y) = Y B
    Mat row = y.topRows(1);
    REQUIRE((attention_forward(row, one_head) - row * one_head.heads_b[0]).norm() < 1e-14);

    CHECK_THROWS_AS(attention_forward(Mat::Zero(2, 4), one_head), std::invalid_argument);
    AttentionParams empty_heads;
    CHECK_THROWS_AS(attention_forward(y, empty_heads), std::invalid_argument);
}

TEST_CASE("attention forward is permutation equivariant") {
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
            REQUIRE((lhs.row(i) - rhs.row(perm[i])).norm() < 1e-10);
    }
}

TEST_CASE("attention gradients match finite differences") {
    const double h = 1e-4;
    Rng rng(20240814);
    double worst = 0.0;
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
                double numeric = (loss(yp, p) - loss(ym, p)) / (2 * h);
                worst = std::max(worst, rel_err(g.y(i, j), numeric));
            }
        for (int head = 0; head < 2; ++head)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    AttentionParams pp = p, pm = p;
                    pp.heads_a[head](i, j) += h;
                    pm.heads_a[head](i, j) -= h;
                    worst = std::max(
                        worst, rel_err(g.heads_a[head](i, j),
                                       (loss(y, pp) - loss(y, pm)) / (2 * h)));
                    pp = p;
                    pm = p;
                    pp.heads_b[head](i, j) += h;
                    pm.heads_b[head](i, j) -= h;
                    worst = std::max(
                        worst, rel_err(g.heads_b[head](i, j),
                                       (loss(y, pp) - loss(y, pm)) / (2 * h)));
                }
    }
    CHECK(worst <= 1e-5);
}

TEST_CASE("gradient special cases") {
    Rng rng(33);
    Mat y = detail::random_matrix(4, 3, 2.0, rng);
    AttentionParams p = bare_params(3, 2, 1.3, 5);

    AttentionGrads zero = attention_grad(y, p, Mat::Zero(4, 3));
    CHECK(zero.y.norm() == 0.0);
    CHECK(zero.heads_a[0].norm() == 0.0);
    CHECK(zero.heads_b[1].norm() == 0.0);

    // A=0, B free: f = (1/m) * ones * Y B, so dB = (1/m) Y^T ones upstream
    AttentionParams lin;
    lin.beta = 1.0;
    lin.heads_a.push_back(Mat::Zero(3, 3));
    lin.heads_b.push_back(detail::random_matrix(3, 3, 1.0, rng));
    Mat upstream = detail::random_matrix(4, 3, 1.0, rng);
    AttentionGrads g = attention_grad(y, lin, upstream);
    Mat uniform = Mat::Constant(4, 4, 0.25);
    Mat expected = y.transpose() * uniform.transpose() * upstream;
    REQUIRE((g.heads_b[0] - expected).norm() < 1e-12);

    CHECK_THROWS_AS(attention_grad(y, p, Mat::Zero(3, 3)), std::invalid_argument);
}

TEST_CASE("full model gradients match finite differences") {
    TokenDataset data;
    data.vocab = 5;
    data.sequences = {{0, 3, 1, 4}, {2, 2, 4}};
    AttentionParams p = init_params(5, 8, 4, 2, 1.1, 77);

    ModelGrads g = ModelGrads::zero(p);
    for (const auto& seq : data.sequences) sequence_loss(p, seq, &g);

    auto total_loss = [&](const AttentionParams& q) {
        double s = 0.0;
        for (const auto& seq : data.sequences) s += sequence_loss(q, seq);
        return s;
    };

    const double h = 1e-5;
    double worst = 0.0;
    auto probe = [&](Mat AttentionParams::* field, const Mat& analytic) {
        const Mat& base = p.*field;
        for (int i = 0; i < base.rows(); ++i)
            for (int j = 0; j < base.cols(); ++j) {
                AttentionParams qp = p, qm = p;
                (qp.*field)(i, j) += h;
                (qm.*field)(i, j) -= h;
                double numeric = (total_loss(qp) - total_loss(qm)) / (2 * h);
                worst = std::max(worst, rel_err(analytic(i, j), numeric));
            }
    };
    probe(&AttentionParams::embed, g.embed);
    probe(&AttentionParams::pos, g.pos);
    probe(&AttentionParams::proj, g.proj);
    for (int head = 0; head < 2; ++head)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                AttentionParams qp = p, qm = p;
                qp.heads_a[head](i, j) += h;
                qm.heads_a[head](i, j) -= h;
                worst = std::max(worst, rel_err(g.heads_a[head](i, j),
                                                (total_loss(qp) - total_loss(qm)) / (2 * h)));
                qp = p;
                qm = p;
                qp.heads_b[head](i, j) += h;
                qm.heads_b[head](i, j) -= h;
                worst = std::max(worst, rel_err(g.heads_b[head](i, j),
                                                (total_loss(qp) - total_loss(qm)) / (2 * h)));
            }
    CHECK(worst <= 2e-5);
}

TEST_CASE("training degenerate hyperparameters") {
    TokenDataset data;
    data.vocab = 4;
    data.sequences = {{1, 0, 3}};

    TrainHyper frozen;
    frozen.steps = 0;
    TrainResult r0 = train(data, frozen);
    AttentionParams fresh = init_params(4, frozen.context, frozen.dim, frozen.heads,
                                        frozen.beta, frozen.seed);
    CHECK((r0.params.embed - fresh.embed).norm() == 0.0);
    CHECK(r0.loss_log.empty());

    TrainHyper still;
    still.lr = 0.0;
    still.steps = 5;
    TrainResult r1 = train(data, still);
    CHECK((r1.params.proj - fresh.proj).norm() == 0.0);
    REQUIRE(r1.loss_log.size() == 5);
    for (double v : r1.loss_log) CHECK(v == r1.loss_log[0]);

    TokenDataset empty;
    empty.vocab = 4;
    CHECK_THROWS_AS(train(empty, still), std::invalid_argument);
    TokenDataset bad;
    bad.vocab = 4;
    bad.sequences = {{7}};
    CHECK_THROWS_AS(train(bad, still), std::invalid_argument);
}

TEST_CASE("single sequence golden: memorization under plain gradient descent") {
    // Prufer tokens of a fixed 10-vertex caterpillar, terminator included.
    TokenDataset data;
    data.vocab = tree_vocab(10);
    data.sequences = {encode_prufer_tokens({4, 0, 2, 2, 6, 1, 3, 3}, 10)};

    TrainHyper hyper;  // library defaults
    TrainResult r = train(data, hyper);
    REQUIRE(r.loss_log.size() == 500);
    CHECK(dataset_loss(r.params, data) < std::log(2.0));

    // 100-step moving average never increases
    double prev = 0.0;
    for (std::size_t i = 0; i + 100 <= r.loss_log.size(); ++i) {
        double ma = 0.0;
        for (std::size_t j = i; j < i + 100; ++j) ma += r.loss_log[j];
        ma /= 100.0;
        if (i > 0) REQUIRE(ma <= prev + 1e-9);
        prev = ma;
    }

    // greedy sampling reproduces the memorized sequence
    auto greedy = sample_tokens(r.params, 3, 123, 1e6);
    for (const auto& s : greedy) {
        REQUIRE(s.ended);
        CHECK(s.tokens == std::vector<int>{4, 0, 2, 2, 6, 1, 3, 3});
    }
}

TEST_CASE("sampling basics") {
    AttentionParams p = init_params(4, 6, 3, 1, 1.0, 99);
    CHECK(sample_tokens(p, 0, 1).empty());

    auto a = sample_tokens(p, 4, 42);
    auto b = sample_tokens(p, 4, 42);
    REQUIRE(a.size() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(a[i].tokens == b[i].tokens);
        CHECK(a[i].ended == b[i].ended);
        CHECK(a[i].tokens.size() <= 6);
        for (int tok : a[i].tokens) {
            CHECK(tok >= 0);
            CHECK(tok < 3);  // terminator never appears in the stream
        }
    }
    // each sequence has its own derived stream: a prefix batch matches
    auto c = sample_tokens(p, 2, 42);
    CHECK(c[0].tokens == a[0].tokens);
    CHECK(c[1].tokens == a[1].tokens);

    CHECK_THROWS_AS(sample_tokens(p, -1, 0), std::invalid_argument);
    CHECK_THROWS_AS(sample_tokens(p, 1, 0, -2.0), std::invalid_argument);
}

TEST_CASE("token codecs") {
    PruferCode code{3, 0, 1};
    std::vector<int> toks = encode_prufer_tokens(code, 5);
    REQUIRE(toks == std::vector<int>{3, 0, 1, 5});
    auto tree = decode_prufer_tokens({3, 0, 1}, 5);
    REQUIRE(tree.has_value());
    CHECK(prufer_encode(*tree) == code);

    CHECK_FALSE(decode_prufer_tokens({3, 0}, 5).has_value());      // wrong length
    CHECK_FALSE(decode_prufer_tokens({3, 0, 5}, 5).has_value());   // label out of range
    CHECK_THROWS_AS(encode_prufer_tokens({9}, 5), std::invalid_argument);

    Graph g = Graph::from_edge_list(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
    std::vector<int> bits = encode_adjacency_tokens(g);
    REQUIRE(bits == std::vector<int>{1, 0, 1, 1, 0, 1, 2});
    auto back = decode_adjacency_tokens({1, 0, 1, 1, 0, 1}, 4);
    REQUIRE(back.has_value());
    CHECK(back->closed_nbhd == g.closed_nbhd);
    CHECK_FALSE(decode_adjacency_tokens({1, 0, 1}, 4).has_value());
    CHECK_FALSE(decode_adjacency_tokens({1, 0, 2, 1, 0, 1}, 4).has_value());
}

TEST_CASE("checkpoint round trip") {
    AttentionParams p = init_params(6, 9, 4, 2, 1.7, 2025);
    nlohmann::json j = params_to_json(p);
    // through text, as a file would store it
    AttentionParams q = params_from_json(nlohmann::json::parse(j.dump()));
    CHECK((p.embed - q.embed).norm() == 0.0);
    CHECK((p.pos - q.pos).norm() == 0.0);
    CHECK((p.proj - q.proj).norm() == 0.0);
    CHECK((p.heads_a[1] - q.heads_a[1]).norm() == 0.0);
    CHECK(q.beta == p.beta);

    auto s1 = sample_tokens(p, 3, 8);
    auto s2 = sample_tokens(q, 3, 8);
    for (int i = 0; i < 3; ++i) REQUIRE(s1[i].tokens == s2[i].tokens);

    nlohmann::json bad = j;
    bad["version"] = 2;
    CHECK_THROWS_AS(params_from_json(bad), std::invalid_argument);
    bad = j;
    bad["embed"].erase(0);
    CHECK_THROWS_AS(params_from_json(bad), std::invalid_argument);
    CHECK_THROWS_AS(params_from_json(nlohmann::json::object()), std::invalid_argument);
}
