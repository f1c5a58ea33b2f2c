#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "mmscs/error.hpp"
#include "mmscs/nn/checkpoint.hpp"
#include "mmscs/nn/layers.hpp"
#include "mmscs/nn/optimizer.hpp"
#include "support/gradcheck.hpp"

using namespace mmscs;
using namespace mmscs::nn;
using testing_support::check_gradients;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(rng);
  return m;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Sum of the output weighted by a fixed random matrix, so every entry matters.
Var weighted_sum(Tape& t, const Var& x, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sum(hadamard(x, t.constant(random_matrix(x.rows(), x.cols(), rng))));
}

}  // namespace

TEST(PositionalEncoding, KnownValues) {
  Matrix pe = positional_encoding(3, 4);
  EXPECT_EQ(pe(0, 0), 0.0);
  EXPECT_EQ(pe(0, 1), 1.0);
  EXPECT_EQ(pe(0, 2), 0.0);
  EXPECT_EQ(pe(0, 3), 1.0);
  for (std::size_t d : {2u, 8u, 64u}) EXPECT_NEAR(positional_encoding(2, d)(1, 0), 0.8414709848078965, 1e-15);
}

TEST(PositionalEncoding, PythagoreanIdentity) {
  Matrix pe = positional_encoding(50, 16);
  for (Eigen::Index p = 0; p < pe.rows(); ++p)
    for (Eigen::Index i = 0; i < 8; ++i)
      EXPECT_NEAR(pe(p, 2 * i) * pe(p, 2 * i) + pe(p, 2 * i + 1) * pe(p, 2 * i + 1), 1.0, 1e-12);
}

TEST(PositionalEncoding, OddWidthIsAConfigError) {
  EXPECT_THROW(positional_encoding(4, 5), ConfigError);
  EXPECT_THROW(positional_encoding(0, 4), ConfigError);
}

TEST(Attention, SinglePosition) {
  Tape t;
  Var one = t.constant(Matrix::Ones(1, 1));
  auto a = scaled_attention(one, one, one);
  EXPECT_EQ(a.output.value()(0, 0), 1.0);
  EXPECT_EQ(a.weights.value()(0, 0), 1.0);
}

TEST(Attention, IdenticalKeysSplitEvenly) {
  Tape t;
  Var q = t.constant(Matrix::Ones(1, 2));
  Var k = t.constant(Matrix::Ones(2, 2));
  auto a = scaled_attention(q, k, k);
  EXPECT_DOUBLE_EQ(a.weights.value()(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(a.weights.value()(0, 1), 0.5);
}

TEST(Attention, MaskedKeyGetsZeroWeight) {
  Tape t;
  Var q = t.constant(Matrix::Ones(1, 2));
  Matrix km(2, 2);
  km << 1, 0, 5, 5;
  Var k = t.constant(km);
  auto a = scaled_attention(q, k, k, {true, false});
  EXPECT_EQ(a.weights.value()(0, 0), 1.0);
  EXPECT_EQ(a.weights.value()(0, 1), 0.0);
  EXPECT_THROW(scaled_attention(q, k, k, {false, false}), NumericError);
}

TEST(Attention, RowsSumToOneOnRandomMaskedInputs) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index len = 1 + static_cast<Eigen::Index>(rng() % 7);
    std::vector<bool> mask(static_cast<std::size_t>(len));
    for (auto&& m : mask) m = rng() % 3 != 0;
    mask[rng() % mask.size()] = true;
    Tape t;
    Var x = t.constant(random_matrix(len, 4, rng, 3.0));
    auto a = scaled_attention(x, x, x, mask);
    const Matrix& w = a.weights.value();
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      double total = 0.0;
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        if (!mask[static_cast<std::size_t>(c)]) EXPECT_EQ(w(r, c), 0.0);
        else total += w(r, c);
      }
      EXPECT_NEAR(total, 1.0, 1e-9);
    }
  }
}

TEST(MultiHead, SingleHeadIsProjectedAttention) {
  std::mt19937_64 rng(5);
  ParameterStore store(1);
  init_attention(store, "att", 6, 1);
  Tape t(&store);
  Var x = t.constant(random_matrix(3, 6, rng));
  Var mh = multi_head_attention(x, "att", 1);
  auto ref = scaled_attention(matmul(x, t.param("att.head0.wq")), matmul(x, t.param("att.head0.wk")),
                              matmul(x, t.param("att.head0.wv")));
  EXPECT_EQ(mh.value(), ref.output.value());
}

TEST(MultiHead, OutputWidthIsHeadsTimesHeadDim) {
  std::mt19937_64 rng(5);
  ParameterStore store(1);
  init_attention(store, "att", 128, 8);
  Tape t(&store);
  Var x = t.constant(random_matrix(4, 128, rng));
  EXPECT_EQ(multi_head_attention(x, "att", 8).cols(), 8 * 16);
}

TEST(MultiHead, PermutingRowsPermutesOutput) {
  std::mt19937_64 rng(9);
  ParameterStore store(2);
  init_attention(store, "att", 8, 2);
  Matrix x = random_matrix(3, 8, rng);
  Matrix swapped = x;
  swapped.row(0).swap(swapped.row(2));
  Tape t(&store);
  Matrix a = multi_head_attention(t.constant(x), "att", 2).value();
  Matrix b = multi_head_attention(t.constant(swapped), "att", 2).value();
  EXPECT_LT((a.row(0) - b.row(2)).norm(), 1e-12);
  EXPECT_LT((a.row(1) - b.row(1)).norm(), 1e-12);
  EXPECT_LT((a.row(2) - b.row(0)).norm(), 1e-12);
}

TEST(MultiHead, MissingParametersAreListed) {
  ParameterStore store(1);
  init_attention(store, "att", 4, 1);
  Tape t(&store);
  Var x = t.constant(Matrix::Ones(2, 4));
  try {
    multi_head_attention(x, "att", 2);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("att.head1.wq"), std::string::npos);
    EXPECT_NE(msg.find("att.head1.wv"), std::string::npos);
  }
}

TEST(Transformer, LayerNormStatistics) {
  std::mt19937_64 rng(4);
  ParameterStore store(3);
  init_transformer(store, "blk", 16, 4);
  Tape t(&store);
  Matrix out = transformer_block(t.constant(random_matrix(5, 16, rng)), "blk", 4).value();
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double mean = out.row(r).mean();
    const double var = (out.row(r).array() - mean).square().mean();
    EXPECT_NEAR(mean, 0.0, 1e-9);
    EXPECT_NEAR(var, 1.0, 1e-6);
  }
}

TEST(Transformer, ZeroInputWithZeroBiasesGivesZero) {
  ParameterStore store(3);
  init_transformer(store, "blk", 8, 2);
  Tape t(&store);
  Matrix out = transformer_block(t.constant(Matrix::Zero(3, 8)), "blk", 2).value();
  EXPECT_EQ(out.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Gradients, Primitives) {
  std::mt19937_64 rng(21);
  ParameterStore store(0);
  store.add("a", random_matrix(3, 4, rng));
  store.add("b", random_matrix(4, 2, rng));
  store.add("c", random_matrix(3, 4, rng));
  store.add("row", random_matrix(1, 4, rng));
  store.add("gain", random_matrix(1, 4, rng));
  store.add("bias", random_matrix(1, 4, rng));
  store.add("table", random_matrix(5, 4, rng));
  auto report = check_gradients(store, [](Tape& t) {
    Var a = t.param("a"), b = t.param("b"), c = t.param("c");
    Var x = add(matmul(a, b), matmul(c, b));
    Var y = hadamard(sub(a, c), add_row(c, t.param("row")));
    Var z = concat_cols({tanh(x), sigmoid(slice_cols(y, 1, 2)), elu(scale(x, 0.7))});
    Var w = concat_rows({leaky_relu(z), relu(add_scalar(z, 0.3))});
    Var n = layer_norm_rows(y, t.param("gain"), t.param("bias"));
    Var g = gather_rows(t.param("table"), {4, 1, 1, 0});
    Var s = masked_softmax_rows(matmul(n, transpose(g)), {true, false, true, true});
    Var total = add(weighted_sum(t, w, 1), weighted_sum(t, s, 2));
    total = add(total, weighted_sum(t, mean_rows(slice_rows(n, 1, 2)), 3));
    return add(total, cosine(slice_rows(a, 0, 1), slice_rows(c, 2, 1)));
  });
  EXPECT_LT(report.max_rel_error, 1e-4) << report.worst;
}

TEST(Gradients, TransformerBlock) {
  std::mt19937_64 rng(22);
  ParameterStore store(7);
  init_transformer(store, "blk", 8, 2);
  store.add("x", random_matrix(4, 8, rng));
  auto report = check_gradients(store, [](Tape& t) {
    Var out = transformer_block(t.param("x"), "blk", 2, {true, true, false, true});
    return weighted_sum(t, masked_mean_rows(out, {true, true, false, true}), 5);
  });
  EXPECT_LT(report.max_rel_error, 1e-4) << report.worst;
}

TEST(Gradients, Lstm) {
  std::mt19937_64 rng(23);
  ParameterStore store(8);
  init_lstm(store, "lstm", 3, 4);
  store.add("x", random_matrix(4, 3, rng));
  auto report = check_gradients(store, [](Tape& t) {
    return weighted_sum(t, lstm_sequence(t.param("x"), "lstm"), 6);
  });
  EXPECT_LT(report.max_rel_error, 1e-4) << report.worst;
}

TEST(Gradients, RankingLoss) {
  std::mt19937_64 rng(24);
  ParameterStore store(0);
  store.add("c", random_matrix(1, 6, rng));
  store.add("p", random_matrix(1, 6, rng));
  store.add("n", random_matrix(1, 6, rng));
  auto report = check_gradients(store, [](Tape& t) {
    return ranking_loss(t.param("c"), t.param("p"), t.param("n"), 2.5);  // keep the hinge active
  });
  EXPECT_LT(report.max_rel_error, 1e-4) << report.worst;
}

TEST(Lstm, ZeroWeightsGiveZeroHidden) {
  ParameterStore store(0);
  store.add("l.wx", Matrix::Zero(3, 8));
  store.add("l.wh", Matrix::Zero(2, 8));
  store.add("l.b", Matrix::Zero(1, 8));
  Tape t(&store);
  EXPECT_EQ(lstm_sequence(t.constant(Matrix::Ones(4, 3)), "l").value(), Matrix::Zero(1, 2));
}

TEST(Lstm, SingleStepIsOneCell) {
  std::mt19937_64 rng(12);
  ParameterStore store(4);
  init_lstm(store, "l", 3, 2);
  store.at("l.b") = random_matrix(1, 8, rng);
  Matrix x = random_matrix(1, 3, rng);
  Tape t(&store);
  Matrix h = lstm_sequence(t.constant(x), "l").value();
  Matrix z = x * store.at("l.wx") + store.at("l.b");
  auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  for (int j = 0; j < 2; ++j) {
    const double c = sig(z(0, j)) * std::tanh(z(0, 4 + j));
    EXPECT_NEAR(h(0, j), sig(z(0, 6 + j)) * std::tanh(c), 1e-15);
  }
}

TEST(Cosine, KnownValues) {
  EXPECT_EQ(cosine(vec({1, 0}), vec({1, 0})), 1.0);
  EXPECT_EQ(cosine(vec({1, 0}), vec({0, 1})), 0.0);
  EXPECT_NEAR(cosine(vec({1, 2, 3}), vec({4, 5, 6})), 32.0 / std::sqrt(14.0 * 77.0), 1e-15);
  EXPECT_NEAR(cosine(vec({1, 2, 3}), vec({4, 5, 6})), 0.974631846, 1e-9);
  EXPECT_THROW(cosine(vec({0, 0}), vec({1, 0})), NumericError);
}

TEST(Cosine, ScaleInvariant) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> s(0.01, 100.0);
  for (int i = 0; i < 100; ++i) {
    Vector a = random_matrix(1, 5, rng).row(0), b = random_matrix(1, 5, rng).row(0);
    EXPECT_NEAR(cosine(Vector(a * s(rng)), Vector(b * s(rng))), cosine(a, b), 1e-12);
  }
}

TEST(RankingLoss, KnownValues) {
  // Unit vectors with chosen cosines against code = e1.
  auto at = [](double c) { return vec({c, std::sqrt(1 - c * c)}); };
  const Vector code = vec({1, 0});
  EXPECT_EQ(ranking_loss(code, at(0.9), at(0.1), 0.05), 0.0);
  EXPECT_NEAR(ranking_loss(code, at(0.2), at(0.3), 0.05), 0.15, 1e-12);
  EXPECT_NEAR(ranking_loss(code, at(0.4), at(0.4), 0.05), 0.05, 1e-15);
  EXPECT_THROW(ranking_loss(code, vec({0, 0}), at(0.4), 0.05), NumericError);
}

TEST(RankingLoss, NonNegativeAndZeroPastMargin) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 500; ++i) {
    Vector c = random_matrix(1, 4, rng).row(0), p = random_matrix(1, 4, rng).row(0),
           n = random_matrix(1, 4, rng).row(0);
    const double loss = ranking_loss(c, p, n, 0.05);
    EXPECT_GE(loss, 0.0);
    if (cosine(c, p) - cosine(c, n) >= 0.05) EXPECT_EQ(loss, 0.0);
  }
}

TEST(Adam, ZeroGradientsLeaveParametersUnchanged) {
  ParameterStore store(1);
  store.add_uniform("w", 3, 3, 1.0);
  const ParameterStore before = store;
  Adam adam;
  adam.step(store, zero_gradients(store));
  EXPECT_TRUE(store == before);
}

TEST(Adam, DescendsOnSquare) {
  ParameterStore store(0);
  store.add("theta", Matrix::Ones(1, 1));
  Adam adam;
  adam.step(store, {{"theta", 2.0 * store.at("theta")}});
  EXPECT_LT(std::abs(store.at("theta")(0, 0)), 1.0);
}

TEST(Adam, ConvergesOnQuadratic) {
  ParameterStore store(0);
  Matrix start(1, 2);
  start << 0.08, -0.05;
  store.add("theta", start);
  Adam adam;
  for (int i = 0; i < 200; ++i) {
    Matrix g = store.at("theta");
    g(0, 1) *= 4.0;  // f = x^2/2 + 2 y^2
    adam.step(store, {{"theta", g}});
  }
  EXPECT_LT(store.at("theta").norm(), 1e-2);
}

TEST(Adam, RejectsNanAndMismatchedNames) {
  ParameterStore store(0);
  store.add("w", Matrix::Ones(1, 2));
  Adam adam;
  Matrix bad = Matrix::Ones(1, 2);
  bad(0, 1) = std::nan("");
  try {
    adam.step(store, {{"w", bad}});
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("w"), std::string::npos);
  }
  EXPECT_THROW(adam.step(store, {}), ConfigError);
  EXPECT_THROW(adam.step(store, {{"w", Matrix::Ones(1, 2)}, {"v", Matrix::Ones(1, 1)}}), ConfigError);
}

TEST(Checkpoint, RoundTripAndCorruption) {
  ParameterStore store(99);
  store.add_uniform("a.w", 3, 5, 1.0);
  store.add_fan_in("b", 1, 7);
  Checkpoint ck{"{\"dim\":4}", {"<pad>", "<unk>", "token"}, store};
  std::stringstream s;
  write_checkpoint(s, ck);
  const std::string bytes = s.str();
  EXPECT_EQ(bytes.substr(0, 8), "MMSCSCKP");
  std::stringstream in(bytes);
  Checkpoint back = read_checkpoint(in);
  EXPECT_EQ(back.config_json, ck.config_json);
  EXPECT_EQ(back.vocabulary, ck.vocabulary);
  EXPECT_TRUE(back.params == store);
  EXPECT_EQ(back.params.seed(), 99u);

  std::string corrupt = bytes;
  corrupt[0] = 'X';
  std::stringstream c1(corrupt);
  EXPECT_THROW(read_checkpoint(c1), FormatError);
  std::stringstream c2(bytes.substr(0, bytes.size() - 3));
  try {
    read_checkpoint(c2);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_GT(e.offset(), 8u);
  }
}

TEST(Determinism, ForwardPassIsBitStable) {
  std::mt19937_64 rng(1);
  ParameterStore a(17), b(17);
  init_transformer(a, "blk", 8, 2);
  init_transformer(b, "blk", 8, 2);
  ASSERT_TRUE(a == b);
  Matrix x = random_matrix(5, 8, rng);
  Tape ta(&a), tb(&b);
  EXPECT_EQ(transformer_block(ta.constant(x), "blk", 2).value(),
            transformer_block(tb.constant(x), "blk", 2).value());
}
