#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace actparse {
namespace {

LinearModel model_from_rows(const std::vector<std::vector<double>>& rows) {
  std::vector<double> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return LinearModel(flat, LabelSpace::numbered(rows.size()), rows.front().size());
}

TEST(EncodeSegment, MeanOfIdenticalUnitVectors) {
  const auto seq = FrameSequence::from_rows({{1, 0}, {1, 0}});
  EXPECT_EQ(encode_segment(seq, {0, 2}), (std::vector<double>{1.0, 0.0}));
}

TEST(EncodeSegment, NormalizesMean) {
  const auto seq = FrameSequence::from_rows({{2, 0}, {0, 2}});
  const auto phi = encode_segment(seq, {0, 2});
  EXPECT_NEAR(phi[0], 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(phi[1], 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(EncodeSegment, ZeroMeanIsReturnedUnnormalized) {
  const auto seq = FrameSequence::from_rows({{0, 0}, {0, 0}});
  EXPECT_EQ(encode_segment(seq, {0, 2}), (std::vector<double>{0.0, 0.0}));
}

TEST(EncodeSegment, RejectsOutOfBounds) {
  const auto seq = FrameSequence::from_rows({{0, 0}, {0, 0}});
  EXPECT_THROW(encode_segment(seq, {0, 3}), InvalidInput);
  EXPECT_THROW(encode_segment(seq, {1, 1}), InvalidInput);
}

TEST(SegmentEncoder, MatchesDirectEncoding) {
  std::mt19937_64 rng(3);
  const auto seq = testing::random_sequence(120, 5, rng, 4.0);
  const SegmentEncoder enc(seq);
  for (std::size_t a = 0; a < 120; a += 7)
    for (std::size_t b = a + 1; b <= 120; b += 11) {
      const auto fast = enc.encode({a, b});
      const auto direct = encode_segment(seq, {a, b});
      for (std::size_t d = 0; d < 5; ++d) ASSERT_NEAR(fast[d], direct[d], 1e-12);
    }
}

TEST(ScoreAllClasses, DotProducts) {
  const double f1[] = {3, 4};
  EXPECT_EQ(score_all_classes(model_from_rows({{1, 0}, {0, 1}}), f1),
            (std::vector<double>{3, 4}));
  EXPECT_EQ(score_all_classes(LinearModel::zeros(LabelSpace::numbered(3), 2), f1),
            (std::vector<double>{0, 0, 0}));
  const double f2[] = {1, 2};
  EXPECT_EQ(score_all_classes(model_from_rows({{1, 1}, {2, 0}, {0, 2}}), f2),
            (std::vector<double>{3, 2, 4}));
  const double f3[] = {1, 2, 3};
  EXPECT_THROW(score_all_classes(model_from_rows({{1, 1}, {2, 0}}), f3), InvalidInput);
}

TEST(ScoreAllClasses, IsLinear) {
  std::mt19937_64 rng(11);
  const auto model = testing::random_model(4, 6, rng);
  std::normal_distribution<double> g;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> x(6), y(6), z(6);
    for (auto& v : x) v = g(rng);
    for (auto& v : y) v = g(rng);
    const double a = g(rng), b = g(rng);
    for (int i = 0; i < 6; ++i) z[i] = a * x[i] + b * y[i];
    const auto sx = score_all_classes(model, x), sy = score_all_classes(model, y),
               sz = score_all_classes(model, z);
    for (int c = 0; c < 4; ++c) ASSERT_NEAR(sz[c], a * sx[c] + b * sy[c], 1e-9);
  }
}

TEST(PredictWithMargin, Examples) {
  const double s1[] = {3, 2, 4};
  EXPECT_EQ(predict_with_margin(s1), (Prediction{2, 1.0}));
  const double s2[] = {5, 5};
  EXPECT_EQ(predict_with_margin(s2), (Prediction{0, 0.0}));
  const double s3[] = {-1, -3};
  EXPECT_EQ(predict_with_margin(s3), (Prediction{0, 2.0}));
  const double s4[] = {1};
  EXPECT_THROW(predict_with_margin(s4), InvalidInput);
}

TEST(PredictWithMargin, ShiftInvariantAndNonNegative) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int t = 0; t < 2000; ++t) {
    std::vector<double> s(2 + t % 6);
    for (auto& v : s) v = u(rng);
    const double c = u(rng);
    auto shifted = s;
    for (auto& v : shifted) v += c;
    const auto p = predict_with_margin(s), q = predict_with_margin(shifted);
    ASSERT_GE(p.margin, 0.0);
    ASSERT_EQ(p.label, q.label);
    ASSERT_NEAR(p.margin, q.margin, 1e-9);
  }
}

TEST(TrainMulticlassSvm, SeparatedPrototypes) {
  // Three classes at (10,0), (0,10), (-10,-10) with unit Gaussian noise.
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g(0.0, 1.0);
  const double protos[3][2] = {{10, 0}, {0, 10}, {-10, -10}};
  std::vector<std::vector<double>> x;
  std::vector<ClassIndex> y;
  for (ClassIndex c = 0; c < 3; ++c)
    for (int i = 0; i < 100; ++i) {
      x.push_back({protos[c][0] + g(rng), protos[c][1] + g(rng)});
      y.push_back(c);
    }
  TrainConfig tc;
  tc.seed = 1;
  const auto model = train_multiclass_svm(x, y, LabelSpace::numbered(3), tc);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < x.size(); ++i) ok += predict_with_margin(model, x[i]).label == y[i];
  EXPECT_GE(static_cast<double>(ok) / x.size(), 0.98);

  // Training lowers the objective relative to the all-zero start.
  const auto zero = LinearModel::zeros(LabelSpace::numbered(3), 2);
  EXPECT_LT(svm_objective(model, x, y, tc.lambda), svm_objective(zero, x, y, tc.lambda));
}

TEST(TrainMulticlassSvm, TwoPointProblem) {
  TrainConfig tc;
  tc.lambda = 1e-4;
  const std::vector<std::vector<double>> x{{1, 0}, {0, 1}};
  const std::vector<ClassIndex> y{0, 1};
  const auto model = train_multiclass_svm(x, y, LabelSpace::numbered(2), tc);
  EXPECT_EQ(predict_with_margin(model, x[0]).label, 0u);
  EXPECT_EQ(predict_with_margin(model, x[1]).label, 1u);
}

TEST(TrainMulticlassSvm, Errors) {
  TrainConfig tc;
  const auto ls = LabelSpace::numbered(2);
  EXPECT_THROW(train_multiclass_svm({}, {}, ls, tc), InvalidInput);
  EXPECT_THROW(train_multiclass_svm({{1, 0}, {0, 1}}, {0, 0}, ls, tc), InvalidInput);
  EXPECT_THROW(train_multiclass_svm({{1, 0}, {0}}, {0, 1}, ls, tc), InvalidInput);
  tc.epochs = 0;
  EXPECT_THROW(train_multiclass_svm({{1, 0}, {0, 1}}, {0, 1}, ls, tc), ConfigError);
}

TEST(TrainMulticlassSvm, DeterministicUnderSeed) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> x;
  std::vector<ClassIndex> y;
  for (int i = 0; i < 90; ++i) {
    x.push_back({g(rng) + (i % 3), g(rng) - (i % 3), g(rng)});
    y.push_back(i % 3);
  }
  TrainConfig tc;
  tc.seed = 42;
  EXPECT_EQ(train_multiclass_svm(x, y, LabelSpace::numbered(3), tc),
            train_multiclass_svm(x, y, LabelSpace::numbered(3), tc));
}

TEST(TrainMulticlassSvm, FinalObjectiveBelowInitialAcrossLambdas) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> x;
  std::vector<ClassIndex> y;
  for (int i = 0; i < 150; ++i) {
    const ClassIndex c = i % 3;
    x.push_back({g(rng) + 1.5 * c, g(rng) - c, 1.0});
    y.push_back(c);
  }
  const auto ls = LabelSpace::numbered(3);
  for (double lambda : {1e-1, 1e-2, 1e-3}) {
    TrainConfig tc;
    tc.lambda = lambda;
    const auto model = train_multiclass_svm(x, y, ls, tc);
    const auto zero = LinearModel::zeros(ls, 3);
    EXPECT_LE(svm_objective(model, x, y, lambda), svm_objective(zero, x, y, lambda));
  }
}

}  // namespace
}  // namespace actparse
