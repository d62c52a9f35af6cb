#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace actparse {
namespace {

GenSpec small_spec() {
  GenSpec g;
  g.labels = LabelSpace::numbered(4);
  g.dim = 3;
  g.min_length = 5;
  g.max_length = 9;
  g.min_segments = 3;
  g.max_segments = 6;
  g.sequences = 8;
  g.seed = 3;
  return g;
}

TEST(Generate, NoiselessFramesEqualPrototypes) {
  auto g = small_spec();
  g.noise = 0.0;
  g.prototypes = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
  for (const auto& s : generate(g))
    for (std::size_t i = 0; i < s.truth.segment_count(); ++i)
      for (auto f = s.truth.segment(i).start; f < s.truth.segment(i).end; ++f)
        for (std::size_t d = 0; d < 3; ++d)
          ASSERT_EQ(s.frames.frame(f)[d], g.prototypes[s.truth.labels[i]][d]);
}

TEST(Generate, GroundTruthIsValid) {
  auto g = small_spec();
  for (const auto& s : generate(g)) {
    ASSERT_TRUE(validate_parse(s.truth, s.frames.frame_count(), g.min_length, g.max_length).ok());
    ASSERT_GE(s.truth.segment_count(), g.min_segments);
    for (std::size_t i = 1; i < s.truth.segment_count(); ++i)
      ASSERT_NE(s.truth.labels[i], s.truth.labels[i - 1]);
    ASSERT_EQ(s.frames.dim(), 3u);
  }
}

TEST(Generate, DeterministicUnderSeed) {
  const auto g = small_spec();
  const auto a = generate(g), b = generate(g);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].frames, b[i].frames);
    EXPECT_EQ(a[i].truth, b[i].truth);
  }
  auto h = g;
  h.seed = 4;
  EXPECT_FALSE(generate(h)[0].frames == a[0].frames);
}

TEST(Generate, PrototypesIndependentOfSequenceSeed) {
  auto g = small_spec();
  g.noise = 0.0;
  auto h = g;
  h.seed = 99;
  // Noiseless frames of the same class are identical across seeds.
  const auto a = generate(g), b = generate(h);
  const ClassIndex c = a[0].truth.labels[0];
  for (const auto& s : b)
    for (std::size_t i = 0; i < s.truth.segment_count(); ++i)
      if (s.truth.labels[i] == c) {
        for (std::size_t d = 0; d < 3; ++d)
          ASSERT_EQ(s.frames.frame(s.truth.breakpoints[i])[d], a[0].frames.frame(0)[d]);
        return;
      }
}

TEST(Generate, InfeasibleSpecs) {
  auto g = small_spec();
  g.couplings = {{0, 1, 2, 7}};
  EXPECT_THROW(generate(g), InvalidInput);
  g.couplings = {{0, 1, 2, 2}};
  EXPECT_THROW(generate(g), InvalidInput);
  g.couplings = {};
  g.class_weights = {1, 0, 0, 0};
  EXPECT_THROW(generate(g), InvalidInput);
  g.class_weights = {};
  g.min_length = 10;
  g.max_length = 5;
  EXPECT_THROW(generate(g), InvalidInput);
  g = small_spec();
  g.prototypes = {{1, 0, 0}};
  EXPECT_THROW(generate(g), InvalidInput);
}

TEST(Generate, CouplingRulesHold) {
  const auto g = coupled_benchmark_spec(30, 5);
  std::size_t a_seqs = 0, b_seqs = 0;
  for (const auto& s : generate(g)) {
    bool has_a = false, has_b = false, has_ca = false, has_cb = false;
    for (std::size_t i = 0; i < s.truth.segment_count(); ++i) {
      const ClassIndex c = s.truth.labels[i];
      has_a |= c == 1;
      has_b |= c == 2;
      has_ca |= c == 3;
      has_cb |= c == 4;
      if (c == 1) ASSERT_TRUE(i > 0 && s.truth.labels[i - 1] == 3);
      if (c == 2) ASSERT_TRUE(i > 0 && s.truth.labels[i - 1] == 4);
    }
    ASSERT_FALSE(has_a && has_b);
    ASSERT_FALSE(has_a && has_cb);
    ASSERT_FALSE(has_b && has_ca);
    a_seqs += has_a;
    b_seqs += has_b;
  }
  EXPECT_GT(a_seqs, 0u);
  EXPECT_GT(b_seqs, 0u);
}

TEST(Generate, CoupledPairIsLocallyIndistinguishable) {
  // A context-free classifier should separate A from B no better than chance;
  // the bound is 0.5 plus 2.5 standard errors of a fair coin over n segments.
  const auto train = generate(coupled_benchmark_spec(40, 1));
  const auto test = generate(coupled_benchmark_spec(40, 2));
  const LabelSpace labels = coupled_benchmark_spec(1, 0).labels;
  std::vector<std::vector<double>> x;
  std::vector<ClassIndex> y;
  for (const auto& s : train)
    for (std::size_t i = 0; i < s.truth.segment_count(); ++i) {
      x.push_back(encode_segment(s.frames, s.truth.segment(i)));
      y.push_back(s.truth.labels[i]);
    }
  TrainConfig tc;
  const auto model = train_multiclass_svm(x, y, labels, tc);
  std::size_t n = 0, right = 0;
  for (const auto& s : test)
    for (std::size_t i = 0; i < s.truth.segment_count(); ++i) {
      const ClassIndex c = s.truth.labels[i];
      if (c != 1 && c != 2) continue;
      const auto sc = score_all_classes(model, encode_segment(s.frames, s.truth.segment(i)));
      const ClassIndex guess = sc[1] >= sc[2] ? 1 : 2;
      ++n;
      right += guess == c;
    }
  ASSERT_GT(n, 100u);
  const double acc = static_cast<double>(right) / n;
  EXPECT_LE(acc, 0.5 + 2.5 * std::sqrt(0.25 / n)) << "n = " << n;
}

}  // namespace
}  // namespace actparse
