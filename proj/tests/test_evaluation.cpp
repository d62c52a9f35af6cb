#include "test_support.hpp"

#include <gtest/gtest.h>

namespace actparse {
namespace {

TEST(ParseToFrameLabels, Expands) {
  const Parse p{{0, 2, 5}, {1, 0}, 0.0};
  EXPECT_EQ(parse_to_frame_labels(p), (std::vector<ClassIndex>{1, 1, 0, 0, 0}));
  EXPECT_THROW(parse_to_frame_labels(Parse{{0, 3, 3}, {0, 1}, 0.0}), InvalidInput);
}

TEST(FrameLabelsToParse, MaximalRuns) {
  const auto p = frame_labels_to_parse({2, 2, 0, 0, 0, 2});
  EXPECT_EQ(p.breakpoints, (std::vector<FrameIndex>{0, 2, 5, 6}));
  EXPECT_EQ(p.labels, (std::vector<ClassIndex>{2, 0, 2}));
  EXPECT_THROW(frame_labels_to_parse({}), InvalidInput);
}

TEST(FrameLabels, RoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<ClassIndex> lab(0, 3);
  for (int t = 0; t < 200; ++t) {
    std::vector<ClassIndex> labels(1 + t % 37);
    for (auto& c : labels) c = lab(rng);
    ASSERT_EQ(parse_to_frame_labels(frame_labels_to_parse(labels)), labels);
  }
}

TEST(PerFrameAccuracy, Examples) {
  EXPECT_EQ(per_frame_accuracy({0, 1, 1, 2}, {0, 1, 2, 2}), 0.75);
  EXPECT_EQ(per_frame_accuracy({1, 1}, {1, 1}), 1.0);
  EXPECT_EQ(per_frame_accuracy({0, 0}, {1, 1}), 0.0);
  // Background (0) excluded: frames 1..3 remain, two correct.
  EXPECT_DOUBLE_EQ(per_frame_accuracy({0, 1, 1, 2}, {0, 1, 2, 2}, ClassIndex{0}), 2.0 / 3.0);
}

TEST(PerFrameAccuracy, Errors) {
  EXPECT_THROW(per_frame_accuracy({0, 1}, {0}), InvalidInput);
  EXPECT_THROW(per_frame_accuracy({}, {}), InvalidInput);
  EXPECT_THROW(per_frame_accuracy({0}, {0}, ClassIndex{0}), InvalidInput);
}

TEST(PerFrameAccuracy, IdentityAndSymmetry) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<ClassIndex> lab(0, 4);
  for (int t = 0; t < 200; ++t) {
    std::vector<ClassIndex> a(1 + t % 50), b(a.size());
    for (auto& c : a) c = lab(rng);
    for (auto& c : b) c = lab(rng);
    ASSERT_EQ(per_frame_accuracy(a, a), 1.0);
    ASSERT_EQ(per_frame_accuracy(a, b), per_frame_accuracy(b, a));
    const double acc = per_frame_accuracy(a, b);
    ASSERT_GE(acc, 0.0);
    ASSERT_LE(acc, 1.0);
  }
}

TEST(ConfusionMatrix, TraceOverTotalIsAccuracy) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<ClassIndex> lab(0, 2);
  for (int t = 0; t < 100; ++t) {
    std::vector<ClassIndex> a(1 + t), b(a.size());
    for (auto& c : a) c = lab(rng);
    for (auto& c : b) c = lab(rng);
    const auto cm = confusion_matrix(a, b, 3);
    ASSERT_EQ(cm.total(), a.size());
    ASSERT_DOUBLE_EQ(static_cast<double>(cm.trace()) / cm.total(), per_frame_accuracy(a, b));
  }
}

TEST(ConfusionMatrix, CellsAndErrors) {
  const auto cm = confusion_matrix({0, 1, 1, 2}, {0, 1, 2, 2}, 3);
  EXPECT_EQ(cm.at(2, 1), 1u);
  EXPECT_EQ(cm.at(2, 2), 1u);
  EXPECT_EQ(cm.trace(), 3u);
  EXPECT_THROW(confusion_matrix({0, 3}, {0, 1}, 3), InvalidInput);
  EXPECT_THROW(confusion_matrix({0}, {0, 1}, 3), InvalidInput);
}

}  // namespace
}  // namespace actparse
