#pragma once

#include <actparse/core_types.hpp>

#include <optional>
#include <string>
#include <vector>

namespace actparse {

inline std::vector<ClassIndex> parse_to_frame_labels(const Parse& parse) {
  const auto& b = parse.breakpoints;
  if (b.size() < 2 || b.front() != 0 || parse.labels.size() + 1 != b.size())
    throw InvalidInput("parse is not a valid segmentation");
  std::vector<ClassIndex> out;
  out.reserve(b.back());
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    if (b[i + 1] <= b[i]) throw InvalidInput("parse breakpoints are not increasing");
    out.insert(out.end(), b[i + 1] - b[i], parse.labels[i]);
  }
  return out;
}

// Maximal runs of equal labels as a parse (total_score 0).
inline Parse frame_labels_to_parse(const std::vector<ClassIndex>& labels) {
  if (labels.empty()) throw InvalidInput("label array is empty");
  Parse p;
  p.breakpoints.push_back(0);
  for (std::size_t f = 1; f <= labels.size(); ++f) {
    if (f == labels.size() || labels[f] != labels[f - 1]) {
      p.breakpoints.push_back(f);
      p.labels.push_back(labels[f - 1]);
    }
  }
  return p;
}

// Fraction of frames with predicted == truth. With `exclude` set, frames
// whose true label equals it are left out of numerator and denominator.
inline double per_frame_accuracy(const std::vector<ClassIndex>& predicted,
                                 const std::vector<ClassIndex>& truth,
                                 std::optional<ClassIndex> exclude = std::nullopt) {
  if (predicted.size() != truth.size())
    throw InvalidInput("label arrays differ in length: " + std::to_string(predicted.size()) +
                       " vs " + std::to_string(truth.size()));
  if (truth.empty()) throw InvalidInput("label arrays are empty");
  std::size_t hits = 0;
  std::size_t counted = 0;
  for (std::size_t f = 0; f < truth.size(); ++f) {
    if (exclude && truth[f] == *exclude) continue;
    ++counted;
    if (predicted[f] == truth[f]) ++hits;
  }
  if (counted == 0) throw InvalidInput("no frames left to evaluate after exclusion");
  return static_cast<double>(hits) / static_cast<double>(counted);
}

// counts[t][p]: frames with true label t predicted as p.
struct ConfusionMatrix {
  std::size_t classes = 0;
  std::vector<std::size_t> counts;  // row-major classes x classes

  std::size_t at(ClassIndex truth, ClassIndex predicted) const {
    return counts[truth * classes + predicted];
  }
  std::size_t total() const {
    std::size_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }
  std::size_t trace() const {
    std::size_t s = 0;
    for (std::size_t c = 0; c < classes; ++c) s += at(c, c);
    return s;
  }
};

inline ConfusionMatrix confusion_matrix(const std::vector<ClassIndex>& predicted,
                                        const std::vector<ClassIndex>& truth, std::size_t m) {
  if (predicted.size() != truth.size())
    throw InvalidInput("label arrays differ in length");
  ConfusionMatrix cm{m, std::vector<std::size_t>(m * m, 0)};
  for (std::size_t f = 0; f < truth.size(); ++f) {
    if (truth[f] >= m || predicted[f] >= m)
      throw InvalidInput("label out of range at frame " + std::to_string(f));
    ++cm.counts[truth[f] * m + predicted[f]];
  }
  return cm;
}

}  // namespace actparse
