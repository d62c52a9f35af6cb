#pragma once

#include <actparse/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace actparse {

using FrameIndex = std::size_t;
using ClassIndex = std::size_t;

// An ordered list of fixed-dimension per-frame feature vectors, stored
// row-major. Frame f occupies data[f*dim, (f+1)*dim).
class FrameSequence {
 public:
  FrameSequence() = default;

  FrameSequence(std::vector<double> data, std::size_t dim)
      : data_(std::move(data)), dim_(dim) {
    if (dim_ == 0) throw InvalidInput("frame dimension must be >= 1");
    if (data_.empty()) throw InvalidInput("sequence must contain at least one frame");
    if (data_.size() % dim_ != 0)
      throw InvalidInput("frame data size " + std::to_string(data_.size()) +
                         " is not a multiple of dimension " + std::to_string(dim_));
    for (std::size_t i = 0; i < data_.size(); ++i) {
      if (!std::isfinite(data_[i]))
        throw InvalidInput("non-finite value at frame " + std::to_string(i / dim_) +
                           ", column " + std::to_string(i % dim_));
    }
  }

  static FrameSequence from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw InvalidInput("sequence must contain at least one frame");
    const std::size_t dim = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * dim);
    for (std::size_t f = 0; f < rows.size(); ++f) {
      if (rows[f].size() != dim)
        throw InvalidInput("frame " + std::to_string(f) + " has dimension " +
                           std::to_string(rows[f].size()) + ", expected " +
                           std::to_string(dim));
      flat.insert(flat.end(), rows[f].begin(), rows[f].end());
    }
    return FrameSequence(std::move(flat), dim);
  }

  // N+1 in the usual X_{0:N} notation.
  std::size_t frame_count() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  std::size_t dim() const { return dim_; }

  std::span<const double> frame(FrameIndex f) const {
    return {data_.data() + f * dim_, dim_};
  }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const FrameSequence&, const FrameSequence&) = default;

 private:
  std::vector<double> data_;
  std::size_t dim_ = 0;
};

// Half-open frame interval [start, end).
struct Segment {
  FrameIndex start = 0;
  FrameIndex end = 0;

  std::size_t length() const { return end - start; }
  bool valid_within(std::size_t frame_count) const {
    return start < end && end <= frame_count;
  }

  friend bool operator==(const Segment&, const Segment&) = default;
};

class LabelSpace {
 public:
  LabelSpace() = default;

  LabelSpace(std::vector<std::string> names, ClassIndex background)
      : names_(std::move(names)), background_(background) {
    if (names_.size() < 2) throw InvalidInput("label space needs at least 2 classes");
    std::unordered_set<std::string> seen;
    for (const auto& n : names_) {
      if (!seen.insert(n).second) throw InvalidInput("duplicate class name '" + n + "'");
    }
    if (background_ >= names_.size())
      throw InvalidInput("background index " + std::to_string(background_) +
                         " out of range");
  }

  std::size_t size() const { return names_.size(); }
  ClassIndex background() const { return background_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(ClassIndex c) const { return names_.at(c); }

  ClassIndex index_of(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw InvalidInput("unknown class label '" + name + "'");
    return static_cast<ClassIndex>(it - names_.begin());
  }

  // Class names c0..c{m-1}, background at index 0.
  static LabelSpace numbered(std::size_t m, ClassIndex background = 0) {
    std::vector<std::string> names;
    for (std::size_t c = 0; c < m; ++c) names.push_back("c" + std::to_string(c));
    return LabelSpace(std::move(names), background);
  }

  friend bool operator==(const LabelSpace&, const LabelSpace&) = default;

 private:
  std::vector<std::string> names_;
  ClassIndex background_ = 0;
};

// A complete segmentation: breakpoints B_0 = 0 < ... < B_K = frame_count and
// one label per segment [B_i, B_{i+1}).
struct Parse {
  std::vector<FrameIndex> breakpoints;
  std::vector<ClassIndex> labels;
  double total_score = 0.0;

  std::size_t segment_count() const { return labels.size(); }
  Segment segment(std::size_t i) const { return {breakpoints[i], breakpoints[i + 1]}; }

  friend bool operator==(const Parse&, const Parse&) = default;
};

struct ParserConfig {
  std::size_t l_min = 40;
  std::size_t l_max = 400;
  std::vector<std::size_t> scales{75, 150, 225, 300};
  double segment_penalty = 0.0;
  double lambda = 1e-3;
  std::size_t folds = 5;
  std::uint64_t seed = 0;

  // Throws ConfigError. l_max >= 2*l_min makes every length >= l_min
  // decomposable into pieces within [l_min, l_max].
  void validate() const {
    if (l_min < 1) throw ConfigError("l_min must be >= 1");
    if (l_max < l_min) throw ConfigError("l_max must be >= l_min");
    if (l_max < 2 * l_min)
      throw ConfigError("l_max (" + std::to_string(l_max) + ") must be >= 2*l_min (" +
                        std::to_string(2 * l_min) + ")");
    if (scales.empty()) throw ConfigError("at least one context scale is required");
    for (auto s : scales)
      if (s < 1) throw ConfigError("every scale must be >= 1");
    if (!(segment_penalty >= 0.0) || !std::isfinite(segment_penalty))
      throw ConfigError("penalty must be a finite value >= 0");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be > 0");
    if (folds < 2) throw ConfigError("folds must be >= 2");
  }
};

struct ParseValidity {
  bool endpoints_pinned = false;
  bool strictly_increasing = false;
  bool lengths_in_bounds = false;
  bool label_count_consistent = false;
  std::vector<std::string> problems;

  bool ok() const {
    return endpoints_pinned && strictly_increasing && lengths_in_bounds &&
           label_count_consistent;
  }
};

// Checks the tiling constraints of a parse. Never throws.
inline ParseValidity validate_parse(const Parse& parse, std::size_t frame_count,
                                    std::size_t l_min, std::size_t l_max) {
  ParseValidity r;
  const auto& b = parse.breakpoints;

  r.endpoints_pinned = b.size() >= 2 && b.front() == 0 && b.back() == frame_count;
  if (!r.endpoints_pinned) {
    if (b.size() < 2)
      r.problems.push_back("fewer than two breakpoints");
    else if (b.front() != 0)
      r.problems.push_back("first breakpoint is " + std::to_string(b.front()) + ", not 0");
    else
      r.problems.push_back("last breakpoint " + std::to_string(b.back()) +
                           " != frame count " + std::to_string(frame_count));
  }

  r.strictly_increasing = true;
  r.lengths_in_bounds = true;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    if (b[i + 1] <= b[i]) {
      r.strictly_increasing = false;
      r.lengths_in_bounds = false;
      r.problems.push_back("breakpoints not increasing at position " + std::to_string(i + 1));
      continue;
    }
    const std::size_t len = b[i + 1] - b[i];
    if (len < l_min || len > l_max) {
      r.lengths_in_bounds = false;
      r.problems.push_back("segment " + std::to_string(i) + " has length " +
                           std::to_string(len) + " outside [" + std::to_string(l_min) +
                           ", " + std::to_string(l_max) + "]");
    }
  }
  if (b.size() < 2) r.lengths_in_bounds = false;

  r.label_count_consistent = !b.empty() && parse.labels.size() + 1 == b.size();
  if (!r.label_count_consistent)
    r.problems.push_back(std::to_string(parse.labels.size()) + " labels for " +
                         std::to_string(b.size()) + " breakpoints");
  return r;
}

inline ParseValidity validate_parse(const Parse& parse, std::size_t frame_count,
                                    const ParserConfig& config) {
  return validate_parse(parse, frame_count, config.l_min, config.l_max);
}

}  // namespace actparse
