#pragma once

#include <actparse/core_types.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace actparse {

// Multi-class linear scorer: score_j(x) = <w_j, x>. No bias term; append a
// constant-1 feature if one is needed.
class LinearModel {
 public:
  LinearModel() = default;

  LinearModel(std::vector<double> weights, LabelSpace labels, std::size_t input_dim)
      : weights_(std::move(weights)), labels_(std::move(labels)), input_dim_(input_dim) {
    if (input_dim_ == 0) throw InvalidInput("model input dimension must be >= 1");
    if (weights_.size() != labels_.size() * input_dim_)
      throw InvalidInput("weight matrix has " + std::to_string(weights_.size()) +
                         " entries, expected " + std::to_string(labels_.size()) + " x " +
                         std::to_string(input_dim_));
    for (double w : weights_)
      if (!std::isfinite(w)) throw InvalidInput("non-finite model weight");
  }

  static LinearModel zeros(LabelSpace labels, std::size_t input_dim) {
    std::vector<double> w(labels.size() * input_dim, 0.0);
    return LinearModel(std::move(w), std::move(labels), input_dim);
  }

  std::size_t class_count() const { return labels_.size(); }
  std::size_t input_dim() const { return input_dim_; }
  const LabelSpace& labels() const { return labels_; }
  const std::vector<double>& weights() const { return weights_; }

  std::span<const double> row(ClassIndex c) const {
    return {weights_.data() + c * input_dim_, input_dim_};
  }

  friend bool operator==(const LinearModel&, const LinearModel&) = default;

 private:
  std::vector<double> weights_;
  LabelSpace labels_;
  std::size_t input_dim_ = 0;
};

struct TrainConfig {
  // Weight of (lambda/2)*sum_j |w_j|^2 against the mean hinge loss.
  double lambda = 1e-3;
  std::size_t epochs = 50;
  // Step size at update t is 1/(lambda*(t + step_offset)).
  double step_offset = 0.0;
  // Return the mean of the iterates visited during the final epoch.
  bool average_last_epoch = true;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be > 0");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (!(step_offset >= 0.0)) throw ConfigError("step_offset must be >= 0");
  }
};

struct Prediction {
  ClassIndex label = 0;
  double margin = 0.0;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Scales v to unit L2 norm; a zero vector is left unchanged.
inline void normalize_in_place(std::span<double> v) {
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  if (n2 > 0.0) {
    const double inv = 1.0 / std::sqrt(n2);
    for (double& x : v) x *= inv;
  }
}

}  // namespace detail

// Segment descriptor: mean of the frames in the segment, L2-normalized.
// A zero mean is returned as-is.
inline std::vector<double> encode_segment(const FrameSequence& seq, Segment segment) {
  if (!segment.valid_within(seq.frame_count()))
    throw InvalidInput("segment [" + std::to_string(segment.start) + ", " +
                       std::to_string(segment.end) + ") outside sequence of " +
                       std::to_string(seq.frame_count()) + " frames");
  std::vector<double> out(seq.dim(), 0.0);
  for (FrameIndex f = segment.start; f < segment.end; ++f) {
    auto x = seq.frame(f);
    for (std::size_t d = 0; d < out.size(); ++d) out[d] += x[d];
  }
  const double inv_len = 1.0 / static_cast<double>(segment.length());
  for (double& v : out) v *= inv_len;
  detail::normalize_in_place(out);
  return out;
}

// encode_segment in O(D) per query via per-dimension prefix sums.
class SegmentEncoder {
 public:
  explicit SegmentEncoder(const FrameSequence& seq)
      : dim_(seq.dim()), frames_(seq.frame_count()), prefix_((frames_ + 1) * dim_, 0.0) {
    for (FrameIndex f = 0; f < frames_; ++f) {
      auto x = seq.frame(f);
      for (std::size_t d = 0; d < dim_; ++d)
        prefix_[(f + 1) * dim_ + d] = prefix_[f * dim_ + d] + x[d];
    }
  }

  std::size_t dim() const { return dim_; }

  void encode_into(Segment segment, std::span<double> out) const {
    if (!segment.valid_within(frames_))
      throw InvalidInput("segment [" + std::to_string(segment.start) + ", " +
                         std::to_string(segment.end) + ") outside sequence of " +
                         std::to_string(frames_) + " frames");
    const double inv_len = 1.0 / static_cast<double>(segment.length());
    const double* hi = prefix_.data() + segment.end * dim_;
    const double* lo = prefix_.data() + segment.start * dim_;
    for (std::size_t d = 0; d < dim_; ++d) out[d] = (hi[d] - lo[d]) * inv_len;
    detail::normalize_in_place(out);
  }

  std::vector<double> encode(Segment segment) const {
    std::vector<double> out(dim_);
    encode_into(segment, out);
    return out;
  }

 private:
  std::size_t dim_;
  std::size_t frames_;
  std::vector<double> prefix_;
};

inline void score_all_classes_into(const LinearModel& model, std::span<const double> feature,
                                   std::span<double> out) {
  if (feature.size() != model.input_dim())
    throw InvalidInput("feature dimension " + std::to_string(feature.size()) +
                       " does not match model input dimension " +
                       std::to_string(model.input_dim()));
  for (ClassIndex c = 0; c < model.class_count(); ++c)
    out[c] = detail::dot(model.row(c), feature);
}

inline std::vector<double> score_all_classes(const LinearModel& model,
                                             std::span<const double> feature) {
  std::vector<double> out(model.class_count());
  score_all_classes_into(model, feature, out);
  return out;
}

// Winner and winner-minus-runner-up margin. Ties go to the lowest index.
inline Prediction predict_with_margin(std::span<const double> scores) {
  if (scores.size() < 2) throw InvalidInput("margin needs at least 2 class scores");
  ClassIndex best = 0;
  for (ClassIndex c = 1; c < scores.size(); ++c)
    if (scores[c] > scores[best]) best = c;
  double runner_up = -std::numeric_limits<double>::infinity();
  for (ClassIndex c = 0; c < scores.size(); ++c)
    if (c != best && scores[c] > runner_up) runner_up = scores[c];
  return {best, scores[best] - runner_up};
}

inline Prediction predict_with_margin(const LinearModel& model,
                                      std::span<const double> feature) {
  return predict_with_margin(score_all_classes(model, feature));
}

namespace detail {

inline void check_training_set(const std::vector<std::vector<double>>& features,
                               const std::vector<ClassIndex>& labels,
                               const LabelSpace& label_space) {
  if (features.empty()) throw InvalidInput("empty training set");
  if (features.size() != labels.size())
    throw InvalidInput(std::to_string(features.size()) + " features but " +
                       std::to_string(labels.size()) + " labels");
  const std::size_t dim = features.front().size();
  if (dim == 0) throw InvalidInput("training features have dimension 0");
  std::vector<std::size_t> per_class(label_space.size(), 0);
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != dim)
      throw InvalidInput("training feature " + std::to_string(i) + " has dimension " +
                         std::to_string(features[i].size()) + ", expected " +
                         std::to_string(dim));
    if (labels[i] >= label_space.size())
      throw InvalidInput("training label " + std::to_string(labels[i]) + " out of range");
    ++per_class[labels[i]];
  }
  for (ClassIndex c = 0; c < per_class.size(); ++c)
    if (per_class[c] == 0)
      throw InvalidInput("class '" + label_space.name(c) + "' has no training examples");
}

// Most-violating competitor for example with true class y.
inline ClassIndex strongest_rival(std::span<const double> scores, ClassIndex y) {
  ClassIndex r = y == 0 ? 1 : 0;
  for (ClassIndex c = 0; c < scores.size(); ++c)
    if (c != y && scores[c] > scores[r]) r = c;
  return r;
}

}  // namespace detail

// (lambda/2)*|W|_F^2 + mean_i max(0, 1 + max_{y != y_i} s_y - s_{y_i}).
inline double svm_objective(const LinearModel& model,
                            const std::vector<std::vector<double>>& features,
                            const std::vector<ClassIndex>& labels, double lambda) {
  double reg = 0.0;
  for (double w : model.weights()) reg += w * w;
  double loss = 0.0;
  std::vector<double> s(model.class_count());
  for (std::size_t i = 0; i < features.size(); ++i) {
    score_all_classes_into(model, features[i], s);
    const ClassIndex r = detail::strongest_rival(s, labels[i]);
    loss += std::max(0.0, 1.0 + s[r] - s[labels[i]]);
  }
  return 0.5 * lambda * reg + loss / static_cast<double>(features.size());
}

// Crammer-Singer multi-class SVM fitted by Pegasos-style stochastic
// subgradient descent. Deterministic for a given seed.
inline LinearModel train_multiclass_svm(const std::vector<std::vector<double>>& features,
                                        const std::vector<ClassIndex>& labels,
                                        const LabelSpace& label_space,
                                        const TrainConfig& config) {
  config.validate();
  detail::check_training_set(features, labels, label_space);

  const std::size_t m = label_space.size();
  const std::size_t dim = features.front().size();
  const std::size_t n = features.size();
  const double lambda = config.lambda;
  const double radius2 = 1.0 / lambda;

  // W is stored as scale * raw so that the shrink step is O(1).
  std::vector<double> raw(m * dim, 0.0);
  double scale = 1.0;
  double raw_norm2 = 0.0;

  std::vector<double> avg(m * dim, 0.0);
  std::size_t avg_count = 0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);
  std::vector<double> s(m);

  std::uint64_t t = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    const bool last = epoch + 1 == config.epochs;
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (lambda * (static_cast<double>(t) + config.step_offset));
      const auto& x = features[i];
      const ClassIndex y = labels[i];

      for (ClassIndex c = 0; c < m; ++c)
        s[c] = scale * detail::dot({raw.data() + c * dim, dim}, x);
      const ClassIndex r = detail::strongest_rival(s, y);
      const bool violated = 1.0 + s[r] - s[y] > 0.0;

      const double shrink = 1.0 - eta * lambda;
      if (shrink <= 0.0) {
        std::fill(raw.begin(), raw.end(), 0.0);
        scale = 1.0;
        raw_norm2 = 0.0;
      } else {
        scale *= shrink;
      }

      if (violated) {
        const double step = eta / scale;
        double* wy = raw.data() + y * dim;
        double* wr = raw.data() + r * dim;
        for (std::size_t d = 0; d < dim; ++d) {
          const double dy = step * x[d];
          raw_norm2 += 2.0 * wy[d] * dy + dy * dy;
          wy[d] += dy;
          raw_norm2 += -2.0 * wr[d] * dy + dy * dy;
          wr[d] -= dy;
        }
      }

      // Project onto the ball |W| <= 1/sqrt(lambda).
      const double norm2 = scale * scale * raw_norm2;
      if (norm2 > radius2) scale *= std::sqrt(radius2 / norm2);

      // Refresh the factored form before scale underflows.
      if (scale < 1e-100) {
        for (double& w : raw) w *= scale;
        raw_norm2 *= scale * scale;
        scale = 1.0;
      }

      if (last && config.average_last_epoch) {
        for (std::size_t k = 0; k < avg.size(); ++k) avg[k] += scale * raw[k];
        ++avg_count;
      }
    }
    // Recompute the norm exactly once per epoch to stop drift.
    raw_norm2 = 0.0;
    for (double w : raw) raw_norm2 += w * w;
  }

  std::vector<double> weights(m * dim);
  if (config.average_last_epoch && avg_count > 0) {
    for (std::size_t k = 0; k < weights.size(); ++k)
      weights[k] = avg[k] / static_cast<double>(avg_count);
  } else {
    for (std::size_t k = 0; k < weights.size(); ++k) weights[k] = scale * raw[k];
  }
  return LinearModel(std::move(weights), label_space, dim);
}

}  // namespace actparse
