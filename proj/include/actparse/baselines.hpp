#pragma once

#include <actparse/core_types.hpp>
#include <actparse/dp_parser.hpp>
#include <actparse/linear_model.hpp>

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

namespace actparse {

struct ScoredWindow {
  Segment window;
  Prediction prediction;
};

// Windows [t, t+L) at t = 0, stride, 2*stride, ...; a final window ending at
// frame_count is appended if the regular grid stops short of it.
inline std::vector<Segment> sliding_windows(std::size_t frame_count, std::size_t window,
                                            std::size_t stride) {
  if (window < 1 || stride < 1 || stride > window)
    throw ConfigError("sliding window needs 1 <= stride <= window");
  if (window > frame_count)
    throw InvalidInput("window length " + std::to_string(window) + " exceeds sequence of " +
                       std::to_string(frame_count) + " frames");
  std::vector<Segment> out;
  std::size_t t = 0;
  for (; t + window <= frame_count; t += stride) out.push_back({t, t + window});
  if (out.back().end != frame_count) out.push_back({frame_count - window, frame_count});
  return out;
}

// Greedy non-max suppression: visit windows by decreasing margin (earlier
// window first on ties) and keep each one that overlaps nothing kept so far.
inline std::vector<ScoredWindow> non_max_suppression(std::vector<ScoredWindow> windows) {
  std::stable_sort(windows.begin(), windows.end(), [](const auto& a, const auto& b) {
    if (a.prediction.margin != b.prediction.margin)
      return a.prediction.margin > b.prediction.margin;
    return a.window.start < b.window.start;
  });
  std::vector<ScoredWindow> kept;
  for (const auto& w : windows) {
    const bool overlaps = std::any_of(kept.begin(), kept.end(), [&](const auto& k) {
      return w.window.start < k.window.end && k.window.start < w.window.end;
    });
    if (!overlaps) kept.push_back(w);
  }
  std::sort(kept.begin(), kept.end(),
            [](const auto& a, const auto& b) { return a.window.start < b.window.start; });
  return kept;
}

// Frames inside a kept window take its label; remaining frames take the
// label of the nearest kept window (earlier window on ties).
inline std::vector<ClassIndex> label_frames_from_windows(const std::vector<ScoredWindow>& kept,
                                                         std::size_t frame_count) {
  if (kept.empty()) throw InvalidInput("no windows to label frames from");
  std::vector<ClassIndex> labels(frame_count);
  for (FrameIndex f = 0; f < frame_count; ++f) {
    std::size_t best = 0;
    std::size_t best_dist = std::numeric_limits<std::size_t>::max();
    for (std::size_t k = 0; k < kept.size(); ++k) {
      const Segment& s = kept[k].window;
      const std::size_t dist = f < s.start ? s.start - f : (f >= s.end ? f - s.end + 1 : 0);
      if (dist < best_dist) {
        best_dist = dist;
        best = k;
      }
    }
    labels[f] = kept[best].prediction.label;
  }
  return labels;
}

// Sliding-window classification with the first layer followed by NMS.
inline std::vector<ClassIndex> sliding_window_labels(const FrameSequence& seq,
                                                     const LinearModel& first_layer,
                                                     std::size_t window, std::size_t stride) {
  if (seq.dim() != first_layer.input_dim())
    throw InvalidInput("sequence dimension does not match first-layer input dimension");
  const SegmentEncoder encoder(seq);
  std::vector<ScoredWindow> scored;
  for (const Segment& w : sliding_windows(seq.frame_count(), window, stride))
    scored.push_back({w, predict_with_margin(first_layer, encoder.encode(w))});
  return label_frames_from_windows(non_max_suppression(std::move(scored)), seq.frame_count());
}

// Segment scorer that only looks at the frames inside the candidate:
// xi = max(0, first-layer margin - penalty).
class LocalScorer {
 public:
  LocalScorer(const FrameSequence& seq, const LinearModel& first_layer, double penalty)
      : encoder_(seq),
        model_(first_layer),
        penalty_(penalty),
        phi_(seq.dim()),
        scores_(first_layer.class_count()) {
    if (seq.dim() != first_layer.input_dim())
      throw InvalidInput("sequence dimension does not match first-layer input dimension");
  }

  Candidate operator()(FrameIndex u, std::size_t l) {
    ++calls_;
    encoder_.encode_into({u - l, u}, phi_);
    score_all_classes_into(model_, phi_, scores_);
    const Prediction p = predict_with_margin(scores_);
    return {std::max(0.0, p.margin - penalty_), p.label};
  }

  std::size_t calls() const { return calls_; }

 private:
  SegmentEncoder encoder_;
  const LinearModel& model_;
  double penalty_;
  std::vector<double> phi_;
  std::vector<double> scores_;
  std::size_t calls_ = 0;
};

// Joint segmentation and classification without context features.
inline Parse no_context_parse(const FrameSequence& seq, const LinearModel& first_layer,
                              const ParserConfig& config) {
  detail::check_parse_inputs(seq, config);
  LocalScorer scorer(seq, first_layer, config.segment_penalty);
  MemoizedScorer memo(scorer, seq.frame_count(), config.l_min, config.l_max);
  return parse_with_scorer(memo, seq.frame_count(), config.l_min, config.l_max);
}

}  // namespace actparse
