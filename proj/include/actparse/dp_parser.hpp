#pragma once

#include <actparse/context_features.hpp>
#include <actparse/core_types.hpp>
#include <actparse/linear_model.hpp>

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace actparse {

// Score and label of the candidate segment [u - l, u).
struct Candidate {
  double score = 0.0;
  ClassIndex label = 0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// Anything callable as scorer(u, l) -> Candidate with score >= 0. Must be
// deterministic.
template <class S>
concept SegmentScorer = requires(S& s, FrameIndex u, std::size_t l) {
  { s(u, l) } -> std::convertible_to<Candidate>;
};

inline constexpr double kUnreachable = -std::numeric_limits<double>::infinity();

// Forward-pass tables indexed by prefix end u = 0..frame_count.
struct DpTables {
  std::vector<double> gamma;  // best score of [0, u); kUnreachable if none
  std::vector<ClassIndex> beta;
  std::vector<std::size_t> rho;
  std::size_t l_min = 0;
  std::size_t l_max = 0;

  std::size_t frame_count() const { return gamma.empty() ? 0 : gamma.size() - 1; }
};

// gamma[u] = max_{l in [l_min, min(l_max, u)]} xi(u, l) + gamma[u - l], with
// gamma[0] = 0. Ties keep the smallest l.
template <SegmentScorer S>
DpTables parse_forward(S&& scorer, std::size_t frame_count, std::size_t l_min,
                       std::size_t l_max) {
  if (l_min < 1 || l_max < l_min)
    throw ConfigError("invalid length bounds [" + std::to_string(l_min) + ", " +
                      std::to_string(l_max) + "]");
  DpTables t;
  t.l_min = l_min;
  t.l_max = l_max;
  t.gamma.assign(frame_count + 1, kUnreachable);
  t.beta.assign(frame_count + 1, 0);
  t.rho.assign(frame_count + 1, 0);
  t.gamma[0] = 0.0;

  for (FrameIndex u = l_min; u <= frame_count; ++u) {
    const std::size_t longest = std::min(l_max, u);
    for (std::size_t l = l_min; l <= longest; ++l) {
      const double prev = t.gamma[u - l];
      if (prev == kUnreachable) continue;
      const Candidate c = scorer(u, l);
      const double total = c.score + prev;
      if (total > t.gamma[u]) {
        t.gamma[u] = total;
        t.beta[u] = c.label;
        t.rho[u] = l;
      }
    }
  }
  return t;
}

// Walks rho back from the end of the sequence and reverses the collected
// breakpoints and labels.
inline Parse parse_backward(const DpTables& t) {
  const std::size_t n = t.frame_count();
  if (t.gamma.empty() || t.gamma[n] == kUnreachable)
    throw NoValidParse("no valid parse: " + std::to_string(n) +
                       " frames cannot be split into segments of length [" +
                       std::to_string(t.l_min) + ", " + std::to_string(t.l_max) + "]");
  Parse p;
  p.total_score = t.gamma[n];
  FrameIndex i = n;
  p.breakpoints.push_back(i);
  while (i > 0) {
    p.labels.push_back(t.beta[i]);
    i -= t.rho[i];
    p.breakpoints.push_back(i);
  }
  std::reverse(p.breakpoints.begin(), p.breakpoints.end());
  std::reverse(p.labels.begin(), p.labels.end());
  return p;
}

template <SegmentScorer S>
Parse parse_with_scorer(S&& scorer, std::size_t frame_count, std::size_t l_min,
                        std::size_t l_max) {
  return parse_backward(parse_forward(std::forward<S>(scorer), frame_count, l_min, l_max));
}

// Exhaustive search over every valid segmentation, for checking the DP.
// Enumeration is in lexicographic breakpoint order and only a strictly
// better total replaces the incumbent.
template <SegmentScorer S>
Parse brute_force_parse(S&& scorer, std::size_t frame_count, std::size_t l_min,
                        std::size_t l_max, std::size_t* enumerated = nullptr) {
  constexpr std::size_t kMaxFrames = 40;
  if (frame_count > kMaxFrames)
    throw InvalidInput("brute force limited to " + std::to_string(kMaxFrames) + " frames, got " +
                       std::to_string(frame_count));
  if (l_min < 1 || l_max < l_min) throw ConfigError("invalid length bounds");

  std::optional<Parse> best;
  std::size_t count = 0;
  Parse current;
  current.breakpoints.push_back(0);

  std::function<void(FrameIndex, double)> extend = [&](FrameIndex at, double score) {
    if (at == frame_count) {
      ++count;
      if (!best || score > best->total_score) {
        best = current;
        best->total_score = score;
      }
      return;
    }
    for (std::size_t l = l_min; l <= l_max && at + l <= frame_count; ++l) {
      const Candidate c = scorer(at + l, l);
      current.breakpoints.push_back(at + l);
      current.labels.push_back(c.label);
      extend(at + l, score + c.score);
      current.breakpoints.pop_back();
      current.labels.pop_back();
    }
  };
  if (frame_count > 0) extend(0, 0.0);
  if (enumerated) *enumerated = count;
  if (!best)
    throw NoValidParse("no valid parse: " + std::to_string(frame_count) +
                       " frames cannot be split into segments of length [" +
                       std::to_string(l_min) + ", " + std::to_string(l_max) + "]");
  return *best;
}

// Lookup-table scorer over all (u, l) with l in [l_min, l_max], u <= frame_count.
class TableScorer {
 public:
  TableScorer(std::size_t frame_count, std::size_t l_min, std::size_t l_max)
      : frame_count_(frame_count),
        l_min_(l_min),
        l_max_(l_max),
        table_((frame_count + 1) * (l_max - l_min + 1)) {}

  // xi ~ U[0, 1), labels ~ U{0..m-1}.
  template <class Rng>
  static TableScorer random(std::size_t frame_count, std::size_t l_min, std::size_t l_max,
                            std::size_t m, Rng& rng) {
    TableScorer t(frame_count, l_min, l_max);
    std::uniform_real_distribution<double> score(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> label(0, m - 1);
    for (auto& c : t.table_) {
      c.score = score(rng);
      c.label = label(rng);
    }
    return t;
  }

  void set(FrameIndex u, std::size_t l, Candidate c) { table_.at(index(u, l)) = c; }
  Candidate operator()(FrameIndex u, std::size_t l) const { return table_.at(index(u, l)); }

  std::size_t frame_count() const { return frame_count_; }

 private:
  std::size_t index(FrameIndex u, std::size_t l) const {
    if (l < l_min_ || l > l_max_ || u > frame_count_ || l > u)
      throw InvalidInput("candidate (u=" + std::to_string(u) + ", l=" + std::to_string(l) +
                         ") outside table");
    return u * (l_max_ - l_min_ + 1) + (l - l_min_);
  }

  std::size_t frame_count_;
  std::size_t l_min_;
  std::size_t l_max_;
  std::vector<Candidate> table_;
};

// Caches each (u, l) score so it is computed at most once.
template <SegmentScorer S>
class MemoizedScorer {
 public:
  MemoizedScorer(S& inner, std::size_t frame_count, std::size_t l_min, std::size_t l_max)
      : inner_(inner),
        l_min_(l_min),
        span_(l_max - l_min + 1),
        memo_((frame_count + 1) * span_) {}

  Candidate operator()(FrameIndex u, std::size_t l) {
    auto& slot = memo_[u * span_ + (l - l_min_)];
    if (!slot) slot = inner_(u, l);
    return *slot;
  }

 private:
  S& inner_;
  std::size_t l_min_;
  std::size_t span_;
  std::vector<std::optional<Candidate>> memo_;
};

// xi = max(0, margin - penalty) from the second layer applied to
// psi = [v_before, first_layer(phi(segment)), v_after].
inline Candidate score_candidate(const FrameSequence& seq, FrameIndex u, std::size_t l,
                                 const LinearModel& first_layer,
                                 const LinearModel& second_layer, const ContextCache& cache,
                                 double penalty) {
  if (l == 0 || l > u || u > seq.frame_count())
    throw InvalidInput("invalid candidate (u=" + std::to_string(u) +
                       ", l=" + std::to_string(l) + ")");
  const Segment seg{u - l, u};
  const auto v_center = score_all_classes(first_layer, encode_segment(seq, seg));
  const auto psi = assemble_context_feature(cache, seg, v_center);
  const Prediction p = predict_with_margin(second_layer, psi);
  return {std::max(0.0, p.margin - penalty), p.label};
}

// The two-layer scorer used by parse(). Same result as score_candidate, with
// O(D) segment encoding and reused buffers. Not safe to share across threads.
class ContextScorer {
 public:
  ContextScorer(const FrameSequence& seq, const LinearModel& first_layer,
                const LinearModel& second_layer, const ContextCache& cache, double penalty)
      : encoder_(seq),
        first_(first_layer),
        second_(second_layer),
        cache_(cache),
        penalty_(penalty),
        phi_(seq.dim()),
        center_(first_layer.class_count()),
        psi_(cache.context_dim()),
        out_(second_layer.class_count()) {
    if (seq.dim() != first_layer.input_dim())
      throw InvalidInput("sequence dimension " + std::to_string(seq.dim()) +
                         " does not match first-layer input dimension " +
                         std::to_string(first_layer.input_dim()));
    if (cache.context_dim() != second_layer.input_dim())
      throw InvalidInput("context feature dimension " + std::to_string(cache.context_dim()) +
                         " does not match second-layer input dimension " +
                         std::to_string(second_layer.input_dim()));
    if (cache.class_count() != first_layer.class_count())
      throw InvalidInput("context cache class count does not match the first layer");
  }

  Candidate operator()(FrameIndex u, std::size_t l) {
    ++calls_;
    const Segment seg{u - l, u};
    encoder_.encode_into(seg, phi_);
    score_all_classes_into(first_, phi_, center_);
    assemble_context_feature_into(cache_, seg, center_, psi_);
    score_all_classes_into(second_, psi_, out_);
    const Prediction p = predict_with_margin(out_);
    return {std::max(0.0, p.margin - penalty_), p.label};
  }

  std::size_t calls() const { return calls_; }

 private:
  SegmentEncoder encoder_;
  const LinearModel& first_;
  const LinearModel& second_;
  const ContextCache& cache_;
  double penalty_;
  std::vector<double> phi_;
  std::vector<double> center_;
  std::vector<double> psi_;
  std::vector<double> out_;
  std::size_t calls_ = 0;
};

struct ParseStats {
  std::size_t scorer_calls = 0;
};

namespace detail {

inline void check_parse_inputs(const FrameSequence& seq, const ParserConfig& config) {
  config.validate();
  if (seq.frame_count() < config.l_min)
    throw NoValidParse("no valid parse: sequence of " + std::to_string(seq.frame_count()) +
                       " frames is shorter than l_min = " + std::to_string(config.l_min) +
                       " (l_max = " + std::to_string(config.l_max) + ")");
}

}  // namespace detail

// Optimal segmentation under the two-layer context scorer.
inline Parse parse(const FrameSequence& seq, const LinearModel& first_layer,
                   const LinearModel& second_layer, const ParserConfig& config,
                   ParseStats* stats = nullptr) {
  detail::check_parse_inputs(seq, config);
  if (first_layer.labels() != second_layer.labels())
    throw InvalidInput("first and second layer label spaces differ");
  const ContextCache cache = build_context_cache(seq, first_layer, config.scales);
  ContextScorer scorer(seq, first_layer, second_layer, cache, config.segment_penalty);
  MemoizedScorer memo(scorer, seq.frame_count(), config.l_min, config.l_max);
  Parse result = parse_with_scorer(memo, seq.frame_count(), config.l_min, config.l_max);
  if (stats) stats->scorer_calls = scorer.calls();
  return result;
}

}  // namespace actparse
