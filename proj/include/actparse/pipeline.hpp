#pragma once

#include <actparse/context_features.hpp>
#include <actparse/core_types.hpp>
#include <actparse/datagen.hpp>
#include <actparse/linear_model.hpp>

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace actparse {

struct TrainingCorpus {
  std::vector<LabeledSequence> sequences;
  LabelSpace labels;
};

// Both classifiers plus the parser configuration they were trained under.
struct PipelineModel {
  LinearModel first_layer;
  LinearModel second_layer;
  ParserConfig config;
};

struct TrainingReport {
  std::size_t segments_used = 0;
  std::size_t segments_split = 0;
  std::size_t segments_skipped = 0;
  std::vector<std::string> warnings;
};

struct LabeledSegment {
  std::size_t sequence = 0;
  Segment segment;
  ClassIndex label = 0;
};

// Ground-truth segments brought into [l_min, l_max]: longer ones are cut into
// l_max chunks (a final chunk shorter than l_min is merged into the one before
// it), shorter ones are skipped and reported.
inline std::vector<LabeledSegment> training_segments(const TrainingCorpus& corpus,
                                                     const ParserConfig& config,
                                                     TrainingReport* report = nullptr) {
  std::vector<LabeledSegment> out;
  for (std::size_t s = 0; s < corpus.sequences.size(); ++s) {
    const auto& truth = corpus.sequences[s].truth;
    for (std::size_t i = 0; i < truth.segment_count(); ++i) {
      const Segment seg = truth.segment(i);
      const ClassIndex label = truth.labels[i];
      if (label >= corpus.labels.size())
        throw InvalidInput("sequence " + std::to_string(s) + " has out-of-range label " +
                           std::to_string(label));
      if (seg.length() < config.l_min) {
        if (report) {
          ++report->segments_skipped;
          report->warnings.push_back("sequence " + std::to_string(s) + ": segment [" +
                                     std::to_string(seg.start) + ", " + std::to_string(seg.end) +
                                     ") shorter than l_min, skipped");
        }
        continue;
      }
      if (seg.length() <= config.l_max) {
        out.push_back({s, seg, label});
        continue;
      }
      std::vector<Segment> chunks;
      for (FrameIndex a = seg.start; a < seg.end; a += config.l_max)
        chunks.push_back({a, std::min(a + config.l_max, seg.end)});
      if (chunks.size() > 1 && chunks.back().length() < config.l_min) {
        chunks[chunks.size() - 2].end = chunks.back().end;
        chunks.pop_back();
      }
      for (const auto& c : chunks) out.push_back({s, c, label});
      if (report) {
        ++report->segments_split;
        report->warnings.push_back("sequence " + std::to_string(s) + ": segment [" +
                                   std::to_string(seg.start) + ", " + std::to_string(seg.end) +
                                   ") longer than l_max, split into " +
                                   std::to_string(chunks.size()) + " chunks");
      }
    }
  }
  if (report) report->segments_used = out.size();
  return out;
}

namespace detail {

inline LinearModel fit_first_layer(const TrainingCorpus& corpus,
                                   const std::vector<LabeledSegment>& segments,
                                   const std::vector<bool>& include, const TrainConfig& tc) {
  std::vector<std::vector<double>> x;
  std::vector<ClassIndex> y;
  for (const auto& s : segments) {
    if (!include[s.sequence]) continue;
    x.push_back(encode_segment(corpus.sequences[s.sequence].frames, s.segment));
    y.push_back(s.label);
  }
  return train_multiclass_svm(x, y, corpus.labels, tc);
}

}  // namespace detail

// Context feature of a segment, using `first_layer` both for the tile cache
// and for the segment's own class scores.
inline std::vector<double> context_feature(const FrameSequence& seq, const ContextCache& cache,
                                           const LinearModel& first_layer, Segment segment) {
  const auto v_center = score_all_classes(first_layer, encode_segment(seq, segment));
  return assemble_context_feature(cache, segment, v_center);
}

// Trains the first layer on every ground-truth segment, then the second
// layer on context features whose scores come from fold-local first layers
// that never saw the sequence being featurized.
inline PipelineModel train_pipeline(const TrainingCorpus& corpus, const ParserConfig& config,
                                    const TrainConfig& train_config,
                                    TrainingReport* report = nullptr) {
  config.validate();
  train_config.validate();
  if (corpus.sequences.empty()) throw InvalidInput("training corpus is empty");
  const std::size_t n_seq = corpus.sequences.size();
  if (config.folds > n_seq)
    throw ConfigError("folds (" + std::to_string(config.folds) + ") exceeds the number of " +
                      "training sequences (" + std::to_string(n_seq) + ")");
  const std::size_t dim = corpus.sequences.front().frames.dim();
  for (std::size_t s = 0; s < n_seq; ++s) {
    if (corpus.sequences[s].frames.dim() != dim)
      throw InvalidInput("sequence " + std::to_string(s) + " has feature dimension " +
                         std::to_string(corpus.sequences[s].frames.dim()) + ", expected " +
                         std::to_string(dim));
    const auto v = validate_parse(corpus.sequences[s].truth,
                                  corpus.sequences[s].frames.frame_count(), 1,
                                  corpus.sequences[s].frames.frame_count());
    if (!v.ok())
      throw InvalidInput("sequence " + std::to_string(s) + " ground truth: " + v.problems.front());
  }

  const auto segments = training_segments(corpus, config, report);
  std::vector<std::size_t> per_class(corpus.labels.size(), 0);
  for (const auto& s : segments) ++per_class[s.label];
  for (ClassIndex c = 0; c < per_class.size(); ++c)
    if (per_class[c] < config.folds)
      throw InvalidInput("class '" + corpus.labels.name(c) + "' has " +
                         std::to_string(per_class[c]) + " training segments, needs at least " +
                         std::to_string(config.folds));

  PipelineModel model;
  model.config = config;
  model.first_layer =
      detail::fit_first_layer(corpus, segments, std::vector<bool>(n_seq, true), train_config);

  std::vector<std::size_t> order(n_seq);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> fold_of(n_seq);
  for (std::size_t i = 0; i < n_seq; ++i) fold_of[order[i]] = i % config.folds;

  std::vector<std::vector<double>> psi(segments.size());
  for (std::size_t k = 0; k < config.folds; ++k) {
    std::vector<bool> include(n_seq);
    for (std::size_t s = 0; s < n_seq; ++s) include[s] = fold_of[s] != k;
    TrainConfig fold_tc = train_config;
    fold_tc.seed = train_config.seed + k + 1;
    LinearModel fold_model;
    try {
      fold_model = detail::fit_first_layer(corpus, segments, include, fold_tc);
    } catch (const InvalidInput& e) {
      throw InvalidInput("cross-fitting fold " + std::to_string(k) + ": " + e.what());
    }
    for (std::size_t s = 0; s < n_seq; ++s) {
      if (include[s]) continue;
      const auto& seq = corpus.sequences[s].frames;
      const ContextCache cache = build_context_cache(seq, fold_model, config.scales);
      for (std::size_t i = 0; i < segments.size(); ++i)
        if (segments[i].sequence == s)
          psi[i] = context_feature(seq, cache, fold_model, segments[i].segment);
    }
  }

  std::vector<ClassIndex> labels;
  for (const auto& s : segments) labels.push_back(s.label);
  TrainConfig second_tc = train_config;
  second_tc.seed = train_config.seed + config.folds + 1;
  model.second_layer = train_multiclass_svm(psi, labels, corpus.labels, second_tc);
  return model;
}

}  // namespace actparse
