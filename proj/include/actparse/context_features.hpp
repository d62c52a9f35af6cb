#pragma once

#include <actparse/core_types.hpp>
#include <actparse/linear_model.hpp>

#include <algorithm>
#include <span>
#include <string>
#include <vector>

namespace actparse {

// Multi-scale fixed-size tiling of one sequence with first-layer class scores
// per tile. At scale l, tile j (0-based) covers [j*l, (j+1)*l); tail frames
// shorter than l are not tiled. Per-class prefix and suffix maxima over the
// tiles make every pooling query O(w*m).
class ContextCache {
 public:
  struct Level {
    std::size_t scale = 0;
    std::size_t tiles = 0;
    std::vector<double> tile_scores;  // tiles x m
    std::vector<double> prefix_max;   // row j: max over tiles 0..j
    std::vector<double> suffix_max;   // row j: max over tiles j..tiles-1
  };

  ContextCache() = default;

  // Builds from precomputed tile scores; tile_scores[i] holds
  // floor(frame_count / scales[i]) rows of m values.
  static ContextCache from_tile_scores(std::size_t frame_count, std::size_t class_count,
                                       const std::vector<std::size_t>& scales,
                                       std::vector<std::vector<double>> tile_scores) {
    if (tile_scores.size() != scales.size())
      throw InvalidInput("tile score blocks do not match the number of scales");
    if (class_count == 0) throw InvalidInput("class count must be >= 1");
    ContextCache cache;
    cache.frame_count_ = frame_count;
    cache.class_count_ = class_count;
    for (std::size_t i = 0; i < scales.size(); ++i) {
      if (scales[i] == 0) throw InvalidInput("scale must be >= 1");
      Level level;
      level.scale = scales[i];
      level.tiles = frame_count / scales[i];
      if (tile_scores[i].size() != level.tiles * class_count)
        throw InvalidInput("scale " + std::to_string(scales[i]) + " expects " +
                           std::to_string(level.tiles) + " tiles of " +
                           std::to_string(class_count) + " scores");
      level.tile_scores = std::move(tile_scores[i]);
      build_running_maxima(level, class_count);
      cache.levels_.push_back(std::move(level));
    }
    return cache;
  }

  std::size_t frame_count() const { return frame_count_; }
  std::size_t class_count() const { return class_count_; }
  std::size_t scale_count() const { return levels_.size(); }
  const std::vector<Level>& levels() const { return levels_; }
  const Level& level(std::size_t i) const { return levels_.at(i); }

  // Length of v_b and v_a: one m-block per scale.
  std::size_t pooled_dim() const { return levels_.size() * class_count_; }
  // Length of the assembled context feature.
  std::size_t context_dim() const { return (2 * levels_.size() + 1) * class_count_; }

  // Tiles lying entirely in [0, boundary): the first floor(boundary/l).
  void pool_before_into(FrameIndex boundary, std::span<double> out) const {
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      const Level& lv = levels_[i];
      const std::size_t k = std::min(boundary / lv.scale, lv.tiles);
      auto block = out.subspan(i * class_count_, class_count_);
      if (k == 0) {
        std::fill(block.begin(), block.end(), 0.0);
      } else {
        std::copy_n(lv.prefix_max.begin() + (k - 1) * class_count_, class_count_,
                    block.begin());
      }
    }
  }

  // Tiles lying entirely in [boundary, N+1): those starting at or after it.
  void pool_after_into(FrameIndex boundary, std::span<double> out) const {
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      const Level& lv = levels_[i];
      const std::size_t first = (boundary + lv.scale - 1) / lv.scale;
      auto block = out.subspan(i * class_count_, class_count_);
      if (first >= lv.tiles) {
        std::fill(block.begin(), block.end(), 0.0);
      } else {
        std::copy_n(lv.suffix_max.begin() + first * class_count_, class_count_,
                    block.begin());
      }
    }
  }

 private:
  static void build_running_maxima(Level& lv, std::size_t m) {
    lv.prefix_max.assign(lv.tiles * m, 0.0);
    lv.suffix_max.assign(lv.tiles * m, 0.0);
    for (std::size_t j = 0; j < lv.tiles; ++j) {
      for (std::size_t c = 0; c < m; ++c) {
        const double v = lv.tile_scores[j * m + c];
        lv.prefix_max[j * m + c] = j == 0 ? v : std::max(lv.prefix_max[(j - 1) * m + c], v);
      }
    }
    for (std::size_t j = lv.tiles; j-- > 0;) {
      for (std::size_t c = 0; c < m; ++c) {
        const double v = lv.tile_scores[j * m + c];
        lv.suffix_max[j * m + c] =
            j + 1 == lv.tiles ? v : std::max(lv.suffix_max[(j + 1) * m + c], v);
      }
    }
  }

  std::size_t frame_count_ = 0;
  std::size_t class_count_ = 0;
  std::vector<Level> levels_;
};

inline ContextCache build_context_cache(const FrameSequence& seq, const LinearModel& first_layer,
                                        const std::vector<std::size_t>& scales) {
  if (seq.dim() != first_layer.input_dim())
    throw InvalidInput("sequence dimension " + std::to_string(seq.dim()) +
                       " does not match first-layer input dimension " +
                       std::to_string(first_layer.input_dim()));
  const std::size_t m = first_layer.class_count();
  const std::size_t n = seq.frame_count();
  std::vector<std::vector<double>> blocks;
  for (std::size_t l : scales) {
    if (l == 0) throw InvalidInput("scale must be >= 1");
    const std::size_t tiles = n / l;
    std::vector<double> block(tiles * m);
    for (std::size_t j = 0; j < tiles; ++j) {
      const auto phi = encode_segment(seq, {j * l, (j + 1) * l});
      score_all_classes_into(first_layer, phi, std::span<double>(block).subspan(j * m, m));
    }
    blocks.push_back(std::move(block));
  }
  return ContextCache::from_tile_scores(n, m, scales, std::move(blocks));
}

inline std::vector<double> pool_before(const ContextCache& cache, FrameIndex boundary) {
  std::vector<double> out(cache.pooled_dim());
  cache.pool_before_into(boundary, out);
  return out;
}

inline std::vector<double> pool_after(const ContextCache& cache, FrameIndex boundary) {
  std::vector<double> out(cache.pooled_dim());
  cache.pool_after_into(boundary, out);
  return out;
}

// psi = [pool_before(start), v_center, pool_after(end)].
inline void assemble_context_feature_into(const ContextCache& cache, Segment segment,
                                          std::span<const double> v_center,
                                          std::span<double> out) {
  if (!segment.valid_within(cache.frame_count()))
    throw InvalidInput("segment [" + std::to_string(segment.start) + ", " +
                       std::to_string(segment.end) + ") outside sequence of " +
                       std::to_string(cache.frame_count()) + " frames");
  if (v_center.size() != cache.class_count())
    throw InvalidInput("center score vector has dimension " + std::to_string(v_center.size()) +
                       ", expected " + std::to_string(cache.class_count()));
  const std::size_t p = cache.pooled_dim();
  cache.pool_before_into(segment.start, out.subspan(0, p));
  std::copy(v_center.begin(), v_center.end(), out.begin() + p);
  cache.pool_after_into(segment.end, out.subspan(p + cache.class_count(), p));
}

inline std::vector<double> assemble_context_feature(const ContextCache& cache, Segment segment,
                                                    std::span<const double> v_center) {
  std::vector<double> out(cache.context_dim());
  assemble_context_feature_into(cache, segment, v_center, out);
  return out;
}

}  // namespace actparse
