#pragma once

// Shared generators and independent reference implementations for tests.

#include <actparse/actparse.hpp>

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace actparse::testing {

inline FrameSequence random_sequence(std::size_t frames, std::size_t dim, std::mt19937_64& rng,
                                     double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> data(frames * dim);
  for (double& x : data) x = g(rng);
  return FrameSequence(std::move(data), dim);
}

inline LinearModel random_model(std::size_t m, std::size_t dim, std::mt19937_64& rng,
                                double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> w(m * dim);
  for (double& x : w) x = g(rng);
  return LinearModel(std::move(w), LabelSpace::numbered(m), dim);
}

inline ContextCache random_cache(std::size_t frames, std::size_t m,
                                 const std::vector<std::size_t>& scales, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 3.0);
  std::vector<std::vector<double>> blocks;
  for (auto l : scales) {
    std::vector<double> b((frames / l) * m);
    for (double& x : b) x = g(rng);
    blocks.push_back(std::move(b));
  }
  return ContextCache::from_tile_scores(frames, m, scales, std::move(blocks));
}

// Per-class max over every tile [j*l, (j+1)*l) with (j+1)*l <= boundary,
// rescanning the raw tile scores. Zero block when no tile qualifies.
inline std::vector<double> naive_pool_before(const ContextCache& cache, FrameIndex boundary) {
  const std::size_t m = cache.class_count();
  std::vector<double> out;
  for (const auto& lv : cache.levels()) {
    std::vector<double> block(m, 0.0);
    bool any = false;
    for (std::size_t j = 0; j < lv.tiles; ++j) {
      if ((j + 1) * lv.scale > boundary) continue;
      for (std::size_t c = 0; c < m; ++c) {
        const double v = lv.tile_scores[j * m + c];
        block[c] = any ? std::max(block[c], v) : v;
      }
      any = true;
    }
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

// Same for tiles with start j*l >= boundary.
inline std::vector<double> naive_pool_after(const ContextCache& cache, FrameIndex boundary) {
  const std::size_t m = cache.class_count();
  std::vector<double> out;
  for (const auto& lv : cache.levels()) {
    std::vector<double> block(m, 0.0);
    bool any = false;
    for (std::size_t j = 0; j < lv.tiles; ++j) {
      if (j * lv.scale < boundary) continue;
      for (std::size_t c = 0; c < m; ++c) {
        const double v = lv.tile_scores[j * m + c];
        block[c] = any ? std::max(block[c], v) : v;
      }
      any = true;
    }
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

// Sum of scorer(b_{i+1}, b_{i+1} - b_i) over the segments of a parse.
template <class Scorer>
double rescore(Scorer& scorer, const Parse& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.segment_count(); ++i)
    s += scorer(p.breakpoints[i + 1], p.breakpoints[i + 1] - p.breakpoints[i]).score;
  return s;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("actparse_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace actparse::testing
