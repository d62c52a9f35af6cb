#pragma once

#include <actparse/core_types.hpp>

#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace actparse {

// Two classes that look identical locally. `first` and `second` share the
// prototype of `first`; each sequence uses only one of the two, and every
// occurrence is immediately preceded by that member's context class. The
// other member and its context class do not appear in that sequence.
struct CouplingRule {
  ClassIndex first = 0;
  ClassIndex second = 0;
  ClassIndex first_context = 0;
  ClassIndex second_context = 0;
};

struct GenSpec {
  LabelSpace labels;
  std::size_t dim = 8;
  // One row per class. Empty: random directions of length prototype_scale,
  // drawn from prototype_seed so that datasets generated with different
  // `seed`s share the same classes.
  std::vector<std::vector<double>> prototypes;
  double prototype_scale = 10.0;
  std::uint64_t prototype_seed = 0;
  double noise = 1.0;
  std::size_t min_length = 20;
  std::size_t max_length = 40;
  std::size_t min_segments = 10;
  std::size_t max_segments = 20;
  std::size_t sequences = 10;
  std::vector<CouplingRule> couplings;
  // Relative draw weight per class. Empty: uniform.
  std::vector<double> class_weights;
  std::uint64_t seed = 0;

  void validate() const {
    const std::size_t m = labels.size();
    if (m < 2) throw InvalidInput("generator needs at least 2 classes");
    if (dim < 1) throw InvalidInput("generator dimension must be >= 1");
    if (!prototypes.empty()) {
      if (prototypes.size() != m)
        throw InvalidInput("expected " + std::to_string(m) + " prototypes, got " +
                           std::to_string(prototypes.size()));
      for (const auto& p : prototypes)
        if (p.size() != dim) throw InvalidInput("prototype dimension does not match dim");
    }
    if (!(noise >= 0.0) || !std::isfinite(noise)) throw InvalidInput("noise must be >= 0");
    if (min_length < 1 || max_length < min_length)
      throw InvalidInput("segment length range is empty");
    if (min_segments < 1 || max_segments < min_segments)
      throw InvalidInput("segments-per-sequence range is empty");
    if (!class_weights.empty()) {
      if (class_weights.size() != m) throw InvalidInput("class_weights needs one entry per class");
      for (double w : class_weights)
        if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidInput("class weights must be >= 0");
    }
    std::set<ClassIndex> used;
    for (const auto& r : couplings) {
      for (ClassIndex c : {r.first, r.second, r.first_context, r.second_context}) {
        if (c >= m) throw InvalidInput("coupling rule refers to undefined class " + std::to_string(c));
        if (!used.insert(c).second)
          throw InvalidInput("class '" + labels.name(c) +
                             "' appears more than once across coupling rules");
      }
    }
  }
};

struct LabeledSequence {
  FrameSequence frames;
  Parse truth;
};

// Deterministic for a fixed spec (seed included).
inline std::vector<LabeledSequence> generate(const GenSpec& spec) {
  spec.validate();
  const std::size_t m = spec.labels.size();
  const std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::vector<double>> protos = spec.prototypes;
  if (protos.empty()) {
    std::mt19937_64 proto_rng(spec.prototype_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t c = 0; c < m; ++c) {
      std::vector<double> p(spec.dim);
      double n2 = 0.0;
      for (double& x : p) {
        x = gauss(proto_rng);
        n2 += x * x;
      }
      const double k = spec.prototype_scale / std::sqrt(n2);
      for (double& x : p) x *= k;
      protos.push_back(std::move(p));
    }
  }
  for (const auto& r : spec.couplings) protos[r.second] = protos[r.first];

  std::mt19937_64 rng(spec.seed);

  std::vector<double> weights = spec.class_weights;
  if (weights.empty()) weights.assign(m, 1.0);

  std::uniform_int_distribution<std::size_t> seg_count(spec.min_segments, spec.max_segments);
  std::uniform_int_distribution<std::size_t> seg_len(spec.min_length, spec.max_length);
  std::normal_distribution<double> noise(0.0, spec.noise > 0.0 ? spec.noise : 1.0);

  std::vector<LabeledSequence> out;
  for (std::size_t s = 0; s < spec.sequences; ++s) {
    // Pick one member of every coupled pair for this sequence.
    std::vector<bool> banned(m, false);
    std::vector<ClassIndex> context_of(m, npos);
    for (const auto& r : spec.couplings) {
      const bool use_first = std::bernoulli_distribution(0.5)(rng);
      const ClassIndex keep = use_first ? r.first : r.second;
      const ClassIndex keep_ctx = use_first ? r.first_context : r.second_context;
      banned[use_first ? r.second : r.first] = true;
      banned[use_first ? r.second_context : r.first_context] = true;
      context_of[keep] = keep_ctx;
    }
    std::vector<double> w(m, 0.0);
    for (std::size_t c = 0; c < m; ++c)
      if (!banned[c]) w[c] = weights[c];
    // Draws are rejected when they would repeat the previous label, so at
    // least two distinct leading classes must be drawable.
    std::set<ClassIndex> leads;
    for (std::size_t c = 0; c < m; ++c)
      if (w[c] > 0.0) leads.insert(context_of[c] != npos ? context_of[c] : c);
    if (leads.size() < 2)
      throw InvalidInput("class weights leave fewer than two distinct drawable classes");
    std::discrete_distribution<std::size_t> draw(w.begin(), w.end());

    const std::size_t target = seg_count(rng);
    std::vector<ClassIndex> classes;
    while (classes.size() < target) {
      ClassIndex c = draw(rng);
      const ClassIndex lead = context_of[c] != npos ? context_of[c] : c;
      // Adjacent segments get distinct labels.
      if (!classes.empty() && classes.back() == lead) continue;
      if (context_of[c] != npos) classes.push_back(context_of[c]);
      classes.push_back(c);
    }

    Parse truth;
    truth.breakpoints.push_back(0);
    std::vector<double> data;
    for (ClassIndex c : classes) {
      const std::size_t len = seg_len(rng);
      for (std::size_t f = 0; f < len; ++f) {
        for (std::size_t d = 0; d < spec.dim; ++d)
          data.push_back(protos[c][d] + (spec.noise > 0.0 ? noise(rng) : 0.0));
      }
      truth.breakpoints.push_back(truth.breakpoints.back() + len);
      truth.labels.push_back(c);
    }
    out.push_back({FrameSequence(std::move(data), spec.dim), std::move(truth)});
  }
  return out;
}

// Six-class corpus with one locally ambiguous pair, used by the context
// benefit experiment: bg, A, B (same prototype as A), CA (precedes A),
// CB (precedes B), E.
inline GenSpec coupled_benchmark_spec(std::size_t sequences, std::uint64_t seed) {
  GenSpec g;
  g.labels = LabelSpace({"bg", "A", "B", "CA", "CB", "E"}, 0);
  g.dim = 8;
  g.prototype_scale = 3.0;
  g.noise = 1.0;
  g.min_length = 20;
  g.max_length = 40;
  g.min_segments = 13;
  g.max_segments = 17;
  g.sequences = sequences;
  g.couplings = {{1, 2, 3, 4}};
  g.class_weights = {1.0, 3.0, 3.0, 1.0, 1.0, 1.0};
  g.seed = seed;
  return g;
}

}  // namespace actparse
