// Generate a small coupled corpus, train both layers, parse one held-out
// sequence and compare against the no-context parser.

#include <actparse/actparse.hpp>

#include <cstdio>

int main() {
  using namespace actparse;
  const auto train = generate(coupled_benchmark_spec(40, 11));
  const auto test = generate(coupled_benchmark_spec(3, 12));
  const LabelSpace labels = coupled_benchmark_spec(1, 0).labels;

  ParserConfig config;
  config.l_min = 15;
  config.l_max = 60;
  config.scales = {10, 20, 40};
  TrainConfig tc;
  tc.lambda = config.lambda;

  TrainingReport report;
  const PipelineModel model = train_pipeline({train, labels}, config, tc, &report);
  std::printf("trained on %zu segments\n", report.segments_used);

  for (const auto& s : test) {
    const auto truth = parse_to_frame_labels(s.truth);
    const Parse full = parse(s.frames, model.first_layer, model.second_layer, config);
    const Parse local = no_context_parse(s.frames, model.first_layer, config);
    std::printf("%zu frames: %zu segments, accuracy %.3f (no context %.3f)\n",
                s.frames.frame_count(), full.segment_count(),
                per_frame_accuracy(parse_to_frame_labels(full), truth),
                per_frame_accuracy(parse_to_frame_labels(local), truth));
    for (std::size_t i = 0; i < full.segment_count(); ++i)
      std::printf("  [%4zu, %4zu) %s\n", full.breakpoints[i], full.breakpoints[i + 1],
                  labels.name(full.labels[i]).c_str());
  }
}
