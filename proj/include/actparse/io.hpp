#pragma once

#include <actparse/core_types.hpp>
#include <actparse/datagen.hpp>
#include <actparse/linear_model.hpp>
#include <actparse/pipeline.hpp>

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace actparse {

using Json = nlohmann::json;

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw InvalidInput("failed writing '" + path.string() + "'");
}

inline Json read_json(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidInput(path.string() + ": malformed JSON: " + e.what());
  }
}

inline void write_json(const std::filesystem::path& path, const Json& j) {
  write_file(path, j.dump(2) + "\n");
}

// Shortest representation that parses back to the same double.
inline void append_double(std::string& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

// Runs fn, rethrowing JSON type/lookup errors as InvalidInput naming `what`.
template <class F>
auto json_guard(const std::string& what, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    throw InvalidInput(what + ": " + e.what());
  }
}

}  // namespace detail

// ---- features: CSV, one row per frame, D numeric columns, no header ----

inline std::string features_to_csv(const FrameSequence& seq) {
  std::string out;
  for (FrameIndex f = 0; f < seq.frame_count(); ++f) {
    auto x = seq.frame(f);
    for (std::size_t d = 0; d < x.size(); ++d) {
      if (d) out.push_back(',');
      detail::append_double(out, x[d]);
    }
    out.push_back('\n');
  }
  return out;
}

inline FrameSequence features_from_csv(std::string_view text, const std::string& source = "<csv>") {
  std::vector<double> data;
  std::size_t dim = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (pos >= text.size()) break;
      throw InvalidInput(source + ": line " + std::to_string(line_no) + ": empty row");
    }
    std::size_t cols = 0;
    std::size_t cpos = 0;
    while (true) {
      std::size_t comma = line.find(',', cpos);
      std::string_view cell = line.substr(cpos, comma == std::string_view::npos ? line.size() - cpos
                                                                                 : comma - cpos);
      while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
      while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
      ++cols;
      double v = 0.0;
      auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || end != cell.data() + cell.size())
        throw InvalidInput(source + ": line " + std::to_string(line_no) + ", field " +
                           std::to_string(cols) + ": non-numeric cell '" + std::string(cell) +
                           "'");
      if (!std::isfinite(v))
        throw InvalidInput(source + ": line " + std::to_string(line_no) + ", field " +
                           std::to_string(cols) + ": non-finite value");
      data.push_back(v);
      if (comma == std::string_view::npos) break;
      cpos = comma + 1;
    }
    if (dim == 0) {
      dim = cols;
    } else if (cols != dim) {
      throw InvalidInput(source + ": line " + std::to_string(line_no) + " has " +
                         std::to_string(cols) + " columns, expected " + std::to_string(dim));
    }
  }
  if (data.empty()) throw InvalidInput(source + ": no frames");
  return FrameSequence(std::move(data), dim);
}

inline FrameSequence load_features(const std::filesystem::path& path) {
  return features_from_csv(detail::read_file(path), path.string());
}

inline void save_features(const std::filesystem::path& path, const FrameSequence& seq) {
  detail::write_file(path, features_to_csv(seq));
}

// ---- annotations and parses: JSON ----
// {"labels": [names], "background": name,
//  "segments": [{"start": int, "end": int, "label": name}, ...],
//  "total_score": real (parses only)}

struct Annotation {
  LabelSpace labels;
  Parse parse;
};

inline Json annotation_to_json(const Parse& parse, const LabelSpace& labels,
                               bool with_score = false) {
  Json segs = Json::array();
  for (std::size_t i = 0; i < parse.segment_count(); ++i) {
    segs.push_back({{"start", parse.breakpoints[i]},
                    {"end", parse.breakpoints[i + 1]},
                    {"label", labels.name(parse.labels[i])}});
  }
  Json j = {{"labels", labels.names()},
            {"background", labels.name(labels.background())},
            {"segments", std::move(segs)}};
  if (with_score) j["total_score"] = parse.total_score;
  return j;
}

inline LabelSpace label_space_from_json(const Json& j, const std::string& source) {
  return detail::json_guard(source, [&] {
    auto names = j.at("labels").get<std::vector<std::string>>();
    const std::string bg = j.contains("background") ? j.at("background").get<std::string>()
                                                    : names.empty() ? "" : names.front();
    auto it = std::find(names.begin(), names.end(), bg);
    if (it == names.end()) throw InvalidInput(source + ": background '" + bg + "' not in labels");
    return LabelSpace(names, static_cast<ClassIndex>(it - names.begin()));
  });
}

// Segment labels are resolved against `labels`.
inline Parse parse_from_json(const Json& j, const LabelSpace& labels, const std::string& source) {
  return detail::json_guard(source, [&] {
    const Json& segs = j.at("segments");
    if (!segs.is_array() || segs.empty())
      throw InvalidInput(source + ": 'segments' must be a non-empty array");
    Parse p;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const std::string field = source + ": segments[" + std::to_string(i) + "]";
      const auto start = segs[i].at("start").get<std::int64_t>();
      const auto end = segs[i].at("end").get<std::int64_t>();
      if (start < 0 || end < 0) throw InvalidInput(field + ": negative frame index");
      if (i == 0) {
        if (start != 0) throw InvalidInput(field + ": first segment must start at frame 0");
        p.breakpoints.push_back(0);
      } else if (static_cast<std::size_t>(start) != p.breakpoints.back()) {
        throw InvalidInput(field + ": start " + std::to_string(start) +
                           " leaves a gap or overlap after frame " +
                           std::to_string(p.breakpoints.back()));
      }
      if (end <= start)
        throw InvalidInput(field + ": non-monotone breakpoints (end " + std::to_string(end) +
                           " <= start " + std::to_string(start) + ")");
      p.breakpoints.push_back(static_cast<std::size_t>(end));
      try {
        p.labels.push_back(labels.index_of(segs[i].at("label").get<std::string>()));
      } catch (const InvalidInput& e) {
        throw InvalidInput(field + ": " + e.what());
      }
    }
    if (j.contains("total_score")) p.total_score = j.at("total_score").get<double>();
    return p;
  });
}

inline Annotation load_annotations(const std::filesystem::path& path) {
  const Json j = detail::read_json(path);
  Annotation a;
  a.labels = label_space_from_json(j, path.string());
  a.parse = parse_from_json(j, a.labels, path.string());
  return a;
}

inline Parse load_annotations(const std::filesystem::path& path, const LabelSpace& labels) {
  return parse_from_json(detail::read_json(path), labels, path.string());
}

inline void save_annotations(const std::filesystem::path& path, const Parse& parse,
                             const LabelSpace& labels) {
  detail::write_json(path, annotation_to_json(parse, labels));
}

inline void save_parse(const std::filesystem::path& path, const Parse& parse,
                       const LabelSpace& labels) {
  detail::write_json(path, annotation_to_json(parse, labels, true));
}

// ---- configuration ----

struct RunConfig {
  ParserConfig parser;
  TrainConfig train;
};

inline Json config_to_json(const ParserConfig& pc, const TrainConfig& tc) {
  return {{"l_min", pc.l_min},   {"l_max", pc.l_max},     {"scales", pc.scales},
          {"lambda", tc.lambda}, {"folds", pc.folds},     {"penalty", pc.segment_penalty},
          {"seed", pc.seed},     {"epochs", tc.epochs}};
}

// Missing keys keep their defaults. Throws ConfigError.
inline RunConfig config_from_json(const Json& j, const std::string& source = "config") {
  RunConfig rc;
  if (!j.is_object()) throw ConfigError(source + ": expected a JSON object");
  try {
    auto& pc = rc.parser;
    auto& tc = rc.train;
    if (j.contains("l_min")) pc.l_min = j.at("l_min").get<std::size_t>();
    if (j.contains("l_max")) pc.l_max = j.at("l_max").get<std::size_t>();
    if (j.contains("scales")) pc.scales = j.at("scales").get<std::vector<std::size_t>>();
    if (j.contains("penalty")) pc.segment_penalty = j.at("penalty").get<double>();
    if (j.contains("folds")) pc.folds = j.at("folds").get<std::size_t>();
    if (j.contains("seed")) pc.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("lambda")) pc.lambda = j.at("lambda").get<double>();
    if (j.contains("epochs")) tc.epochs = j.at("epochs").get<std::size_t>();
    tc.lambda = pc.lambda;
    tc.seed = pc.seed;
  } catch (const Json::exception& e) {
    throw ConfigError(source + ": " + e.what());
  }
  try {
    rc.parser.validate();
    rc.train.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return rc;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(detail::read_file(path));
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": malformed JSON: " + e.what());
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  return config_from_json(j, path.string());
}

// ---- models ----
// Layer: {"weights": [[...]], "labels": [...], "background": name,
//         "input_dim": int, "scales": [...], "config": {...}}
// Pipeline file: {"first_layer": layer, "second_layer": layer}

inline Json layer_to_json(const LinearModel& model, const ParserConfig& config) {
  Json rows = Json::array();
  for (ClassIndex c = 0; c < model.class_count(); ++c) {
    auto r = model.row(c);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  TrainConfig tc;
  tc.lambda = config.lambda;
  tc.seed = config.seed;
  return {{"weights", std::move(rows)},
          {"labels", model.labels().names()},
          {"background", model.labels().name(model.labels().background())},
          {"input_dim", model.input_dim()},
          {"scales", config.scales},
          {"config", config_to_json(config, tc)}};
}

inline LinearModel layer_from_json(const Json& j, const std::string& source) {
  const LabelSpace labels = label_space_from_json(j, source);
  return detail::json_guard(source, [&] {
    const auto dim = j.at("input_dim").get<std::size_t>();
    const auto rows = j.at("weights").get<std::vector<std::vector<double>>>();
    if (rows.size() != labels.size())
      throw InvalidInput(source + ": " + std::to_string(rows.size()) + " weight rows for " +
                         std::to_string(labels.size()) + " labels");
    std::vector<double> flat;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != dim)
        throw InvalidInput(source + ": weight row " + std::to_string(r) + " has " +
                           std::to_string(rows[r].size()) + " entries, expected " +
                           std::to_string(dim));
      flat.insert(flat.end(), rows[r].begin(), rows[r].end());
    }
    return LinearModel(std::move(flat), labels, dim);
  });
}

inline Json model_to_json(const PipelineModel& model) {
  return {{"first_layer", layer_to_json(model.first_layer, model.config)},
          {"second_layer", layer_to_json(model.second_layer, model.config)}};
}

inline PipelineModel model_from_json(const Json& j, const std::string& source) {
  PipelineModel m;
  detail::json_guard(source, [&] {
    m.first_layer = layer_from_json(j.at("first_layer"), source + ": first_layer");
    m.second_layer = layer_from_json(j.at("second_layer"), source + ": second_layer");
    return 0;
  });
  try {
    m.config = config_from_json(j.at("first_layer").at("config"), source).parser;
  } catch (const ConfigError& e) {
    throw InvalidInput(e.what());
  }
  if (m.first_layer.labels() != m.second_layer.labels())
    throw InvalidInput(source + ": layers use different label sets");
  const std::size_t expected = (2 * m.config.scales.size() + 1) * m.first_layer.class_count();
  if (m.second_layer.input_dim() != expected)
    throw InvalidInput(source + ": second layer input_dim " +
                       std::to_string(m.second_layer.input_dim()) + ", expected " +
                       std::to_string(expected));
  return m;
}

inline void save_model(const std::filesystem::path& path, const PipelineModel& model) {
  detail::write_json(path, model_to_json(model));
}

inline PipelineModel load_model(const std::filesystem::path& path) {
  return model_from_json(detail::read_json(path), path.string());
}

// ---- generator spec ----
// {"classes": [...], "background": name, "dim": D, "prototypes": [[...]],
//  "prototype_scale": r, "prototype_seed": k, "noise": s, "segment_length": [lo, hi],
//  "segments_per_sequence": [lo, hi], "sequences": n,
//  "couplings": [{"pair": [a, b], "context": [ca, cb]}],
//  "class_weights": {name: w, ...}, "seed": k}

inline GenSpec gen_spec_from_json(const Json& j, const std::string& source = "spec") {
  GenSpec g;
  detail::json_guard(source, [&] {
    const auto names = j.at("classes").get<std::vector<std::string>>();
    const std::string bg = j.value("background", names.empty() ? std::string() : names.front());
    auto it = std::find(names.begin(), names.end(), bg);
    if (it == names.end()) throw InvalidInput(source + ": background '" + bg + "' not in classes");
    g.labels = LabelSpace(names, static_cast<ClassIndex>(it - names.begin()));
    g.dim = j.value("dim", g.dim);
    if (j.contains("prototypes"))
      g.prototypes = j.at("prototypes").get<std::vector<std::vector<double>>>();
    g.prototype_scale = j.value("prototype_scale", g.prototype_scale);
    g.prototype_seed = j.value("prototype_seed", g.prototype_seed);
    g.noise = j.value("noise", g.noise);
    if (j.contains("segment_length")) {
      const auto r = j.at("segment_length").get<std::vector<std::size_t>>();
      if (r.size() != 2) throw InvalidInput(source + ": segment_length must be [lo, hi]");
      g.min_length = r[0];
      g.max_length = r[1];
    }
    if (j.contains("segments_per_sequence")) {
      const auto r = j.at("segments_per_sequence").get<std::vector<std::size_t>>();
      if (r.size() != 2) throw InvalidInput(source + ": segments_per_sequence must be [lo, hi]");
      g.min_segments = r[0];
      g.max_segments = r[1];
    }
    g.sequences = j.value("sequences", g.sequences);
    g.seed = j.value("seed", g.seed);
    if (j.contains("couplings")) {
      for (const auto& c : j.at("couplings")) {
        const auto pair = c.at("pair").get<std::vector<std::string>>();
        const auto ctx = c.at("context").get<std::vector<std::string>>();
        if (pair.size() != 2 || ctx.size() != 2)
          throw InvalidInput(source + ": coupling needs two pair and two context classes");
        g.couplings.push_back({g.labels.index_of(pair[0]), g.labels.index_of(pair[1]),
                               g.labels.index_of(ctx[0]), g.labels.index_of(ctx[1])});
      }
    }
    if (j.contains("class_weights")) {
      g.class_weights.assign(names.size(), 1.0);
      for (const auto& [name, w] : j.at("class_weights").items())
        g.class_weights[g.labels.index_of(name)] = w.get<double>();
    }
    return 0;
  });
  g.validate();
  return g;
}

inline GenSpec load_gen_spec(const std::filesystem::path& path) {
  return gen_spec_from_json(detail::read_json(path), path.string());
}

// ---- datasets ----
// DIR/manifest.json: {"labels": [...], "background": name,
//                     "sequences": [{"features": file, "annotations": file}]}

inline void write_dataset(const std::filesystem::path& dir,
                          const std::vector<LabeledSequence>& sequences,
                          const LabelSpace& labels) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InvalidInput("cannot create '" + dir.string() + "': " + ec.message());
  Json entries = Json::array();
  for (std::size_t s = 0; s < sequences.size(); ++s) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "seq_%04zu", s);
    const std::string csv = std::string(stem) + ".csv";
    const std::string ann = std::string(stem) + ".json";
    save_features(dir / csv, sequences[s].frames);
    save_annotations(dir / ann, sequences[s].truth, labels);
    entries.push_back({{"features", csv}, {"annotations", ann}});
  }
  detail::write_json(dir / "manifest.json",
                     {{"labels", labels.names()},
                      {"background", labels.name(labels.background())},
                      {"sequences", std::move(entries)}});
}

inline TrainingCorpus read_dataset(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  const Json manifest = detail::read_json(manifest_path);
  TrainingCorpus corpus;
  corpus.labels = label_space_from_json(manifest, manifest_path.string());
  const auto entries = detail::json_guard(manifest_path.string(), [&] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : manifest.at("sequences"))
      out.emplace_back(e.at("features").get<std::string>(), e.at("annotations").get<std::string>());
    return out;
  });
  for (const auto& [csv, ann] : entries) {
    LabeledSequence ls{load_features(dir / csv), load_annotations(dir / ann, corpus.labels)};
    if (ls.truth.breakpoints.back() != ls.frames.frame_count())
      throw InvalidInput((dir / ann).string() + ": annotation covers " +
                         std::to_string(ls.truth.breakpoints.back()) + " frames but '" + csv +
                         "' has " + std::to_string(ls.frames.frame_count()));
    corpus.sequences.push_back(std::move(ls));
  }
  return corpus;
}

}  // namespace actparse
