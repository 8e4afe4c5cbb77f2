#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsrm/annotations.hpp"
#include "nsrm/config.hpp"
#include "nsrm/crop.hpp"
#include "nsrm/eval.hpp"
#include "nsrm/loss.hpp"
#include "nsrm/parallel.hpp"
#include "nsrm/raster.hpp"
#include "nsrm/split.hpp"
#include "nsrm/synthesis.hpp"
#include "nsrm/tensor_io.hpp"

namespace nsrm {

namespace fs = std::filesystem;

/// File-name-safe form of an image id.
inline std::string output_stem(std::string_view image_id) {
  std::string s(image_id);
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  return s.empty() ? "_" : s;
}

inline constexpr std::string_view kStructureSuffix = ".structure.nsrm";
inline constexpr std::string_view kKcmSuffix = ".kcm.nsrm";
inline constexpr std::string_view kCropSuffix = ".crop.json";

/// Keypoints in network-input coordinates after the configured preprocessing.
inline KeypointSet prepare_keypoints(const AnnotationRecord& rec, const RunConfig& cfg,
                                     std::optional<CropResult>* crop_out = nullptr) {
  switch (cfg.preprocess) {
    case Preprocess::NONE: return rec.keypoints;
    case Preprocess::RESIZE: return resize_to_input(rec, cfg.synthesis.grid.input_size);
    case Preprocess::CROP: {
      CropResult crop = crop_hand(rec, cfg.crop_factor, cfg.synthesis.grid.input_size);
      KeypointSet kps = crop.keypoints;
      if (crop_out) *crop_out = std::move(crop);
      return kps;
    }
  }
  return rec.keypoints;
}

inline nlohmann::json crop_to_json(const CropResult& c) {
  return {{"origin_x", c.origin_x}, {"origin_y", c.origin_y}, {"side", c.side},    {"center_x", c.center.x},
          {"center_y", c.center.y}, {"scale", c.scale},       {"input_size", c.input_size}};
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
  bool keep_going = false;
  std::string json_summary;  // empty: none
  bool quiet = false;        // suppress per-record lines
};

struct SynthReport {
  std::size_t records = 0;
  std::size_t succeeded = 0;
  std::vector<std::pair<std::string, std::string>> failures;  // (image_id, message)
  double seconds = 0.0;
};

/// Writes <id>.structure.nsrm and <id>.kcm.nsrm (plus <id>.crop.json when
/// cropping) for every record. Returns 0 iff every record succeeded. Without
/// keep_going, records not yet started after the first failure are skipped.
inline int cmd_synth(const RunConfig& cfg, const fs::path& annotations, const fs::path& out_dir,
                     const SynthOptions& opts, std::ostream& out, std::ostream& err,
                     SynthReport* report_out = nullptr) {
  validate(cfg);
  const auto records = load_annotations(annotations, cfg.annotation_format);
  std::set<std::string> stems;
  for (const auto& r : records)
    if (!stems.insert(output_stem(r.image_id)).second)
      throw ConfigError("duplicate image id '" + r.image_id + "' would overwrite outputs");
  fs::create_directories(out_dir);

  struct Outcome {
    bool attempted = false;
    std::string error;
    double ms = 0.0;
  };
  std::vector<Outcome> outcomes(records.size());
  std::atomic<bool> stop{false};
  const auto t0 = std::chrono::steady_clock::now();

  parallel_for(records.size(), cfg.jobs, [&](std::size_t i) {
    if (stop) return;
    Outcome& o = outcomes[i];
    o.attempted = true;
    const auto start = std::chrono::steady_clock::now();
    try {
      const AnnotationRecord& rec = records[i];
      std::optional<CropResult> crop;
      const KeypointSet kps = prepare_keypoints(rec, cfg, &crop);
      const ChannelStack structure =
          synthesize_structure(kps, cfg.topology, cfg.scheme, cfg.representation, cfg.synthesis);
      const ChannelStack kcm = synthesize_kcm(kps, cfg.synthesis);
      const std::string stem = output_stem(rec.image_id);
      write_tensor(structure, out_dir / (stem + std::string(kStructureSuffix)));
      write_tensor(kcm, out_dir / (stem + std::string(kKcmSuffix)));
      if (crop) {
        std::ofstream f(out_dir / (stem + std::string(kCropSuffix)), std::ios::trunc);
        f << crop_to_json(*crop).dump(2) << '\n';
        if (!f) throw std::runtime_error("cannot write crop transform for '" + rec.image_id + "'");
      }
    } catch (const std::exception& e) {
      o.error = e.what();
      if (!opts.keep_going) stop = true;
    }
    o.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  });

  SynthReport report;
  report.records = records.size();
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Outcome& o = outcomes[i];
    if (!o.attempted) continue;
    if (o.error.empty()) {
      ++report.succeeded;
      if (!opts.quiet) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3f ms", o.ms);
        out << records[i].image_id << '\t' << buf << '\n';
      }
    } else {
      report.failures.emplace_back(records[i].image_id, o.error);
      err << "error: record '" << records[i].image_id << "': " << o.error << '\n';
    }
  }
  const std::size_t skipped = report.records - report.succeeded - report.failures.size();
  char buf[160];
  std::snprintf(buf, sizeof buf, "synthesized %zu/%zu records in %.3f s (%.1f records/s)", report.succeeded,
                report.records, report.seconds,
                report.seconds > 0 ? static_cast<double>(report.succeeded) / report.seconds : 0.0);
  out << buf;
  if (!report.failures.empty()) out << ", " << report.failures.size() << " failed";
  if (skipped > 0) out << ", " << skipped << " skipped";
  out << '\n';

  if (!opts.json_summary.empty()) {
    nlohmann::json j = {{"records", report.records},
                        {"succeeded", report.succeeded},
                        {"skipped", skipped},
                        {"seconds", report.seconds},
                        {"structure_channels", group_count(cfg.topology, cfg.scheme)},
                        {"kcm_channels", cfg.topology.keypoint_count},
                        {"config", to_json(cfg)}};
    j["failures"] = nlohmann::json::array();
    for (const auto& [id, msg] : report.failures) j["failures"].push_back({{"image_id", id}, {"error", msg}});
    std::ofstream f(opts.json_summary, std::ios::trunc);
    f << j.dump(2) << '\n';
  }
  const bool ok = report.succeeded == report.records;
  if (report_out) *report_out = std::move(report);
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------- eval

/// threshold,value rows under a "threshold,value" header.
inline void write_curve_csv(const PckCurve& curve, std::ostream& out) {
  out << "threshold,value\n";
  for (std::size_t i = 0; i < curve.values.size(); ++i)
    out << detail::format_real(curve.thresholds[i]) << ',' << detail::format_real(curve.values[i]) << '\n';
}

inline PckCurve read_curve_csv(std::istream& in, const std::string& source = "<stream>") {
  std::vector<double> ts, vs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#' || t.starts_with("threshold")) continue;
    const auto f = detail::split(t, ',');
    double a = 0, b = 0;
    if (f.size() != 2 || !detail::parse_number(f[0], a) || !detail::parse_number(f[1], b))
      throw detail::parse_error(source, lineno, "", "expected 'threshold,value'");
    ts.push_back(a);
    vs.push_back(b);
  }
  validate_thresholds(ts);
  return make_curve(std::move(ts), std::move(vs));
}

inline PckCurve load_curve_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_curve_csv(in, path.string());
}

/// Table with threshold columns and an "ave" column, values in percent.
/// Rows after the first get an improvement cell relative to the first when
/// `with_improvement` is set.
inline std::string format_pck_table(const std::vector<std::pair<std::string, PckCurve>>& rows,
                                    bool with_improvement) {
  std::ostringstream os;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-12s", "sigma_PCK");
  os << buf;
  for (double t : rows.front().second.thresholds) {
    std::snprintf(buf, sizeof buf, "%8.3g", t);
    os << buf;
  }
  os << "     ave";
  if (with_improvement) os << "  improvement";
  os << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& [name, curve] = rows[r];
    std::snprintf(buf, sizeof buf, "%-12s", name.c_str());
    os << buf;
    for (double v : curve.values) {
      std::snprintf(buf, sizeof buf, "%8.2f", v * 100.0);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%8.2f", curve.average * 100.0);
    os << buf;
    if (with_improvement)
      os << "  "
         << (r == 0 ? std::string("-")
                    : format_improvement(improvement(rows[0].second.average * 100.0, curve.average * 100.0)));
    os << '\n';
  }
  return os.str();
}

/// Keypoint sets keyed by image id, from an annotation file or a directory of
/// *.kcm.nsrm tensors (decoded by argmax into network-input coordinates).
inline std::vector<std::pair<std::string, KeypointSet>> load_keypoint_sets(const fs::path& path,
                                                                           AnnotationFormat format,
                                                                           const GridSpec& grid) {
  std::vector<std::pair<std::string, KeypointSet>> out;
  if (fs::is_directory(path) && format != AnnotationFormat::PANOPTIC_HANDS) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(path)) {
      const std::string name = e.path().filename().string();
      if (e.is_regular_file() && name.ends_with(kKcmSuffix)) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      std::string id = f.filename().string();
      id.resize(id.size() - kKcmSuffix.size());
      out.emplace_back(std::move(id), decode_keypoints(read_tensor(f), grid));
    }
    return out;
  }
  for (auto& rec : load_annotations(path, format)) out.emplace_back(rec.image_id, std::move(rec.keypoints));
  return out;
}

struct EvalOptions {
  std::string pred;      // keypoint file or KCM tensor directory
  std::string gt;
  std::string curve;     // precomputed curve CSV, instead of pred/gt
  std::string baseline;  // baseline curve CSV
  std::string curve_out;
  std::string plot_out;
  std::string json_summary;
  std::vector<double> thresholds = thresholds::onehand10k();
  AnnotationFormat format = AnnotationFormat::CANONICAL;
  GridSpec grid;
  int jobs = 1;
};

inline PckCurve evaluate_files(const EvalOptions& opts) {
  const auto preds = load_keypoint_sets(opts.pred, opts.format, opts.grid);
  const auto gts = load_keypoint_sets(opts.gt, opts.format, opts.grid);
  if (preds.size() != gts.size())
    throw ConfigError("got " + std::to_string(preds.size()) + " predictions for " + std::to_string(gts.size()) +
                      " ground-truth records");
  std::map<std::string, const KeypointSet*> by_id;
  for (const auto& [id, k] : preds) by_id[id] = &k;
  std::vector<KeypointSet> p, g;
  for (const auto& [id, k] : gts) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw ConfigError("no prediction for ground-truth record '" + id + "'");
    p.push_back(*it->second);
    g.push_back(k);
  }
  return pck(p, g, opts.thresholds, opts.jobs);
}

inline int cmd_eval(const EvalOptions& opts, std::ostream& out) {
  PckCurve curve = opts.curve.empty() ? evaluate_files(opts) : load_curve_csv(opts.curve);
  std::vector<std::pair<std::string, PckCurve>> rows;
  std::optional<PckCurve> base;
  if (!opts.baseline.empty()) {
    base = load_curve_csv(opts.baseline);
    if (base->thresholds != curve.thresholds) throw ConfigError("baseline thresholds differ from the evaluated ones");
    rows.emplace_back("baseline", *base);
  }
  rows.emplace_back("result", curve);
  out << format_pck_table(rows, base.has_value());

  if (!opts.curve_out.empty()) {
    std::ofstream f(opts.curve_out, std::ios::trunc);
    write_curve_csv(curve, f);
    if (!f) throw std::runtime_error("cannot write " + opts.curve_out);
  }
  if (!opts.plot_out.empty()) {
    std::vector<PlotSeries> series;
    if (base) series.push_back({base->thresholds, base->values, {128, 128, 128}});
    series.push_back({curve.thresholds, curve.values, {200, 30, 30}});
    write_pnm(render_line_chart(series), opts.plot_out);
  }
  if (!opts.json_summary.empty()) {
    nlohmann::json j = {{"thresholds", curve.thresholds}, {"values", curve.values}, {"average", curve.average}};
    if (base) {
      const Improvement imp = improvement(base->average, curve.average);
      j["baseline_average"] = base->average;
      j["improvement"] = {{"absolute", imp.absolute}, {"relative", imp.relative}};
    }
    std::ofstream f(opts.json_summary, std::ios::trunc);
    f << j.dump(2) << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- render

/// Writes a .pgm (gray, max over channels) or .ppm (palette-tinted channels).
/// Empty `channels` selects all of them.
inline int cmd_render(const fs::path& tensor_in, const fs::path& image_out, std::vector<std::size_t> channels,
                      int zoom = 1) {
  const ChannelStack stack = read_tensor(tensor_in);
  if (stack.empty()) throw ConfigError("tensor has no channels");
  if (zoom < 1) throw ConfigError("zoom must be at least 1");
  if (channels.empty())
    for (std::size_t c = 0; c < stack.size(); ++c) channels.push_back(c);
  for (std::size_t c : channels)
    if (c >= stack.size())
      throw ConfigError("channel " + std::to_string(c) + " out of range (tensor has " + std::to_string(stack.size()) +
                        " channels)");
  const bool color = image_out.extension() == ".ppm";
  write_pnm(color ? render_color(stack, channels, zoom) : render_gray(stack, channels, zoom), image_out);
  return 0;
}

// ---------------------------------------------------------------- schedule

inline int cmd_schedule(const LossWeights& w, int epochs, std::ostream& out) {
  validate(w);
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  out << "epoch\tlambda1\tlambda2\n";
  for (int e = 0; e < epochs; ++e) {
    const auto [l1, l2] = weights_at_epoch(w, e);
    out << e << '\t' << detail::format_real(l1) << '\t' << detail::format_real(l2) << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- split

/// Writes <prefix>train.txt, <prefix>val.txt and <prefix>test.txt.
inline int cmd_split(const fs::path& annotations, AnnotationFormat format, std::array<double, 3> fractions,
                     std::uint64_t seed, const std::string& out_prefix, std::ostream& out) {
  auto records = load_annotations(annotations, format);
  const int k = records.empty() ? 21 : static_cast<int>(records.front().keypoints.size());
  const DatasetSplit s = split_dataset(std::move(records), fractions, seed);
  save_canonical(out_prefix + "train.txt", s.train, k);
  save_canonical(out_prefix + "val.txt", s.validation, k);
  save_canonical(out_prefix + "test.txt", s.test, k);
  out << "train " << s.train.size() << "\nval " << s.validation.size() << "\ntest " << s.test.size() << '\n';
  return 0;
}

}  // namespace nsrm
