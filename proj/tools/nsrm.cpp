#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nsrm/commands.hpp"

namespace {

struct SynthesisFlags {
  std::string config;
  std::optional<std::string> repr, scheme, lpm_mode, grid, preprocess, format;
  std::optional<double> sigma_ldm, sigma_lpm, sigma_kcm, crop_factor, lambda1, lambda2, decay_ratio;
  std::optional<int> input_size, decay_period, jobs;

  void add_to(CLI::App* app, bool synthesis_options) {
    app->add_option("--config", config, "JSON run config; flags override its values");
    app->add_option("--repr", repr, "LDM or LPM");
    app->add_option("--scheme", scheme, "G1, G6 or G1AND6");
    app->add_option("--lambda1", lambda1, "whole-hand structure weight");
    app->add_option("--lambda2", lambda2, "six-group structure weight");
    app->add_option("--decay-ratio", decay_ratio, "structure weight decay ratio");
    app->add_option("--decay-period", decay_period, "epochs between decays");
    if (!synthesis_options) return;
    app->add_option("--sigma-ldm", sigma_ldm, "LDM half width (map px)");
    app->add_option("--sigma-lpm", sigma_lpm, "LPM spread (map px)");
    app->add_option("--sigma-kcm", sigma_kcm, "KCM standard deviation (map px)");
    app->add_option("--lpm-mode", lpm_mode, "LINEAR or SQUARED distance in the LPM exponent");
    app->add_option("--grid", grid, "map size, e.g. 46 or 46x46");
    app->add_option("--input-size", input_size, "network input side in px");
    app->add_option("--preprocess", preprocess, "none, resize or crop");
    app->add_option("--crop-factor", crop_factor, "crop side as a multiple of the bbox dimension");
    app->add_option("--format", format, "CANONICAL, PANOPTIC_HANDS or ONEHAND10K");
    app->add_option("--jobs", jobs, "worker threads (0 = all cores)");
  }

  nsrm::RunConfig resolve() const {
    nsrm::RunConfig cfg = config.empty() ? nsrm::RunConfig{} : nsrm::load_config(config);
    if (repr) cfg.representation = nsrm::parse_representation(*repr);
    if (scheme) cfg.scheme = nsrm::parse_scheme(*scheme);
    if (lpm_mode) cfg.synthesis.lpm_distance_mode = nsrm::parse_lpm_mode(*lpm_mode);
    if (sigma_ldm) cfg.synthesis.sigma_ldm = *sigma_ldm;
    if (sigma_lpm) cfg.synthesis.sigma_lpm = *sigma_lpm;
    if (sigma_kcm) cfg.synthesis.sigma_kcm = *sigma_kcm;
    if (grid) {
      const auto x = grid->find('x');
      try {
        cfg.synthesis.grid.width = std::stoi(grid->substr(0, x));
        cfg.synthesis.grid.height = x == std::string::npos ? cfg.synthesis.grid.width : std::stoi(grid->substr(x + 1));
      } catch (const std::exception&) {
        throw nsrm::ConfigError("malformed --grid '" + *grid + "'");
      }
    }
    if (input_size) cfg.synthesis.grid.input_size = *input_size;
    if (preprocess) cfg.preprocess = nsrm::parse_preprocess(*preprocess);
    if (crop_factor) cfg.crop_factor = *crop_factor;
    if (format) cfg.annotation_format = nsrm::parse_annotation_format(*format);
    if (lambda1) cfg.lambda1 = *lambda1;
    if (lambda2) cfg.lambda2 = *lambda2;
    if (decay_ratio) cfg.decay_ratio = *decay_ratio;
    if (decay_period) cfg.decay_period = *decay_period;
    if (jobs) cfg.jobs = *jobs;
    nsrm::validate(cfg);
    return cfg;
  }
};

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (auto part : nsrm::detail::split(s, ',')) {
    double v = 0;
    if (!nsrm::detail::parse_number(part, v)) throw nsrm::ConfigError("malformed number '" + std::string(part) + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nsrm: hand structure ground-truth synthesis and PCK evaluation"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "write structure and keypoint map tensors per annotation record");
  SynthesisFlags synth_flags;
  synth_flags.add_to(synth, true);
  std::string synth_in, synth_out;
  nsrm::SynthOptions synth_opts;
  synth->add_option("--annotations,-i", synth_in, "annotation file or directory");
  synth->add_option("--out,-o", synth_out, "output directory");
  synth->add_flag("--keep-going", synth_opts.keep_going, "continue past bad records");
  synth->add_flag("--quiet,-q", synth_opts.quiet, "omit per-record timing lines");
  synth->add_option("--json-summary", synth_opts.json_summary, "write a machine-readable summary here");

  // eval
  auto* eval = app.add_subcommand("eval", "PCK table, curve data and plot");
  nsrm::EvalOptions eval_opts;
  std::optional<std::string> threshold_list, preset, eval_format, eval_grid;
  std::optional<int> eval_input_size;
  eval->add_option("--pred", eval_opts.pred, "predicted keypoints (annotation file or *.kcm.nsrm directory)");
  eval->add_option("--gt", eval_opts.gt, "ground-truth keypoints (annotation file or *.kcm.nsrm directory)");
  eval->add_option("--curve", eval_opts.curve, "precomputed threshold,value CSV instead of --pred/--gt");
  eval->add_option("--baseline", eval_opts.baseline, "baseline threshold,value CSV for the improvement column");
  eval->add_option("--threshold-list", threshold_list, "comma-separated PCK thresholds");
  eval->add_option("--preset", preset, "onehand10k (0.1..0.3) or panoptic (0.04..0.12)");
  eval->add_option("--format", eval_format, "annotation format of --pred/--gt files");
  eval->add_option("--grid", eval_grid, "map size of decoded tensors");
  eval->add_option("--input-size", eval_input_size, "network input side of decoded tensors");
  eval->add_option("--jobs", eval_opts.jobs, "worker threads");
  eval->add_option("--curve-out", eval_opts.curve_out, "write threshold,value CSV");
  eval->add_option("--plot-out", eval_opts.plot_out, "write a PPM line chart");
  eval->add_option("--json-summary", eval_opts.json_summary, "write a machine-readable summary here");

  // render
  auto* render = app.add_subcommand("render", "rasterize tensor channels to a PGM/PPM image");
  std::string render_in, render_out;
  std::vector<std::size_t> render_channels;
  int zoom = 1;
  render->add_option("tensor", render_in, "input .nsrm tensor")->required();
  render->add_option("image", render_out, "output .pgm (gray) or .ppm (color)")->required();
  render->add_option("--channel,-c", render_channels, "channel index (repeatable; default all)");
  render->add_option("--zoom", zoom, "pixel replication factor");

  // schedule
  auto* schedule = app.add_subcommand("schedule", "print decayed structure weights per epoch");
  SynthesisFlags schedule_flags;
  schedule_flags.add_to(schedule, false);
  int epochs = 60;
  schedule->add_option("--epochs", epochs, "number of epochs");

  // split
  auto* split = app.add_subcommand("split", "seeded train/val/test partition");
  std::string split_in, split_prefix = "split_", split_format = "CANONICAL", split_fractions = "0.8,0.1,0.1";
  std::uint64_t seed = 0;
  split->add_option("--annotations,-i", split_in, "annotation file")->required();
  split->add_option("--format", split_format, "annotation format");
  split->add_option("--fractions", split_fractions, "train,val,test fractions");
  split->add_option("--seed", seed, "shuffle seed");
  split->add_option("--out-prefix", split_prefix, "output path prefix");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      nsrm::RunConfig cfg = synth_flags.resolve();
      if (!synth_in.empty()) cfg.annotations = synth_in;
      if (!synth_out.empty()) cfg.output = synth_out;
      if (cfg.annotations.empty() || cfg.output.empty())
        throw nsrm::ConfigError("synth needs --annotations and --out (or config keys)");
      return nsrm::cmd_synth(cfg, cfg.annotations, cfg.output, synth_opts, std::cout, std::cerr);
    }
    if (*eval) {
      if (threshold_list && preset) throw nsrm::ConfigError("use either --threshold-list or --preset");
      if (threshold_list) eval_opts.thresholds = parse_list(*threshold_list);
      if (preset) {
        if (*preset == "onehand10k") eval_opts.thresholds = nsrm::thresholds::onehand10k();
        else if (*preset == "panoptic") eval_opts.thresholds = nsrm::thresholds::panoptic();
        else throw nsrm::ConfigError("unknown preset '" + *preset + "'");
      }
      if (eval_format) eval_opts.format = nsrm::parse_annotation_format(*eval_format);
      if (eval_grid) {
        SynthesisFlags f;
        f.grid = eval_grid;
        eval_opts.grid = f.resolve().synthesis.grid;
      }
      if (eval_input_size) eval_opts.grid.input_size = *eval_input_size;
      if (eval_opts.curve.empty() && (eval_opts.pred.empty() || eval_opts.gt.empty()))
        throw nsrm::ConfigError("eval needs --pred and --gt, or --curve");
      return nsrm::cmd_eval(eval_opts, std::cout);
    }
    if (*render) return nsrm::cmd_render(render_in, render_out, render_channels, zoom);
    if (*schedule) return nsrm::cmd_schedule(schedule_flags.resolve().weights(), epochs, std::cout);
    if (*split) {
      const auto f = parse_list(split_fractions);
      if (f.size() != 3) throw nsrm::ConfigError("--fractions needs three values");
      return nsrm::cmd_split(split_in, nsrm::parse_annotation_format(split_format), {f[0], f[1], f[2]}, seed,
                             split_prefix, std::cout);
    }
  } catch (const nsrm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
