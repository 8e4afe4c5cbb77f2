#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "nsrm/annotations.hpp"
#include "nsrm/error.hpp"
#include "nsrm/handmodel.hpp"
#include "nsrm/loss.hpp"
#include "nsrm/synthesis.hpp"

namespace nsrm {

enum class Preprocess { NONE, RESIZE, CROP };

inline std::string_view to_string(Preprocess p) {
  switch (p) {
    case Preprocess::NONE: return "none";
    case Preprocess::RESIZE: return "resize";
    case Preprocess::CROP: return "crop";
  }
  return "?";
}

inline Preprocess parse_preprocess(std::string_view s) {
  if (s == "none") return Preprocess::NONE;
  if (s == "resize") return Preprocess::RESIZE;
  if (s == "crop") return Preprocess::CROP;
  throw ConfigError("unknown preprocess mode '" + std::string(s) + "' (expected none, resize or crop)");
}

/// Everything a batch run needs. Loss weights left unset fall back to
/// default_weights(representation, scheme).
struct RunConfig {
  Representation representation = Representation::LPM;
  GroupScheme scheme = GroupScheme::G1;
  SynthesisConfig synthesis;
  std::optional<double> lambda1;
  std::optional<double> lambda2;
  double decay_ratio = 0.1;
  int decay_period = 20;
  HandTopology topology = default_topology();
  Preprocess preprocess = Preprocess::NONE;
  double crop_factor = 2.2;
  AnnotationFormat annotation_format = AnnotationFormat::CANONICAL;
  int jobs = 1;
  std::uint64_t seed = 0;
  std::string annotations;
  std::string output;

  LossWeights weights() const {
    LossWeights w = default_weights(representation, scheme);
    if (lambda1) w.lambda1 = *lambda1;
    if (lambda2) w.lambda2 = *lambda2;
    w.decay_ratio = decay_ratio;
    w.decay_period = decay_period;
    return w;
  }
};

inline void validate(const RunConfig& cfg) {
  validate(cfg.synthesis);
  validate(cfg.weights());
  validate(cfg.topology);
  if (!(cfg.crop_factor > 1.0)) throw ConfigError("crop_factor must exceed 1");
  if (cfg.jobs < 0) throw ConfigError("jobs must be non-negative (0 = all hardware threads)");
}

inline nlohmann::json topology_to_json(const HandTopology& topo) {
  nlohmann::json limbs = nlohmann::json::array();
  for (const auto& l : topo.limbs) limbs.push_back({l.parent, l.child});
  nlohmann::json chains = nlohmann::json::array();
  for (const auto& c : topo.finger_chains) chains.push_back({{"name", c.name}, {"keypoints", c.keypoints}});
  return {{"keypoint_count", topo.keypoint_count}, {"limbs", limbs}, {"finger_chains", chains}};
}

inline HandTopology topology_from_json(const nlohmann::json& j) {
  HandTopology topo;
  try {
    for (const auto& [key, _] : j.items())
      if (key != "keypoint_count" && key != "limbs" && key != "finger_chains")
        throw ConfigError("unknown topology key '" + key + "'");
    topo.keypoint_count = j.at("keypoint_count").get<int>();
    for (const auto& l : j.at("limbs")) {
      if (!l.is_array() || l.size() != 2) throw ConfigError("each limb must be a [parent, child] pair");
      topo.limbs.push_back({l[0].get<int>(), l[1].get<int>()});
    }
    if (j.contains("finger_chains"))
      for (const auto& c : j.at("finger_chains"))
        topo.finger_chains.push_back({c.at("name").get<std::string>(), c.at("keypoints").get<std::vector<int>>()});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed topology: ") + e.what());
  }
  validate(topo);
  return topo;
}

/// Applies a JSON object onto `cfg`. Unknown keys are rejected.
inline void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "representation") cfg.representation = parse_representation(v.get<std::string>());
      else if (key == "scheme") cfg.scheme = parse_scheme(v.get<std::string>());
      else if (key == "sigma_ldm") cfg.synthesis.sigma_ldm = v.get<double>();
      else if (key == "sigma_lpm") cfg.synthesis.sigma_lpm = v.get<double>();
      else if (key == "sigma_kcm") cfg.synthesis.sigma_kcm = v.get<double>();
      else if (key == "lpm_distance_mode") cfg.synthesis.lpm_distance_mode = parse_lpm_mode(v.get<std::string>());
      else if (key == "grid_width") cfg.synthesis.grid.width = v.get<int>();
      else if (key == "grid_height") cfg.synthesis.grid.height = v.get<int>();
      else if (key == "input_size") cfg.synthesis.grid.input_size = v.get<int>();
      else if (key == "lambda1") cfg.lambda1 = v.get<double>();
      else if (key == "lambda2") cfg.lambda2 = v.get<double>();
      else if (key == "decay_ratio") cfg.decay_ratio = v.get<double>();
      else if (key == "decay_period") cfg.decay_period = v.get<int>();
      else if (key == "topology") cfg.topology = topology_from_json(v);
      else if (key == "preprocess") cfg.preprocess = parse_preprocess(v.get<std::string>());
      else if (key == "crop_factor") cfg.crop_factor = v.get<double>();
      else if (key == "annotation_format") cfg.annotation_format = parse_annotation_format(v.get<std::string>());
      else if (key == "jobs") cfg.jobs = v.get<int>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "annotations") cfg.annotations = v.get<std::string>();
      else if (key == "output") cfg.output = v.get<std::string>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config value has the wrong type: ") + e.what());
  }
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  RunConfig cfg;
  apply_json(cfg, j);
  return cfg;
}

inline nlohmann::json to_json(const RunConfig& cfg) {
  const LossWeights w = cfg.weights();
  return {{"representation", to_string(cfg.representation)},
          {"scheme", to_string(cfg.scheme)},
          {"sigma_ldm", cfg.synthesis.sigma_ldm},
          {"sigma_lpm", cfg.synthesis.sigma_lpm},
          {"sigma_kcm", cfg.synthesis.sigma_kcm},
          {"lpm_distance_mode", to_string(cfg.synthesis.lpm_distance_mode)},
          {"grid_width", cfg.synthesis.grid.width},
          {"grid_height", cfg.synthesis.grid.height},
          {"input_size", cfg.synthesis.grid.input_size},
          {"lambda1", w.lambda1},
          {"lambda2", w.lambda2},
          {"decay_ratio", w.decay_ratio},
          {"decay_period", w.decay_period},
          {"topology", topology_to_json(cfg.topology)},
          {"preprocess", to_string(cfg.preprocess)},
          {"crop_factor", cfg.crop_factor},
          {"jobs", cfg.jobs},
          {"seed", cfg.seed}};
}

}  // namespace nsrm
