#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "placeplan/candidates.hpp"
#include "placeplan/chat_client.hpp"
#include "placeplan/density.hpp"
#include "placeplan/stability.hpp"

namespace placeplan {

enum class ReasonerKind { rule, llm, llm_with_fallback };

std::string to_string(ReasonerKind kind);
/// Accepts "rule", "llm" and "llm_with_fallback".
ReasonerKind reasoner_kind_from_string(const std::string& s);

struct PipelineConfig {
  SimConfig sim;
  KdeConfig kde;
  BlendConfig blend;
  ReasonerKind reasoner = ReasonerKind::rule;
  int sample_k = 10;
  double min_separation = kDefaultMinSeparation;
  std::uint64_t seed = 0;
  double resolution = 0.01;
  ZMode z_mode = ZMode::surface_snap;
  std::size_t point_cap = kDefaultPointCap;
  double receptacle_radius = kDefaultReceptacleRadius;
  int repetitions = 20;
  unsigned threads = 0;           // 0: hardware concurrency
  std::uint64_t density_cells = 262144;  // cap on the heatmap lattice
  RemoteChatConfig llm = RemoteChatConfig::from_environment();
  std::string prompt_dir;         // empty: built-in templates

  void validate() const;
};

/// Strict: unknown keys are parse errors. Absent keys keep their defaults.
PipelineConfig parse_config(std::string_view document);
PipelineConfig load_config_file(const std::string& path);
std::string serialize_config(const PipelineConfig& cfg, int indent = 2);
/// Applies a JSON merge patch (same schema as the config file) to `base`.
PipelineConfig apply_overrides(const PipelineConfig& base, std::string_view patch);

}  // namespace placeplan
