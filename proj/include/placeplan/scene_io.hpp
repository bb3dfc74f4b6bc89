#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "placeplan/candidates.hpp"
#include "placeplan/scene.hpp"

namespace placeplan {

struct ParseOptions {
  /// Unknown keys are errors in strict mode and warnings otherwise.
  bool strict = true;
};

/// Scene plus the evaluation metadata a benchmark fixture carries under the
/// optional top-level `scenario` key.
struct Scenario {
  std::string id;
  Scene scene;
  std::optional<TaskDescription> task;
  std::vector<std::string> ground_truth;  // receptacle ids counted as reasonable
  std::optional<ZMode> z_mode;
  std::optional<double> resolution;
};

Scene parse_scene(std::string_view document, const ParseOptions& options = {},
                  std::vector<std::string>* warnings = nullptr);
Scenario parse_scenario(std::string_view document, const ParseOptions& options = {},
                        std::vector<std::string>* warnings = nullptr);

std::string serialize_scene(const Scene& scene, int indent = 2);
std::string serialize_scenario(const Scenario& scenario, int indent = 2);

Scene load_scene_file(const std::string& path, const ParseOptions& options = {});
Scenario load_scenario_file(const std::string& path, const ParseOptions& options = {});

}  // namespace placeplan
