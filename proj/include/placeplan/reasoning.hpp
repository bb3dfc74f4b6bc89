#pragma once

#include <map>
#include <string>
#include <vector>

#include "placeplan/chat_client.hpp"
#include "placeplan/scene.hpp"
#include "placeplan/stability.hpp"

namespace placeplan {

struct ObjectDescriptor {
  std::string id;
  std::string label;
  std::map<std::string, std::string> attributes;
  Vec3 center = Vec3::Zero();
  Vec3 size = Vec3::Zero();
};

/// A receptacle or one tier of a tiered receptacle.
struct ReceptacleCandidate {
  std::string id;         // object id, or "<object id>#tier<k>" with k = 1 at the bottom
  std::string object_id;  // owning scene object
  std::string label;
  Aabb bounds;
};

struct SummaryOptions {
  /// Case-insensitive substrings of labels that mark receptacles.
  std::vector<std::string> receptacle_labels = {"Rack", "Shelf", "Tray"};
};

struct SceneSummary {
  std::vector<ObjectDescriptor> objects;
  ObjectDescriptor placement;
  std::vector<ReceptacleCandidate> receptacles;

  const ReceptacleCandidate* find_receptacle(const std::string& id) const;
  /// Plain-text rendering used in prompts. Deterministic.
  std::string to_text() const;
};

/// Objects with an integer `tiers` attribute split into that many stacked
/// sub-receptacles. An optional `tier_bounds` attribute ("z0,z1,...,zn",
/// ascending world z) replaces the even split.
SceneSummary summarize_scene(const Scene& scene, const SummaryOptions& options = {});

struct ReasonerMetrics {
  double wall_time = 0.0;  // s
  long prompt_tokens = 0;
  long completion_tokens = 0;
};

struct ReceptacleDecision {
  std::vector<std::string> receptacle_ids;  // best first
  std::string rationale;
  ReasonerMetrics metrics;
};

/// Attribute key compared under a similarity rule.
std::string similarity_attribute(SimilarityHint hint);
/// Hint if set, else keyword scan of the task text, else object_property.
SimilarityHint resolve_similarity(const TaskDescription& task);

/// Ids of the objects counted as inside a receptacle: AABB center over its
/// footprint and bottom within its vertical extent.
std::vector<std::string> contained_objects(const SceneSummary& summary,
                                           const ReceptacleCandidate& receptacle);

ReceptacleDecision rule_reason(const SceneSummary& summary, const TaskDescription& task);

struct PromptConfig {
  std::string system_template;
  std::string user_template;

  static PromptConfig defaults();
  /// Reads system.txt and user.txt from `dir`.
  static PromptConfig load(const std::string& dir);
};

/// Substitutes {summary}, {task} and {candidates}.
std::vector<ChatMessage> render_prompt(const PromptConfig& prompts, const SceneSummary& summary,
                                       const TaskDescription& task);

/// Known ids in order of first appearance. Matching is case-insensitive,
/// prefers the longest id at a position, and requires id boundaries.
std::vector<std::string> extract_receptacle_ids(const std::string& text,
                                                const std::vector<std::string>& known);

ReceptacleDecision llm_reason(const RemoteChatClient& client, const SceneSummary& summary,
                              const TaskDescription& task, const PromptConfig& prompts);

struct ReceptacleEntry {
  Vec3 point;
  int reward = 0;  // 0 or 1
};

struct ReceptacleSet {
  std::vector<ReceptacleEntry> entries;  // aligned with the stable set entries
  std::vector<std::string> receptacle_ids;
  double radius = 0.1;
};

inline constexpr double kDefaultReceptacleRadius = 0.1;

ReceptacleSet receptacle_points(const StableSet& stable, const ReceptacleDecision& decision,
                                const SceneSummary& summary,
                                double radius = kDefaultReceptacleRadius);
ReceptacleSet receptacle_points(const StableSet& stable, const ReceptacleDecision& decision,
                                const Scene& scene, double radius = kDefaultReceptacleRadius);

}  // namespace placeplan
