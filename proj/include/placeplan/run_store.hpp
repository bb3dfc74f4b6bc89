#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "placeplan/records.hpp"
#include "placeplan/scene_io.hpp"

namespace placeplan {

struct StoredScene {
  std::string scene_id;
  Scenario scenario;
};

/// Append-only run log. With a directory, every mutation is appended to
/// `runs.jsonl` there and replayed on construction; without one the store
/// lives in memory. All members are safe to call concurrently.
class RunStore {
 public:
  RunStore() = default;
  explicit RunStore(const std::filesystem::path& directory);

  std::string add_scene(const Scenario& scenario);
  std::optional<StoredScene> scene(const std::string& scene_id) const;

  /// Assigns the next run id ("run-000001", ...) and persists the record.
  std::string add_run(RunRecord record);
  std::optional<RunRecord> run(const std::string& run_id) const;
  std::vector<std::string> run_ids() const;
  /// Outcomes of runs planned on `scene_id`, in run order.
  std::vector<PlacementOutcome> placements(const std::string& scene_id) const;

  /// Reserves the single selection of a run. Throws NotFound or AlreadyPlaced.
  void begin_selection(const std::string& run_id);
  void abort_selection(const std::string& run_id);
  void finish_selection(const PlacementOutcome& outcome);

  const std::filesystem::path& directory() const { return directory_; }

 private:
  void append(const std::string& line);
  void replay(const std::string& line, std::size_t line_no);

  mutable std::mutex mutex_;
  std::filesystem::path directory_;
  std::ofstream log_;
  std::map<std::string, StoredScene> scenes_;
  std::map<std::string, RunRecord> runs_;
  std::set<std::string> pending_;
  std::uint64_t next_scene_ = 1;
  std::uint64_t next_run_ = 1;
};

}  // namespace placeplan
