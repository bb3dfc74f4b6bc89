#include "placeplan/run_store.hpp"

#include <cstdio>
#include <sstream>

#include "placeplan/errors.hpp"
#include "records_json.hpp"

namespace placeplan {

using detail::json;

namespace {

std::string numbered(const char* prefix, std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%06llu", prefix, static_cast<unsigned long long>(n));
  return buf;
}

std::uint64_t number_of(const std::string& id) {
  const auto dash = id.rfind('-');
  if (dash == std::string::npos) return 0;
  try {
    return std::stoull(id.substr(dash + 1));
  } catch (const std::exception&) {
    return 0;
  }
}

}  // namespace

RunStore::RunStore(const std::filesystem::path& directory) : directory_(directory) {
  std::filesystem::create_directories(directory_);
  const auto path = directory_ / "runs.jsonl";
  {
    std::ifstream in(path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      replay(line, line_no);
    }
  }
  log_.open(path, std::ios::app);
  if (!log_) throw Error("store_error", "cannot open run store '" + path.string() + "'");
}

void RunStore::replay(const std::string& line, std::size_t line_no) {
  const std::string where = "runs.jsonl:" + std::to_string(line_no);
  try {
    const json doc = json::parse(line);
    const std::string type = doc.at("type").get<std::string>();
    if (type == "scene") {
      StoredScene s{doc.at("scene_id").get<std::string>(), parse_scenario(doc.at("scenario").dump())};
      next_scene_ = std::max(next_scene_, number_of(s.scene_id) + 1);
      scenes_[s.scene_id] = std::move(s);
    } else if (type == "run") {
      RunRecord r = detail::run_record_from(doc.at("record"));
      next_run_ = std::max(next_run_, number_of(r.run_id) + 1);
      runs_[r.run_id] = std::move(r);
    } else if (type == "outcome") {
      PlacementOutcome o = detail::outcome_from(doc.at("outcome"));
      auto it = runs_.find(o.run_id);
      if (it == runs_.end()) throw ParseError(where, "outcome for unknown run '" + o.run_id + "'");
      it->second.outcome = std::move(o);
    } else {
      throw ParseError(where, "unknown record type '" + type + "'");
    }
  } catch (const json::exception& e) {
    throw ParseError(where, e.what());
  }
}

void RunStore::append(const std::string& line) {
  if (!log_.is_open()) return;
  log_ << line << '\n';
  log_.flush();
}

std::string RunStore::add_scene(const Scenario& scenario) {
  std::lock_guard lock(mutex_);
  const std::string id = numbered("scene", next_scene_++);
  scenes_[id] = StoredScene{id, scenario};
  append(json{{"type", "scene"}, {"scene_id", id}, {"scenario", json::parse(serialize_scenario(scenario, -1))}}
             .dump());
  return id;
}

std::optional<StoredScene> RunStore::scene(const std::string& scene_id) const {
  std::lock_guard lock(mutex_);
  auto it = scenes_.find(scene_id);
  if (it == scenes_.end()) return std::nullopt;
  return it->second;
}

std::string RunStore::add_run(RunRecord record) {
  std::lock_guard lock(mutex_);
  record.run_id = numbered("run", next_run_++);
  record.result.run_id = record.run_id;
  if (record.outcome) record.outcome->run_id = record.run_id;
  append(json{{"type", "run"}, {"record", detail::to_json(record)}}.dump());
  const std::string id = record.run_id;
  runs_[id] = std::move(record);
  return id;
}

std::optional<RunRecord> RunStore::run(const std::string& run_id) const {
  std::lock_guard lock(mutex_);
  auto it = runs_.find(run_id);
  if (it == runs_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> RunStore::run_ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : runs_) ids.push_back(id);
  return ids;
}

std::vector<PlacementOutcome> RunStore::placements(const std::string& scene_id) const {
  std::lock_guard lock(mutex_);
  std::vector<PlacementOutcome> out;
  for (const auto& [id, r] : runs_) {
    if (r.scene_id == scene_id && r.outcome) out.push_back(*r.outcome);
  }
  return out;
}

void RunStore::begin_selection(const std::string& run_id) {
  std::lock_guard lock(mutex_);
  auto it = runs_.find(run_id);
  if (it == runs_.end()) throw NotFound("unknown run '" + run_id + "'");
  if (it->second.outcome || pending_.count(run_id))
    throw AlreadyPlaced("run '" + run_id + "' already has a placed candidate");
  pending_.insert(run_id);
}

void RunStore::abort_selection(const std::string& run_id) {
  std::lock_guard lock(mutex_);
  pending_.erase(run_id);
}

void RunStore::finish_selection(const PlacementOutcome& outcome) {
  std::lock_guard lock(mutex_);
  pending_.erase(outcome.run_id);
  auto it = runs_.find(outcome.run_id);
  if (it == runs_.end()) throw NotFound("unknown run '" + outcome.run_id + "'");
  it->second.outcome = outcome;
  append(json{{"type", "outcome"}, {"outcome", detail::to_json(outcome)}}.dump());
}

}  // namespace placeplan
