#include "placeplan/reasoning.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "placeplan/errors.hpp"

namespace placeplan {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool is_id_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#' || c == '-';
}

ObjectDescriptor describe(const SceneObject& obj) {
  const Aabb box = object_aabb(obj);
  return {obj.id, obj.label, obj.attributes, box.center(), box.size()};
}

std::vector<double> parse_bounds(const std::string& text, const std::string& id) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ValidationError("object '" + id + "': malformed tier_bounds '" + text + "'");
    }
  }
  return out;
}

void fmt_vec(std::ostream& out, const Vec3& v) {
  out << '(' << v.x() << ", " << v.y() << ", " << v.z() << ')';
}

void fmt_attrs(std::ostream& out, const std::map<std::string, std::string>& attrs) {
  bool first = true;
  for (const auto& [k, v] : attrs) {
    out << (first ? "" : ", ") << k << '=' << v;
    first = false;
  }
  if (first) out << "none";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) out += (out.empty() ? "" : ", ") + id;
  return out;
}

}  // namespace

const ReceptacleCandidate* SceneSummary::find_receptacle(const std::string& id) const {
  for (const auto& r : receptacles) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

std::string SceneSummary::to_text() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  out << "objects:\n";
  for (const auto& o : objects) {
    out << "- " << o.id << " (" << o.label << ") center ";
    fmt_vec(out, o.center);
    out << " size ";
    fmt_vec(out, o.size);
    out << " attributes: ";
    fmt_attrs(out, o.attributes);
    out << '\n';
  }
  out << "object to place: " << placement.label << " attributes: ";
  fmt_attrs(out, placement.attributes);
  out << "\nreceptacles:\n";
  for (const auto& r : receptacles) {
    out << "- " << r.id << " (" << r.label << ") spans ";
    fmt_vec(out, r.bounds.min);
    out << " to ";
    fmt_vec(out, r.bounds.max);
    out << '\n';
  }
  return out.str();
}

SceneSummary summarize_scene(const Scene& scene, const SummaryOptions& options) {
  SceneSummary summary;
  std::vector<std::string> needles;
  for (const auto& l : options.receptacle_labels) needles.push_back(lower(l));
  for (const auto& obj : scene.objects) {
    summary.objects.push_back(describe(obj));
    const std::string label = lower(obj.label);
    const bool receptacle = std::any_of(needles.begin(), needles.end(), [&](const auto& n) {
      return label.find(n) != std::string::npos;
    });
    if (!receptacle) continue;
    const Aabb box = object_aabb(obj);
    int tiers = 1;
    if (const std::string t = obj.attribute("tiers"); !t.empty()) {
      try {
        tiers = std::stoi(t);
      } catch (const std::exception&) {
        throw ValidationError("object '" + obj.id + "': tiers must be an integer");
      }
      if (tiers < 1) throw ValidationError("object '" + obj.id + "': tiers must be >= 1");
    }
    if (tiers == 1) {
      summary.receptacles.push_back({obj.id, obj.id, obj.label, box});
      continue;
    }
    std::vector<double> bounds;
    if (const std::string tb = obj.attribute("tier_bounds"); !tb.empty()) {
      bounds = parse_bounds(tb, obj.id);
      if (bounds.size() != static_cast<std::size_t>(tiers) + 1 ||
          !std::is_sorted(bounds.begin(), bounds.end()))
        throw ValidationError("object '" + obj.id + "': tier_bounds needs tiers+1 ascending values");
    } else {
      for (int k = 0; k <= tiers; ++k)
        bounds.push_back(box.min.z() + (box.max.z() - box.min.z()) * k / tiers);
    }
    for (int k = 0; k < tiers; ++k) {
      Aabb tier = box;
      tier.min.z() = bounds[k];
      tier.max.z() = bounds[k + 1];
      summary.receptacles.push_back({obj.id + "#tier" + std::to_string(k + 1), obj.id, obj.label, tier});
    }
  }
  summary.placement = describe(scene.placement_object);
  summary.placement.center = Vec3::Zero();
  return summary;
}

std::string similarity_attribute(SimilarityHint hint) {
  switch (hint) {
    case SimilarityHint::color:
      return "color";
    case SimilarityHint::shape:
      return "shape";
    case SimilarityHint::genre:
      return "genre";
    case SimilarityHint::object_property:
    case SimilarityHint::none:
      break;
  }
  return "category";
}

SimilarityHint resolve_similarity(const TaskDescription& task) {
  if (task.similarity_hint != SimilarityHint::none) return task.similarity_hint;
  const std::string text = lower(task.text);
  if (text.find("color") != std::string::npos || text.find("colour") != std::string::npos)
    return SimilarityHint::color;
  if (text.find("shape") != std::string::npos) return SimilarityHint::shape;
  if (text.find("categor") != std::string::npos) return SimilarityHint::object_property;
  if (text.find("genre") != std::string::npos) return SimilarityHint::genre;
  return SimilarityHint::object_property;
}

std::vector<std::string> contained_objects(const SceneSummary& summary,
                                           const ReceptacleCandidate& receptacle) {
  constexpr double eps = 1e-6;
  std::vector<std::string> out;
  const Aabb& r = receptacle.bounds;
  for (const auto& o : summary.objects) {
    if (o.id == receptacle.object_id) continue;
    const double bottom = o.center.z() - 0.5 * o.size.z();
    if (o.center.x() < r.min.x() || o.center.x() > r.max.x() || o.center.y() < r.min.y() ||
        o.center.y() > r.max.y())
      continue;
    if (bottom < r.min.z() - eps || bottom > r.max.z() + eps) continue;
    out.push_back(o.id);
  }
  return out;
}

ReceptacleDecision rule_reason(const SceneSummary& summary, const TaskDescription& task) {
  const auto t0 = std::chrono::steady_clock::now();
  if (summary.receptacles.empty()) throw NoReceptacle("scene has no receptacle candidates");
  const SimilarityHint hint = resolve_similarity(task);
  const std::string key = similarity_attribute(hint);
  const auto wanted_it = summary.placement.attributes.find(key);
  const std::string wanted =
      wanted_it == summary.placement.attributes.end() ? "" : lower(wanted_it->second);

  auto value_of = [&](const std::map<std::string, std::string>& attrs) {
    const auto it = attrs.find(key);
    return it == attrs.end() ? std::string() : lower(it->second);
  };
  std::map<std::string, const ObjectDescriptor*> by_id;
  for (const auto& o : summary.objects) by_id[o.id] = &o;

  struct Scored {
    std::size_t order;
    int matches;
    std::string detail;
  };
  std::vector<Scored> scored;
  if (!wanted.empty()) {
    for (std::size_t i = 0; i < summary.receptacles.size(); ++i) {
      const auto& r = summary.receptacles[i];
      int matches = 0;
      std::string detail;
      if (const auto* self = by_id[r.object_id]; self && value_of(self->attributes) == wanted) {
        ++matches;
        detail = r.object_id;
      }
      for (const auto& id : contained_objects(summary, r)) {
        if (value_of(by_id[id]->attributes) == wanted) {
          ++matches;
          detail += (detail.empty() ? "" : ", ") + id;
        }
      }
      if (matches > 0) scored.push_back({i, matches, detail});
    }
  }

  ReceptacleDecision d;
  if (scored.empty()) {
    for (const auto& r : summary.receptacles) d.receptacle_ids.push_back(r.id);
    d.rationale = "no attribute match";
  } else {
    std::stable_sort(scored.begin(), scored.end(),
                     [](const Scored& a, const Scored& b) { return a.matches > b.matches; });
    std::ostringstream why;
    why << "matched " << key << '=' << wanted << ':';
    for (const auto& s : scored) {
      d.receptacle_ids.push_back(summary.receptacles[s.order].id);
      why << ' ' << summary.receptacles[s.order].id << " [" << s.detail << ']';
    }
    d.rationale = why.str();
  }
  d.metrics.wall_time = seconds_since(t0);
  return d;
}

PromptConfig PromptConfig::defaults() {
  PromptConfig p;
  p.system_template =
      "You help a robot operator decide where to put an object in a scene.\n"
      "Choose the receptacles that best satisfy the user's task.\n"
      "Answer with receptacle ids from the provided list, comma-separated, best first.\n"
      "Receptacle ids: {candidates}\n";
  p.user_template =
      "Scene:\n{summary}\n"
      "Task: {task}\n"
      "Which receptacles should the object go to?\n";
  return p;
}

PromptConfig PromptConfig::load(const std::string& dir) {
  auto slurp = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read prompt template '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  return {slurp(dir + "/system.txt"), slurp(dir + "/user.txt")};
}

std::vector<ChatMessage> render_prompt(const PromptConfig& prompts, const SceneSummary& summary,
                                       const TaskDescription& task) {
  std::vector<std::string> ids;
  for (const auto& r : summary.receptacles) ids.push_back(r.id);
  const std::string candidates = join_ids(ids);
  const std::string text = summary.to_text();
  // Substituted text is never rescanned for placeholders.
  auto fill = [&](const std::string& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size();) {
      if (s.compare(i, 9, "{summary}") == 0) {
        out += text;
        i += 9;
      } else if (s.compare(i, 6, "{task}") == 0) {
        out += task.text;
        i += 6;
      } else if (s.compare(i, 12, "{candidates}") == 0) {
        out += candidates;
        i += 12;
      } else {
        out += s[i++];
      }
    }
    return out;
  };
  return {{"system", fill(prompts.system_template)}, {"user", fill(prompts.user_template)}};
}

std::vector<std::string> extract_receptacle_ids(const std::string& text,
                                                const std::vector<std::string>& known) {
  const std::string hay = lower(text);
  std::vector<std::pair<std::string, std::string>> ids;  // lowered, original
  for (const auto& k : known) ids.emplace_back(lower(k), k);
  std::stable_sort(ids.begin(), ids.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  std::vector<std::string> found;
  for (std::size_t i = 0; i < hay.size(); ++i) {
    if (i > 0 && is_id_char(hay[i - 1])) continue;
    for (const auto& [low, orig] : ids) {
      if (low.empty() || hay.compare(i, low.size(), low) != 0) continue;
      const std::size_t end = i + low.size();
      if (end < hay.size() && is_id_char(hay[end])) continue;
      if (std::find(found.begin(), found.end(), orig) == found.end()) found.push_back(orig);
      i = end - 1;
      break;
    }
  }
  return found;
}

ReceptacleDecision llm_reason(const RemoteChatClient& client, const SceneSummary& summary,
                              const TaskDescription& task, const PromptConfig& prompts) {
  const auto t0 = std::chrono::steady_clock::now();
  if (summary.receptacles.empty()) throw NoReceptacle("scene has no receptacle candidates");
  const ChatResponse response = client.send(render_prompt(prompts, summary, task));
  std::vector<std::string> known;
  for (const auto& r : summary.receptacles) known.push_back(r.id);
  ReceptacleDecision d;
  d.receptacle_ids = extract_receptacle_ids(response.content, known);
  if (d.receptacle_ids.empty())
    throw CompletionParseError("completion names no known receptacle", response.content);
  d.rationale = response.content;
  d.metrics.prompt_tokens = response.prompt_tokens;
  d.metrics.completion_tokens = response.completion_tokens;
  d.metrics.wall_time = seconds_since(t0);
  return d;
}

ReceptacleSet receptacle_points(const StableSet& stable, const ReceptacleDecision& decision,
                                const SceneSummary& summary, double radius) {
  if (!(radius > 0.0)) throw ContractViolation("receptacle radius must be positive");
  std::vector<const ReceptacleCandidate*> chosen;
  for (const auto& id : decision.receptacle_ids) {
    const auto* r = summary.find_receptacle(id);
    if (!r) throw ContractViolation("decision references unknown receptacle '" + id + "'");
    chosen.push_back(r);
  }
  ReceptacleSet set;
  set.receptacle_ids = decision.receptacle_ids;
  set.radius = radius;
  set.entries.reserve(stable.entries.size());
  for (const auto& e : stable.entries) {
    const bool near = std::any_of(chosen.begin(), chosen.end(), [&](const auto* r) {
      return r->bounds.distance(e.point) <= radius;
    });
    set.entries.push_back({e.point, near ? 1 : 0});
  }
  return set;
}

ReceptacleSet receptacle_points(const StableSet& stable, const ReceptacleDecision& decision,
                                const Scene& scene, double radius) {
  return receptacle_points(stable, decision, summarize_scene(scene), radius);
}

}  // namespace placeplan
