#include "placeplan/service.hpp"

#include <thread>

#include <httplib.h>

#include "records_json.hpp"

namespace placeplan {

using detail::json;

std::pair<std::string, int> parse_bind_address(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == address.size())
    throw ValidationError("bind address must look like host:port, got '" + address + "'");
  int port = 0;
  try {
    std::size_t used = 0;
    port = std::stoi(address.substr(colon + 1), &used);
    if (used != address.size() - colon - 1) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw ValidationError("bad port in bind address '" + address + "'");
  }
  if (port < 0 || port > 65535) throw ValidationError("port out of range in '" + address + "'");
  return {address.substr(0, colon), port};
}

namespace {

int status_for(const std::string& code) {
  if (code == "not_found") return 404;
  if (code == "already_placed") return 409;
  if (code == "remote_error") return 502;
  if (code == "parse_error" || code == "validation_error" || code == "contract_violation" ||
      code == "cap_exceeded" || code == "unsupported_geometry" || code == "no_receptacle" ||
      code == "no_candidates" || code == "completion_parse_error")
    return 400;
  return 500;
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const std::string& stage, const std::string& code,
                const std::string& message) {
  send_json(res, status_for(code), {{"stage", stage}, {"code", code}, {"message", message}});
}

// Runs a handler body, converting exceptions into the error envelope.
template <class Fn>
void guarded(httplib::Response& res, const std::string& default_stage, Fn&& fn) {
  try {
    fn();
  } catch (const StageError& e) {
    send_error(res, to_string(e.stage()), e.code(), e.what());
  } catch (const Error& e) {
    send_error(res, default_stage, e.code(), e.what());
  } catch (const json::exception& e) {
    send_error(res, default_stage, "parse_error", e.what());
  } catch (const std::exception& e) {
    send_error(res, default_stage, "internal_error", e.what());
  }
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("request body is not JSON: ") + e.what());
  }
}

}  // namespace

struct Service::Impl {
  std::shared_ptr<Planner> planner;
  httplib::Server server;
  std::thread thread;
  bool bound = false;

  void routes() {
    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"status", "ok"}});
    });

    server.Post("/scenes", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, "ingest", [&] {
        const Scenario scenario = parse_scenario(req.body);
        const std::string id = planner->store().add_scene(scenario);
        send_json(res, 201, {{"scene_id", id}});
      });
    });

    server.Get(R"(/scenes/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, "ingest", [&] {
        const std::string id = req.matches[1];
        const auto stored = planner->store().scene(id);
        if (!stored) throw NotFound("unknown scene '" + id + "'");
        json placed = json::array();
        for (const auto& o : planner->store().placements(id)) placed.push_back(detail::to_json(o));
        send_json(res, 200,
                  {{"scene_id", id},
                   {"scene", json::parse(serialize_scenario(stored->scenario, -1))},
                   {"placed", placed}});
      });
    });

    server.Post(R"(/scenes/([^/]+)/plan)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, "ingest", [&] {
        const std::string id = req.matches[1];
        const auto stored = planner->store().scene(id);
        if (!stored) throw NotFound("unknown scene '" + id + "'");
        const json body = parse_body(req);
        TaskDescription task = stored->scenario.task.value_or(TaskDescription{});
        if (body.contains("task")) task.text = body.at("task").get<std::string>();
        if (body.contains("similarity_hint"))
          task.similarity_hint = similarity_hint_from_string(body.at("similarity_hint").get<std::string>());
        if (task.text.empty()) throw ValidationError("task text must not be empty");
        PipelineConfig config = planner->config();
        if (body.contains("overrides")) config = apply_overrides(config, body.at("overrides").dump());
        PlanOptions options;
        options.scene_id = id;
        options.ground_truth = stored->scenario.ground_truth;
        options.z_mode = stored->scenario.z_mode;
        options.resolution = stored->scenario.resolution;
        const PlanResult result = planner->plan_with(config, stored->scenario.scene, task, options);
        json out = detail::to_json(result, false);
        out["density_href"] = result.density ? json("/runs/" + result.run_id + "/density") : json(nullptr);
        send_json(res, 200, out);
      });
    });

    server.Get(R"(/runs/([^/]+)/density)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, "density", [&] {
        const std::string id = req.matches[1];
        const auto record = planner->store().run(id);
        if (!record) throw NotFound("unknown run '" + id + "'");
        const auto& field = record->result.density;
        if (!field || !field->grid) throw NotFound("run '" + id + "' has no density grid");
        const std::string format = req.has_param("format") ? req.get_param_value("format") : "binary";
        if (format == "binary") {
          res.set_content(grid_to_binary(*field->grid), "application/octet-stream");
        } else if (format == "text") {
          res.set_content(grid_to_text(*field->grid), "text/csv");
        } else {
          throw ValidationError("format must be binary or text");
        }
      });
    });

    server.Post(R"(/runs/([^/]+)/select)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, "selection", [&] {
        const json body = parse_body(req);
        if (!body.contains("rank") || !body.at("rank").is_number_integer())
          throw ValidationError("select needs an integer rank");
        const PlacementOutcome outcome = planner->execute_selection(req.matches[1], body.at("rank").get<int>());
        send_json(res, 200, detail::to_json(outcome));
      });
    });

    server.Get(R"(/runs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, "selection", [&] {
        const std::string id = req.matches[1];
        const auto record = planner->store().run(id);
        if (!record) throw NotFound("unknown run '" + id + "'");
        send_json(res, 200, detail::to_json(*record));
      });
    });
  }
};

Service::Service(std::shared_ptr<Planner> planner) : impl_(std::make_unique<Impl>()) {
  if (!planner) throw ContractViolation("service needs a planner");
  impl_->planner = std::move(planner);
  impl_->routes();
}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) throw Error("bind_failed", "cannot bind " + host + ":" + std::to_string(port));
  impl_->bound = true;
  return bound;
}

void Service::run() {
  if (!impl_->bound) throw ContractViolation("bind() before run()");
  impl_->server.listen_after_bind();
}

void Service::start() {
  if (!impl_->bound) throw ContractViolation("bind() before start()");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void Service::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace placeplan
