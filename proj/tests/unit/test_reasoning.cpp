#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "builders.hpp"
#include "placeplan/errors.hpp"
#include "placeplan/reasoning.hpp"

// After Eigen: resolv.h defines a _res macro that clashes with Eigen internals.
#include <httplib.h>

using namespace placeplan;
using namespace placeplan::testing;

namespace {

class ScriptedTransport : public ChatTransport {
 public:
  explicit ScriptedTransport(std::vector<std::string> replies, int failures = 0)
      : replies_(std::move(replies)), failures_(failures) {}

  ChatResponse complete(const ChatRequest& request) override {
    last = request;
    ++calls;
    if (failures_-- > 0) throw RemoteError("connection refused", 1);
    const std::string reply = replies_.at(std::min<std::size_t>(calls - 1, replies_.size() - 1));
    return {reply, 362, 5};
  }

  ChatRequest last;
  int calls = 0;

 private:
  std::vector<std::string> replies_;
  int failures_;
};

SceneSummary trays() { return summarize_scene(load_fixture("category_trays.json").scene); }

}  // namespace

TEST_CASE("summary lists receptacles by label and splits tiers") {
  const SceneSummary s = trays();
  REQUIRE(s.receptacles.size() == 3);
  CHECK(s.receptacles[0].id == "tray_red");
  CHECK(s.placement.attributes.at("color") == "green");
  CHECK(s.to_text() == trays().to_text());
  CHECK(s.to_text().find("tray_green") != std::string::npos);

  const SceneSummary shelf = summarize_scene(load_fixture("bench/bookshelf_three_tier.json").scene);
  REQUIRE(shelf.receptacles.size() == 3);
  CHECK(shelf.receptacles[0].id == "bookshelf#tier1");
  CHECK(shelf.receptacles[2].id == "bookshelf#tier3");
  // Explicit tier bounds from the fixture.
  CHECK(shelf.receptacles[1].bounds.min.z() == doctest::Approx(0.36));
  CHECK(shelf.receptacles[1].bounds.max.z() == doctest::Approx(0.71));
  CHECK(shelf.receptacles[2].bounds.max.z() == doctest::Approx(1.07));
}

TEST_CASE("even tier split when no bounds are given") {
  Scene s = load_fixture("bench/bookshelf_two_tier.json").scene;
  s.objects[1].attributes.erase("tier_bounds");
  const SceneSummary sum = summarize_scene(s);
  REQUIRE(sum.receptacles.size() == 2);
  const double top = sum.receptacles[1].bounds.max.z();
  CHECK(sum.receptacles[0].bounds.max.z() == doctest::Approx(top / 2));
  s.objects[1].attributes["tier_bounds"] = "0,0.5";
  CHECK_THROWS_AS(summarize_scene(s), ValidationError);
  s.objects[1].attributes["tiers"] = "two";
  CHECK_THROWS_AS(summarize_scene(s), ValidationError);
}

TEST_CASE("contained objects use centre footprint and bottom height") {
  const SceneSummary s = trays();
  const auto in_green = contained_objects(s, *s.find_receptacle("tray_green"));
  REQUIRE(in_green.size() == 1);
  CHECK(in_green[0] == "block_green");
  const SceneSummary shelf = summarize_scene(load_fixture("bench/category_shelf.json").scene);
  CHECK(contained_objects(shelf, *shelf.find_receptacle("shelf#tier3")) == std::vector<std::string>{"chips"});
  CHECK(contained_objects(shelf, *shelf.find_receptacle("shelf#tier1")) == std::vector<std::string>{"glass"});
}

TEST_CASE("similarity resolution prefers the hint, then keywords") {
  CHECK(resolve_similarity({"anything", SimilarityHint::genre}) == SimilarityHint::genre);
  CHECK(resolve_similarity({"Sort objects based on colors", SimilarityHint::none}) == SimilarityHint::color);
  CHECK(resolve_similarity({"tidy up", SimilarityHint::none}) == SimilarityHint::object_property);
  CHECK(similarity_attribute(SimilarityHint::object_property) == "category");
  CHECK(similarity_attribute(SimilarityHint::color) == "color");
}

TEST_CASE("rule reasoner picks the receptacle holding a matching object") {
  const SceneSummary s = trays();
  const auto d = rule_reason(s, {"Sort objects based on colors", SimilarityHint::none});
  CHECK(d.receptacle_ids == std::vector<std::string>{"tray_green"});
  CHECK(d.rationale.find("block_green") != std::string::npos);
  CHECK(d.metrics.prompt_tokens == 0);

  const auto shelf = rule_reason(summarize_scene(load_fixture("bench/bookshelf_two_tier.json").scene),
                                 {"shelve it", SimilarityHint::genre});
  CHECK(shelf.receptacle_ids == std::vector<std::string>{"bookshelf#tier2"});

  const auto rack = rule_reason(summarize_scene(load_fixture("bench/dish_rack_medium.json").scene),
                                {"put it away", SimilarityHint::object_property});
  CHECK(rack.receptacle_ids == std::vector<std::string>{"rack"});
}

TEST_CASE("rule reasoner without a match returns every candidate") {
  const SceneSummary s = trays();
  const auto d = rule_reason(s, {"group by shape", SimilarityHint::shape});
  CHECK(d.receptacle_ids.size() == 3);
  CHECK(d.rationale == "no attribute match");
  SceneSummary empty = s;
  empty.receptacles.clear();
  CHECK_THROWS_AS(rule_reason(empty, {"x", SimilarityHint::none}), NoReceptacle);
}

TEST_CASE("id extraction honours boundaries, case and longest match") {
  const std::vector<std::string> known = {"shelf#tier1", "shelf#tier10", "tray", "tray_red"};
  CHECK(extract_receptacle_ids("Use SHELF#TIER10, then tray_red.", known) ==
        std::vector<std::string>{"shelf#tier10", "tray_red"});
  CHECK(extract_receptacle_ids("the ashtray and tray-2 are wrong; tray is right", known) ==
        std::vector<std::string>{"tray"});
  CHECK(extract_receptacle_ids("tray_red tray_red", known) == std::vector<std::string>{"tray_red"});
  CHECK(extract_receptacle_ids("nothing here", known).empty());
}

TEST_CASE("prompt rendering fills each placeholder once") {
  PromptConfig p;
  p.system_template = "ids: {candidates}";
  p.user_template = "{task} | {summary}";
  const SceneSummary s = trays();
  const auto msgs = render_prompt(p, s, {"literal {summary} stays", SimilarityHint::none});
  REQUIRE(msgs.size() == 2);
  CHECK(msgs[0].role == "system");
  CHECK(msgs[0].content == "ids: tray_red, tray_green, tray_blue");
  CHECK(msgs[1].content.rfind("literal {summary} stays | ", 0) == 0);

  const PromptConfig shipped = PromptConfig::load(PLACEPLAN_PROMPT_DIR);
  for (const auto& m : render_prompt(shipped, s, {"t", SimilarityHint::none}))
    CHECK(m.content.find('{') == std::string::npos);
  CHECK_THROWS_AS(PromptConfig::load("/nonexistent"), ValidationError);
}

TEST_CASE("llm reasoner parses the completion and records usage") {
  auto transport = std::make_shared<ScriptedTransport>(std::vector<std::string>{"Best: tray_green."});
  const RemoteChatClient client(transport, "mock-model", 2);
  const auto d = llm_reason(client, trays(), {"Sort objects based on colors", SimilarityHint::none},
                            PromptConfig::defaults());
  CHECK(d.receptacle_ids == std::vector<std::string>{"tray_green"});
  CHECK(d.metrics.prompt_tokens == 362);
  CHECK(d.metrics.completion_tokens == 5);
  CHECK(transport->last.model == "mock-model");
  CHECK(transport->last.temperature == 0.0);
}

TEST_CASE("llm reasoner errors keep the raw completion and attempt count") {
  auto vague = std::make_shared<ScriptedTransport>(std::vector<std::string>{"somewhere nice"});
  try {
    llm_reason(RemoteChatClient(vague, "m"), trays(), {"t", SimilarityHint::none}, PromptConfig::defaults());
    FAIL("expected a parse error");
  } catch (const CompletionParseError& e) {
    CHECK(e.raw_completion() == "somewhere nice");
  }

  auto flaky = std::make_shared<ScriptedTransport>(std::vector<std::string>{"tray_red"}, 1);
  CHECK(RemoteChatClient(flaky, "m", 2).send({{"user", "x"}}).content == "tray_red");
  CHECK(flaky->calls == 2);

  auto down = std::make_shared<ScriptedTransport>(std::vector<std::string>{"tray_red"}, 10);
  try {
    RemoteChatClient(down, "m", 3).send({{"user", "x"}});
    FAIL("expected a remote error");
  } catch (const RemoteError& e) {
    CHECK(e.attempts() == 3);
  }
}

TEST_CASE("chat protocol encoding and decoding") {
  const auto body = nlohmann::json::parse(encode_chat_request({"m", {{"user", "hi"}}, 0.0}));
  CHECK(body["model"] == "m");
  CHECK(body["messages"][0]["role"] == "user");
  CHECK(body["temperature"] == 0.0);
  const ChatResponse r = decode_chat_response(
      R"({"choices":[{"message":{"role":"assistant","content":"tray_red"}}],"usage":{"prompt_tokens":362,"completion_tokens":5}})");
  CHECK(r.content == "tray_red");
  CHECK(r.prompt_tokens + r.completion_tokens == 367);
  CHECK_THROWS_AS(decode_chat_response("{}"), RemoteError);
  CHECK_THROWS_AS(decode_chat_response("not json"), RemoteError);
}

TEST_CASE("http transport talks to a chat-completions endpoint") {
  httplib::Server server;
  std::string auth;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    auth = req.get_header_value("Authorization");
    const auto body = nlohmann::json::parse(req.body);
    const std::string echo = body["messages"].back()["content"];
    res.set_content(nlohmann::json{{"choices", {{{"message", {{"content", "echo " + echo}}}}}},
                                   {"usage", {{"prompt_tokens", 362}, {"completion_tokens", 5}}}}
                        .dump(),
                    "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  ::setenv("PLACEPLAN_TEST_KEY", "sekret", 1);
  RemoteChatConfig cfg;
  cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  cfg.api_key_env = "PLACEPLAN_TEST_KEY";
  cfg.timeout_seconds = 5;
  HttpChatTransport transport(cfg);
  const ChatResponse r = transport.complete({"m", {{"user", "tray_blue"}}, 0.0});
  CHECK(r.content == "echo tray_blue");
  CHECK(r.prompt_tokens == 362);
  CHECK(auth == "Bearer sekret");

  RemoteChatConfig missing = cfg;
  missing.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/nope";
  CHECK_THROWS_AS(HttpChatTransport(missing).complete({"m", {{"user", "x"}}, 0.0}), RemoteError);

  server.stop();
  t.join();
  CHECK_THROWS_AS(transport.complete({"m", {{"user", "x"}}, 0.0}), RemoteError);
}

TEST_CASE("receptacle rewards mark stable points within the radius") {
  const SceneSummary s = trays();
  StableSet stable;
  // tray_green spans x in [-0.1, 0.1], y in [-0.075, 0.075], z in [0.4, 0.44].
  stable.entries = {{Vec3(0, 0, 0.43), 0, 0},
                    {Vec3(0.1999, 0, 0.43), 0, 0},
                    {Vec3(0.2001, 0, 0.43), 0, 0},
                    {Vec3(0.1, 0.175, 0.5), 0, 0}};
  ReceptacleDecision d;
  d.receptacle_ids = {"tray_green"};
  const ReceptacleSet r = receptacle_points(stable, d, s, 0.1);
  REQUIRE(r.entries.size() == 4);
  CHECK(r.entries[0].reward == 1);
  CHECK(r.entries[1].reward == 1);
  CHECK(r.entries[2].reward == 0);
  // Diagonal distance sqrt(0.1^2 + 0.06^2) exceeds the radius.
  CHECK(r.entries[3].reward == 0);
  d.receptacle_ids = {"tray_purple"};
  CHECK_THROWS_AS(receptacle_points(stable, d, s), ContractViolation);
  CHECK_THROWS_AS(receptacle_points(stable, {}, s, 0.0), ContractViolation);
}
