#include "placeplan/chat_client.hpp"

#include <cmath>
#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "placeplan/errors.hpp"

namespace placeplan {

using nlohmann::json;

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

// Splits "scheme://host[:port]/path" into ("scheme://host[:port]", "/path").
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw RemoteError("endpoint '" + url + "' lacks a scheme", 0);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

RemoteChatConfig RemoteChatConfig::from_environment() {
  RemoteChatConfig c;
  c.endpoint = env_or("PLACEPLAN_LLM_ENDPOINT", "https://api.openai.com/v1/chat/completions");
  c.model = env_or("PLACEPLAN_LLM_MODEL", c.model);
  return c;
}

std::string encode_chat_request(const ChatRequest& request) {
  json body;
  body["model"] = request.model;
  body["temperature"] = request.temperature;
  body["messages"] = json::array();
  for (const auto& m : request.messages) {
    body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  }
  return body.dump();
}

ChatResponse decode_chat_response(const std::string& body) {
  try {
    const json doc = json::parse(body);
    ChatResponse r;
    r.content = doc.at("choices").at(0).at("message").at("content").get<std::string>();
    if (doc.contains("usage")) {
      const auto& u = doc.at("usage");
      r.prompt_tokens = u.value("prompt_tokens", 0L);
      r.completion_tokens = u.value("completion_tokens", 0L);
    }
    if (r.prompt_tokens < 0 || r.completion_tokens < 0)
      throw RemoteError("negative token usage in response", 1);
    return r;
  } catch (const json::exception& e) {
    throw RemoteError(std::string("malformed chat response: ") + e.what(), 1);
  }
}

HttpChatTransport::HttpChatTransport(RemoteChatConfig config) : config_(std::move(config)) {
  api_key_ = env_or(config_.api_key_env.c_str(), "");
}

ChatResponse HttpChatTransport::complete(const ChatRequest& request) {
  const auto [base, path] = split_url(config_.endpoint);
  httplib::Client client(base);
  const double secs = config_.timeout_seconds;
  const auto whole = static_cast<time_t>(std::floor(secs));
  const auto micros = static_cast<time_t>((secs - std::floor(secs)) * 1e6);
  client.set_connection_timeout(whole, micros);
  client.set_read_timeout(whole, micros);
  client.set_write_timeout(whole, micros);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto res = client.Post(path, headers, encode_chat_request(request), "application/json");
  if (!res) throw RemoteError("request failed: " + httplib::to_string(res.error()), 1);
  if (res->status / 100 != 2)
    throw RemoteError("endpoint returned HTTP " + std::to_string(res->status), 1);
  return decode_chat_response(res->body);
}

RemoteChatClient::RemoteChatClient(std::shared_ptr<ChatTransport> transport, std::string model,
                                   int max_attempts)
    : transport_(std::move(transport)), model_(std::move(model)), max_attempts_(max_attempts) {
  if (!transport_) throw ContractViolation("chat client needs a transport");
  if (max_attempts_ < 1) throw ValidationError("max_attempts must be at least 1");
}

ChatResponse RemoteChatClient::send(const std::vector<ChatMessage>& messages) const {
  ChatRequest request{model_, messages, 0.0};
  std::string last;
  for (int attempt = 1; attempt <= max_attempts_; ++attempt) {
    try {
      return transport_->complete(request);
    } catch (const std::exception& e) {
      last = e.what();
    }
  }
  throw RemoteError("remote reasoner failed after " + std::to_string(max_attempts_) +
                        " attempt(s): " + last,
                    max_attempts_);
}

}  // namespace placeplan
