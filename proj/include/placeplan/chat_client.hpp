#pragma once

#include <memory>
#include <string>
#include <vector>

namespace placeplan {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
};

struct ChatResponse {
  std::string content;
  long prompt_tokens = 0;
  long completion_tokens = 0;
};

/// One chat-completions round trip. Implementations throw on transport or
/// protocol failure.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

struct RemoteChatConfig {
  /// Full URL of the chat-completions endpoint, e.g. https://host/v1/chat/completions.
  std::string endpoint;
  std::string model = "gpt-3.5-turbo";
  double timeout_seconds = 30.0;
  int max_attempts = 2;
  /// Name of the environment variable holding the bearer credential.
  std::string api_key_env = "PLACEPLAN_LLM_API_KEY";

  /// Defaults overridden by PLACEPLAN_LLM_ENDPOINT and PLACEPLAN_LLM_MODEL.
  static RemoteChatConfig from_environment();
};

/// JSON over HTTP(S). The credential is read from the environment at
/// construction and never stored in config files.
class HttpChatTransport : public ChatTransport {
 public:
  explicit HttpChatTransport(RemoteChatConfig config);
  ChatResponse complete(const ChatRequest& request) override;

 private:
  RemoteChatConfig config_;
  std::string api_key_;
};

/// Encodes a request body and decodes a response body of the
/// chat-completions protocol. Decoding throws RemoteError on malformed input.
std::string encode_chat_request(const ChatRequest& request);
ChatResponse decode_chat_response(const std::string& body);

/// Retrying client shared by concurrent reasoning requests. Each call builds
/// its own request; the transport must tolerate concurrent use.
class RemoteChatClient {
 public:
  RemoteChatClient(std::shared_ptr<ChatTransport> transport, std::string model,
                   int max_attempts = 2);

  /// Throws RemoteError carrying the number of attempts made.
  ChatResponse send(const std::vector<ChatMessage>& messages) const;

  const std::string& model() const { return model_; }

 private:
  std::shared_ptr<ChatTransport> transport_;
  std::string model_;
  int max_attempts_;
};

}  // namespace placeplan
