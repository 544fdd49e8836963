#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace geollm {

struct Message {
  std::string role;  // "system", "user" or "assistant"
  std::string content;

  bool operator==(const Message&) const = default;
};

struct CompletionRequest {
  std::vector<Message> messages;
  double temperature = 0.0;
  int max_output_tokens = 1024;
};

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual std::string complete(const CompletionRequest& request) = 0;
  virtual std::string id() const = 0;
};

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  // One raw (unnormalized) vector per input, in input order.
  virtual std::vector<std::vector<float>> embed_batch(const std::vector<std::string>& texts) = 0;
  // Stable identifier persisted with an index; a different id means
  // incompatible vectors.
  virtual std::string id() const = 0;
};

// ceil(code points / 4). Heuristic, monotone in length.
std::size_t estimate_tokens(std::string_view text);

// Separates responses in a scripted-backend file.
inline constexpr std::string_view kScriptDelimiter = "%%%";

// Splits a script into responses: blocks between lines that are exactly
// kScriptDelimiter. One leading and trailing newline is dropped from each
// block; a trailing empty block is ignored.
std::vector<std::string> parse_script(std::string_view text);

// Replays canned responses in order regardless of request content.
class ScriptedBackend final : public CompletionBackend {
 public:
  explicit ScriptedBackend(std::vector<std::string> responses, std::string name = "scripted");
  static std::unique_ptr<ScriptedBackend> from_file(const std::filesystem::path& path);

  // Throws ScriptExhaustedError once every response has been served.
  std::string complete(const CompletionRequest& request) override;
  std::string id() const override { return "scripted:" + name_; }

  std::size_t calls() const;
  std::size_t remaining() const;
  // Requests seen so far, for tests that inspect rendered prompts.
  std::vector<CompletionRequest> requests() const;

 private:
  mutable std::mutex mutex_;
  std::vector<std::string> responses_;
  std::vector<CompletionRequest> seen_;
  std::size_t next_ = 0;
  std::string name_;
};

// Deterministic feature-hashed bag of words. Tokens are lower-cased runs of
// letters and digits (bytes >= 0x80 count as letters); common English stop
// words are dropped unless nothing else is left. Each token adds +-1 to the
// bucket picked by its FNV-1a hash. Text without tokens hashes as a whole.
class HashEmbedder final : public EmbeddingBackend {
 public:
  explicit HashEmbedder(std::size_t dimension = 256);

  std::vector<std::vector<float>> embed_batch(const std::vector<std::string>& texts) override;
  std::vector<float> embed_one(std::string_view text) const;
  std::string id() const override;
  std::size_t dimension() const { return dimension_; }

 private:
  std::size_t dimension_;
};

struct RetryPolicy {
  int max_attempts = 3;  // total attempts, including the first
  std::chrono::milliseconds backoff{250};
};

struct BackendConfig {
  std::string endpoint = "https://api.openai.com/v1";
  // Name of the environment variable holding the credential; the value itself
  // is read at request time and never stored in the config.
  std::string api_key_env = "OPENAI_API_KEY";
  std::string model = "gpt-3.5-turbo";
  std::string embedding_model = "text-embedding-ada-002";
  std::chrono::seconds timeout{60};
  RetryPolicy retry;
  int max_in_flight = 4;

  nlohmann::json to_json() const;
  static BackendConfig from_json(const nlohmann::json& j);
  static BackendConfig load(const std::filesystem::path& path);
};

// Wire shapes of the chat-completions and embeddings endpoints.
nlohmann::json chat_request_body(const CompletionRequest& request, const std::string& model);
std::string parse_chat_response(const nlohmann::json& body);
nlohmann::json embeddings_request_body(const std::vector<std::string>& texts,
                                       const std::string& model);
std::vector<std::vector<float>> parse_embeddings_response(const nlohmann::json& body,
                                                          std::size_t expected);

// Client for OpenAI-compatible services. Transport failures and 429/5xx
// responses are retried up to RetryPolicy::max_attempts; other statuses fail
// immediately with the status and a body excerpt.
class HttpBackend final : public CompletionBackend, public EmbeddingBackend {
 public:
  explicit HttpBackend(BackendConfig config);
  ~HttpBackend() override;

  std::string complete(const CompletionRequest& request) override;
  std::vector<std::vector<float>> embed_batch(const std::vector<std::string>& texts) override;
  std::string id() const override { return "http:" + config_.model; }
  std::string embedding_id() const { return "http:" + config_.embedding_model; }

  const BackendConfig& config() const { return config_; }

 private:
  nlohmann::json post(const std::string& path, const nlohmann::json& body);

  BackendConfig config_;
  std::counting_semaphore<1024> in_flight_;
};

// Exposes HttpBackend's embedding side under its embedding model id.
class HttpEmbedder final : public EmbeddingBackend {
 public:
  explicit HttpEmbedder(std::shared_ptr<HttpBackend> backend) : backend_(std::move(backend)) {}
  std::vector<std::vector<float>> embed_batch(const std::vector<std::string>& texts) override {
    return backend_->embed_batch(texts);
  }
  std::string id() const override { return backend_->embedding_id(); }

 private:
  std::shared_ptr<HttpBackend> backend_;
};

}  // namespace geollm
