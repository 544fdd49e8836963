#include "geollm/llm_backend.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "httplib.h"

#include "geollm/error.hpp"
#include "geollm/text_util.hpp"

namespace geollm {

std::size_t estimate_tokens(std::string_view text) { return (utf8_length(text) + 3) / 4; }

std::vector<std::string> parse_script(std::string_view text) {
  std::vector<std::string> blocks;
  std::string current;
  bool first_line = true;
  const auto finish = [&] {
    if (!current.empty() && current.back() == '\n') current.pop_back();
    if (!current.empty() && current.back() == '\r') current.pop_back();
    blocks.push_back(std::move(current));
    current.clear();
    first_line = true;
  };
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (auto& line : lines) {
    std::string_view view = line;
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (view == kScriptDelimiter) {
      finish();
      continue;
    }
    if (first_line && view.empty() && current.empty()) {
      first_line = false;
      continue;
    }
    first_line = false;
    current += line;
    current += '\n';
  }
  if (!current.empty()) finish();
  return blocks;
}

ScriptedBackend::ScriptedBackend(std::vector<std::string> responses, std::string name)
    : responses_(std::move(responses)), name_(std::move(name)) {}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::filesystem::path& path) {
  return std::make_unique<ScriptedBackend>(parse_script(read_file(path)),
                                           path.filename().string());
}

std::string ScriptedBackend::complete(const CompletionRequest& request) {
  std::lock_guard lock(mutex_);
  seen_.push_back(request);
  if (next_ >= responses_.size()) {
    throw ScriptExhaustedError(fmt::format("scripted backend '{}' exhausted after {} responses",
                                           name_, responses_.size()));
  }
  return responses_[next_++];
}

std::size_t ScriptedBackend::calls() const {
  std::lock_guard lock(mutex_);
  return seen_.size();
}

std::size_t ScriptedBackend::remaining() const {
  std::lock_guard lock(mutex_);
  return responses_.size() - next_;
}

std::vector<CompletionRequest> ScriptedBackend::requests() const {
  std::lock_guard lock(mutex_);
  return seen_;
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

HashEmbedder::HashEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw ValidationError("embedding dimension must be > 0");
}

std::string HashEmbedder::id() const { return fmt::format("hash-bow-{}", dimension_); }

std::vector<float> HashEmbedder::embed_one(std::string_view text) const {
  static const std::set<std::string, std::less<>> kStopWords = {
      "a",    "an",  "and", "are",  "as",   "at",   "be",   "by",    "do",   "does", "for",
      "from", "how", "i",   "in",   "is",   "it",   "its",  "of",    "on",   "or",   "that",
      "the",  "this", "to", "was",  "what", "when", "where", "which", "with", "you"};
  std::vector<std::string> tokens;
  std::string token;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      token += static_cast<char>(std::tolower(c));
    } else if (!token.empty()) {
      tokens.push_back(std::move(token));
      token.clear();
    }
  }
  if (!token.empty()) tokens.push_back(std::move(token));
  const bool has_content = std::any_of(tokens.begin(), tokens.end(),
                                       [](const auto& t) { return !kStopWords.contains(t); });

  std::vector<float> v(dimension_, 0.0f);
  const auto add = [&](std::string_view t) {
    const auto h = fnv1a(t);
    v[h % dimension_] += (h >> 63) ? -1.0f : 1.0f;
  };
  for (const auto& t : tokens) {
    if (!has_content || !kStopWords.contains(t)) add(t);
  }
  if (tokens.empty()) add(text);
  return v;
}

std::vector<std::vector<float>> HashEmbedder::embed_batch(const std::vector<std::string>& texts) {
  std::vector<std::vector<float>> out(texts.size());
  const auto n = static_cast<std::ptrdiff_t>(texts.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = embed_one(texts[static_cast<std::size_t>(i)]);
  }
  return out;
}

nlohmann::json BackendConfig::to_json() const {
  return {
      {"endpoint", endpoint},
      {"api_key_env", api_key_env},
      {"model", model},
      {"embedding_model", embedding_model},
      {"timeout_seconds", timeout.count()},
      {"retry", {{"max_attempts", retry.max_attempts}, {"backoff_ms", retry.backoff.count()}}},
      {"max_in_flight", max_in_flight},
  };
}

BackendConfig BackendConfig::from_json(const nlohmann::json& j) {
  BackendConfig c;
  c.endpoint = j.value("endpoint", c.endpoint);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  c.model = j.value("model", c.model);
  c.embedding_model = j.value("embedding_model", c.embedding_model);
  c.timeout = std::chrono::seconds(j.value("timeout_seconds", c.timeout.count()));
  if (j.contains("retry")) {
    const auto& r = j.at("retry");
    c.retry.max_attempts = r.value("max_attempts", c.retry.max_attempts);
    c.retry.backoff = std::chrono::milliseconds(r.value("backoff_ms", c.retry.backoff.count()));
  }
  c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
  if (c.retry.max_attempts < 1) throw ValidationError("retry.max_attempts must be >= 1");
  if (c.max_in_flight < 1 || c.max_in_flight > 1024) {
    throw ValidationError("max_in_flight must lie in [1, 1024]");
  }
  return c;
}

BackendConfig BackendConfig::load(const std::filesystem::path& path) {
  try {
    return from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("backend config {}: {}", path.string(), e.what()));
  }
}

nlohmann::json chat_request_body(const CompletionRequest& request, const std::string& model) {
  auto messages = nlohmann::json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  return {
      {"model", model},
      {"messages", messages},
      {"temperature", request.temperature},
      {"max_tokens", request.max_output_tokens},
  };
}

std::string parse_chat_response(const nlohmann::json& body) {
  if (!body.contains("choices") || !body["choices"].is_array() || body["choices"].empty()) {
    throw TransportError("chat response carries no choices", 200, 1, false);
  }
  const auto& choice = body["choices"][0];
  if (!choice.contains("message") || !choice["message"].contains("content") ||
      !choice["message"]["content"].is_string()) {
    throw TransportError("chat response choice has no message content", 200, 1, false);
  }
  return choice["message"]["content"].get<std::string>();
}

nlohmann::json embeddings_request_body(const std::vector<std::string>& texts,
                                       const std::string& model) {
  return {{"model", model}, {"input", texts}};
}

std::vector<std::vector<float>> parse_embeddings_response(const nlohmann::json& body,
                                                          std::size_t expected) {
  if (!body.contains("data") || !body["data"].is_array()) {
    throw TransportError("embeddings response carries no data", 200, 1, false);
  }
  std::vector<std::vector<float>> out(expected);
  std::size_t seen = 0;
  for (std::size_t pos = 0; pos < body["data"].size(); ++pos) {
    const auto& item = body["data"][pos];
    const auto index = item.value("index", pos);
    if (index >= expected || !out[index].empty()) {
      throw TransportError("embeddings response has an out-of-range or duplicate index", 200, 1,
                           false);
    }
    out[index] = item.at("embedding").get<std::vector<float>>();
    ++seen;
  }
  if (seen != expected) {
    throw TransportError(fmt::format("expected {} embeddings, got {}", expected, seen), 200, 1,
                         false);
  }
  for (const auto& v : out) {
    if (v.size() != out.front().size() || v.empty()) {
      throw TransportError("embeddings have non-uniform dimension", 200, 1, false);
    }
  }
  return out;
}

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string base_path;
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ValidationError(fmt::format("endpoint '{}' lacks a scheme", url));
  }
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  e.origin = url.substr(0, path_start);
  e.base_path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!e.base_path.empty() && e.base_path.back() == '/') e.base_path.pop_back();
  return e;
}

std::string redact(std::string text, const std::string& secret) {
  if (secret.empty()) return text;
  for (auto pos = text.find(secret); pos != std::string::npos; pos = text.find(secret, pos)) {
    text.replace(pos, secret.size(), "***");
  }
  return text;
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpBackend::HttpBackend(BackendConfig config)
    : config_(std::move(config)), in_flight_(std::max(1, std::min(config_.max_in_flight, 1024))) {
  split_endpoint(config_.endpoint);
}

HttpBackend::~HttpBackend() = default;

nlohmann::json HttpBackend::post(const std::string& path, const nlohmann::json& body) {
  const char* key_value = std::getenv(config_.api_key_env.c_str());
  const std::string key = key_value ? key_value : "";
  const auto endpoint = split_endpoint(config_.endpoint);

  in_flight_.acquire();
  struct Release {
    std::counting_semaphore<1024>& s;
    ~Release() { s.release(); }
  } release{in_flight_};

  httplib::Client client(endpoint.origin);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  httplib::Headers headers;
  if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);

  const auto payload = body.dump();
  int attempt = 0;
  while (true) {
    ++attempt;
    auto result = client.Post(endpoint.base_path + path, headers, payload, "application/json");
    const bool last = attempt >= config_.retry.max_attempts;
    if (!result) {
      if (last) {
        throw TransportError(fmt::format("POST {} failed: {} after {} attempt(s)", path,
                                         httplib::to_string(result.error()), attempt),
                             0, attempt, true);
      }
    } else if (result->status >= 200 && result->status < 300) {
      try {
        return nlohmann::json::parse(result->body);
      } catch (const nlohmann::json::parse_error&) {
        throw TransportError(fmt::format("POST {} returned a non-JSON body", path),
                             result->status, attempt, false);
      }
    } else if (!retryable_status(result->status) || last) {
      const auto excerpt = redact(result->body, key).substr(0, 200);
      throw TransportError(fmt::format("POST {} returned status {}: {}", path, result->status,
                                       excerpt),
                           result->status, attempt, retryable_status(result->status));
    }
    std::this_thread::sleep_for(config_.retry.backoff * attempt);
  }
}

std::string HttpBackend::complete(const CompletionRequest& request) {
  return parse_chat_response(post("/chat/completions", chat_request_body(request, config_.model)));
}

std::vector<std::vector<float>> HttpBackend::embed_batch(const std::vector<std::string>& texts) {
  if (texts.empty()) return {};
  return parse_embeddings_response(
      post("/embeddings", embeddings_request_body(texts, config_.embedding_model)), texts.size());
}

}  // namespace geollm
