#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ssm/prompt.hpp"
#include "ssm/relation.hpp"
#include "ssm/util.hpp"

namespace ssm::llm {

struct EndpointConfig {
  std::string url = "https://api.openai.com/v1/completions";
  std::string model = "gpt-3.5-turbo-instruct";
  std::string api_style = "completion";  // or "chat"
  std::string api_key_env = "OPENAI_API_KEY";  // empty: send no credential
  double temperature = 0.0;
  int max_tokens = 150;
  std::size_t max_attempts = 3;
  double backoff_seconds = 1.0;  // doubled after each failed attempt
  std::size_t concurrency = 4;
};

using Headers = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Something that can POST a JSON body. Failures to connect throw NetworkError.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const std::string& url, const std::string& body, const Headers& headers) = 0;
};

class NetworkError : public Error {
 public:
  using Error::Error;
};

/// cpp-httplib backed transport (http and https).
class HttpTransport : public Transport {
 public:
  explicit HttpTransport(double timeout_seconds = 60.0) : timeout_seconds_(timeout_seconds) {}
  HttpResponse post(const std::string& url, const std::string& body, const Headers& headers) override;

 private:
  double timeout_seconds_;
};

/// Offline transport answering from canned completions keyed by the query's
/// premise and hypothesis (the last "Premise:/Hypothesis:" block of the prompt).
/// Replies in the OpenAI completion (or chat) response shape.
class ReplayTransport : public Transport {
 public:
  ReplayTransport() = default;
  /// JSON-lines with `premise`, `hypothesis`, `response`.
  explicit ReplayTransport(const std::filesystem::path& path);
  void add(std::string premise, std::string hypothesis, std::string response);
  HttpResponse post(const std::string& url, const std::string& body, const Headers& headers) override;
  std::size_t calls() const;

 private:
  std::map<std::pair<std::string, std::string>, std::string> responses_;
  std::size_t calls_ = 0;
  mutable std::mutex mutex_;
};

struct LLMResponseRecord {
  std::string key;          // cache key
  std::string prompt_hash;  // sha256 of the prompt alone
  std::string model;
  std::string raw;
  std::optional<RelationState> label;  // set iff parsing succeeded
  std::optional<std::string> nle;
  std::string timestamp;  // UTC, ISO 8601

  std::string to_json() const;
  static LLMResponseRecord from_json(std::string_view line);
};

std::string sha256_hex(std::string_view data);
/// sha256 over model name, prompt and decoding parameters.
std::string cache_key(const EndpointConfig& config, std::string_view prompt);

/// Append-only JSON-lines cache shared between worker threads. An empty
/// path keeps the cache in memory.
class ResponseCache {
 public:
  ResponseCache() = default;
  explicit ResponseCache(std::filesystem::path path);

  std::optional<LLMResponseRecord> find(const std::string& key) const;
  /// No-op if the key is already present.
  void put(const LLMResponseRecord& record);
  std::size_t size() const;

 private:
  std::filesystem::path path_;
  std::map<std::string, LLMResponseRecord> records_;
  mutable std::mutex mutex_;
};

/// Appends one JSON object per request/response to a file.
class RequestLog {
 public:
  explicit RequestLog(std::filesystem::path path) : path_(std::move(path)) {}
  void write(const std::string& json_line);

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
};

struct QueryOptions {
  bool cache_only = false;
  std::function<void(double)> sleep;  // defaults to std::this_thread::sleep_for
  RequestLog* log = nullptr;
};

/// Cache hit: the stored record, no transport call. Miss: POST the payload,
/// retrying up to config.max_attempts times on connection errors, 429 and
/// 5xx, parse the completion and store the record.
LLMResponseRecord query_llm(const EndpointConfig& config, const std::string& prompt, ResponseCache& cache,
                            Transport& transport, const QueryOptions& options = {});

/// query_llm over many prompts with at most config.concurrency in flight.
/// Results are in prompt order.
std::vector<LLMResponseRecord> query_all(const EndpointConfig& config, const std::vector<std::string>& prompts,
                                         ResponseCache& cache, Transport& transport, const QueryOptions& options = {});

}  // namespace ssm::llm
