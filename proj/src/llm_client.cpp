#include "ssm/llm_client.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <thread>

namespace ssm::llm {

using nlohmann::json;

// -- hashing ---------------------------------------------------------------

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string cache_key(const EndpointConfig& config, std::string_view prompt) {
  const json params = {{"model", config.model},
                       {"api_style", config.api_style},
                       {"temperature", config.temperature},
                       {"max_tokens", config.max_tokens}};
  std::string material = params.dump();
  material += '\n';
  material += prompt;
  return sha256_hex(material);
}

// -- records and cache -----------------------------------------------------

std::string LLMResponseRecord::to_json() const {
  json j = {{"key", key}, {"prompt_hash", prompt_hash}, {"model", model}, {"raw", raw}, {"timestamp", timestamp}};
  j["label"] = label ? json(std::string(to_string(*label))) : json(nullptr);
  j["nle"] = nle ? json(*nle) : json(nullptr);
  return j.dump();
}

LLMResponseRecord LLMResponseRecord::from_json(std::string_view line) {
  const auto j = json::parse(line);
  LLMResponseRecord r;
  r.key = j.at("key").get<std::string>();
  r.prompt_hash = j.value("prompt_hash", std::string());
  r.model = j.value("model", std::string());
  r.raw = j.at("raw").get<std::string>();
  r.timestamp = j.value("timestamp", std::string());
  if (j.contains("label") && j["label"].is_string()) r.label = parse_relation(j["label"].get<std::string>());
  if (j.contains("nle") && j["nle"].is_string()) r.nle = j["nle"].get<std::string>();
  return r;
}

ResponseCache::ResponseCache(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.empty() || !std::filesystem::exists(path_)) return;
  const auto lines = read_lines(path_);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (trim(lines[n]).empty()) continue;
    try {
      auto r = LLMResponseRecord::from_json(lines[n]);
      records_.emplace(r.key, std::move(r));
    } catch (const json::exception& e) {
      throw FormatError(path_.string(), n + 1, e.what());
    }
  }
}

std::optional<LLMResponseRecord> ResponseCache::find(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = records_.find(key);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::put(const LLMResponseRecord& record) {
  std::lock_guard lock(mutex_);
  if (!records_.emplace(record.key, record).second) return;
  if (path_.empty()) return;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::app);
  if (!out) throw Error("cannot append to cache " + path_.string());
  out << record.to_json() << '\n';
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

void RequestLog::write(const std::string& json_line) {
  std::lock_guard lock(mutex_);
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::app);
  out << json_line << '\n';
}

// -- transports ------------------------------------------------------------

HttpResponse HttpTransport::post(const std::string& url, const std::string& body, const Headers& headers) {
  // split "scheme://host[:port]/path"
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw NetworkError("malformed endpoint URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string origin = url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(origin);
  const auto secs = static_cast<time_t>(timeout_seconds_);
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  auto res = client.Post(path, h, body, "application/json");
  if (!res) throw NetworkError("request to " + url + " failed: " + httplib::to_string(res.error()));
  return {res->status, res->body};
}

ReplayTransport::ReplayTransport(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (trim(lines[n]).empty()) continue;
    try {
      const auto j = json::parse(lines[n]);
      add(j.at("premise").get<std::string>(), j.at("hypothesis").get<std::string>(),
            j.at("response").get<std::string>());
    } catch (const json::exception& e) {
      throw FormatError(path.string(), n + 1, e.what());
    }
  }
}

std::size_t ReplayTransport::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

void ReplayTransport::add(std::string premise, std::string hypothesis, std::string response) {
  responses_[{std::move(premise), std::move(hypothesis)}] = std::move(response);
}

HttpResponse ReplayTransport::post(const std::string&, const std::string& body, const Headers&) {
  {
    std::lock_guard lock(mutex_);
    ++calls_;
  }
  const auto request = json::parse(body);
  std::string prompt;
  const bool chat = request.contains("messages");
  if (chat) {
    prompt = request["messages"].back().at("content").get<std::string>();
  } else {
    prompt = request.at("prompt").get<std::string>();
  }
  const auto p = prompt.rfind("Premise: ");
  const auto h = prompt.find("\nHypothesis: ", p);
  const auto l = prompt.find("\nLabel:", h);
  if (p == std::string::npos || h == std::string::npos || l == std::string::npos) {
    return {400, R"({"error":"prompt has no query block"})"};
  }
  const auto premise = prompt.substr(p + 9, h - p - 9);
  const auto hypothesis = prompt.substr(h + 13, l - h - 13);
  auto it = responses_.find({premise, hypothesis});
  if (it == responses_.end()) return {404, R"({"error":"no canned response"})"};
  json reply;
  if (chat) {
    reply["choices"] = json::array({{{"message", {{"role", "assistant"}, {"content", it->second}}}}});
  } else {
    reply["choices"] = json::array({{{"text", it->second}}});
  }
  return {200, reply.dump()};
}

// -- querying --------------------------------------------------------------

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string request_body(const EndpointConfig& config, const std::string& prompt) {
  json body = {{"model", config.model}, {"temperature", config.temperature}, {"max_tokens", config.max_tokens}};
  if (config.api_style == "chat") {
    body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
  } else {
    body["prompt"] = prompt;
  }
  return body.dump();
}

std::string completion_text(const EndpointConfig& config, const std::string& body) {
  try {
    const auto j = json::parse(body);
    const auto& choice = j.at("choices").at(0);
    if (config.api_style == "chat") return choice.at("message").at("content").get<std::string>();
    return choice.at("text").get<std::string>();
  } catch (const json::exception& e) {
    throw NetworkError(std::string("unexpected response shape: ") + e.what());
  }
}

}  // namespace

LLMResponseRecord query_llm(const EndpointConfig& config, const std::string& prompt, ResponseCache& cache,
                            Transport& transport, const QueryOptions& options) {
  const auto key = cache_key(config, prompt);
  if (auto hit = cache.find(key)) return *hit;
  if (options.cache_only) throw Error("cache-only mode: no cached response for prompt " + sha256_hex(prompt));

  Headers headers;
  if (!config.api_key_env.empty()) {
    const char* credential = std::getenv(config.api_key_env.c_str());
    if (!credential || !*credential) {
      throw Error("environment variable " + config.api_key_env + " (LLM credential) is not set");
    }
    headers.emplace_back("Authorization", std::string("Bearer ") + credential);
  }
  const auto body = request_body(config, prompt);
  const auto sleep = options.sleep ? options.sleep : [](double s) {
    std::this_thread::sleep_for(std::chrono::duration<double>(s));
  };

  std::string failure;
  for (std::size_t attempt = 0; attempt < config.max_attempts; ++attempt) {
    if (attempt > 0) sleep(config.backoff_seconds * std::pow(2.0, static_cast<double>(attempt - 1)));
    HttpResponse res;
    try {
      res = transport.post(config.url, body, headers);
    } catch (const NetworkError& e) {
      failure = e.what();
      continue;
    }
    if (options.log) {
      options.log->write(json{{"key", key}, {"request", json::parse(body)}, {"status", res.status}, {"response", res.body}}
                             .dump());
    }
    if (res.status == 429 || res.status >= 500) {
      failure = "HTTP " + std::to_string(res.status);
      continue;
    }
    if (res.status != 200) throw NetworkError("HTTP " + std::to_string(res.status) + ": " + res.body);

    LLMResponseRecord rec;
    rec.key = key;
    rec.prompt_hash = sha256_hex(prompt);
    rec.model = config.model;
    rec.raw = completion_text(config, res.body);
    rec.timestamp = utc_timestamp();
    try {
      auto parsed = parse_response(rec.raw);
      rec.label = parsed.label;
      rec.nle = parsed.nle;
    } catch (const ParseError&) {
      // kept unparsed; the caller counts it as a failure
    }
    cache.put(rec);
    return rec;
  }
  throw NetworkError("LLM request failed after " + std::to_string(config.max_attempts) + " attempts: " + failure);
}

std::vector<LLMResponseRecord> query_all(const EndpointConfig& config, const std::vector<std::string>& prompts,
                                         ResponseCache& cache, Transport& transport, const QueryOptions& options) {
  std::vector<LLMResponseRecord> out(prompts.size());
  parallel_for(prompts.size(), std::max<std::size_t>(1, config.concurrency),
               [&](std::size_t i) { out[i] = query_llm(config, prompts[i], cache, transport, options); });
  return out;
}

}  // namespace ssm::llm
