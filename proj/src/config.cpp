#include "ssm/config.hpp"

#include <charconv>
#include <set>

#include "ssm/util.hpp"

namespace ssm {

KeyValues parse_key_values(std::string_view text, const std::string& source) {
  KeyValues out;
  std::string section;
  const auto lines = split(text, '\n');
  for (std::size_t n = 0; n < lines.size(); ++n) {
    std::string_view line = trim(lines[n]);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw FormatError(source, n + 1, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw FormatError(source, n + 1, "expected key = value");
    const auto key = std::string(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (!value.empty() && value.front() == '"') {
      const auto close = value.find('"', 1);
      if (close == std::string_view::npos) throw FormatError(source, n + 1, "unterminated string");
      value = value.substr(1, close - 1);
    } else if (const auto hash = value.find('#'); hash != std::string_view::npos) {
      value = trim(value.substr(0, hash));
    }
    if (key.empty()) throw FormatError(source, n + 1, "empty key");
    out[section.empty() ? key : section + "." + key] = std::string(value);
  }
  return out;
}

namespace {

class Reader {
 public:
  Reader(const KeyValues& kv, std::string source) : kv_(kv), source_(std::move(source)) {}

  const std::string* raw(const std::string& key) {
    used_.insert(key);
    const auto it = kv_.find(key);
    return it == kv_.end() ? nullptr : &it->second;
  }

  void string(const std::string& key, std::string& out) {
    if (const auto* v = raw(key)) out = *v;
  }

  void path(const std::string& key, std::filesystem::path& out, const std::filesystem::path& base) {
    if (const auto* v = raw(key)) {
      std::filesystem::path p(*v);
      out = (v->empty() || p.is_absolute() || base.empty()) ? p : base / p;
    }
  }

  template <typename T>
  void number(const std::string& key, T& out) {
    const auto* v = raw(key);
    if (!v) return;
    T parsed{};
    const auto* end = v->data() + v->size();
    const auto [ptr, ec] = std::from_chars(v->data(), end, parsed);
    if (ec != std::errc() || ptr != end) throw Error(source_ + ": " + key + ": not a number: '" + *v + "'");
    out = parsed;
  }

  void boolean(const std::string& key, bool& out) {
    const auto* v = raw(key);
    if (!v) return;
    if (*v == "true") out = true;
    else if (*v == "false") out = false;
    else throw Error(source_ + ": " + key + ": expected true or false, got '" + *v + "'");
  }

  void reject_unknown() const {
    for (const auto& [k, v] : kv_) {
      if (!used_.count(k)) throw Error(source_ + ": unknown key '" + k + "'");
    }
  }

 private:
  const KeyValues& kv_;
  std::string source_;
  std::set<std::string> used_;
};

}  // namespace

RunConfig RunConfig::from_key_values(const KeyValues& kv, const std::filesystem::path& base, const std::string& source) {
  RunConfig c;
  Reader r(kv, source);
  r.number("seed", c.seed);
  r.string("structure", c.structure);
  if (c.structure != "large" && c.structure != "small" && !base.empty() && !c.structure.empty() &&
      std::filesystem::path(c.structure).is_relative()) {
    c.structure = (base / c.structure).string();
  }

  r.path("paths.dataset", c.paths.dataset, base);
  r.path("paths.checkpoint", c.paths.checkpoint, base);
  r.path("paths.parses", c.paths.parses, base);
  r.path("paths.pairs", c.paths.pairs, base);
  r.path("paths.embeddings", c.paths.embeddings, base);
  r.path("paths.lexicons", c.paths.lexicons, base);
  r.path("paths.templates", c.paths.templates, base);
  r.path("paths.cache", c.paths.cache, base);
  r.path("paths.replay", c.paths.replay, base);
  r.path("paths.shots", c.paths.shots, base);
  r.path("paths.out", c.paths.out, base);

  r.number("em.samples_per_example", c.em.samples_per_example);
  r.number("em.max_attempts", c.em.max_attempts);
  r.number("em.iterations", c.em.iterations);
  r.number("em.threads", c.em.threads);

  r.number("train.hidden", c.em.train.hidden);
  r.number("train.learning_rate", c.em.train.learning_rate);
  r.number("train.batch_size", c.em.train.batch_size);
  r.number("train.epochs", c.em.train.epochs);
  r.number("train.init_scale", c.em.train.init_scale);
  r.number("train.weight_decay", c.em.train.weight_decay);

  r.string("llm.url", c.endpoint.url);
  r.string("llm.model", c.endpoint.model);
  r.string("llm.api_style", c.endpoint.api_style);
  r.string("llm.api_key_env", c.endpoint.api_key_env);
  r.number("llm.temperature", c.endpoint.temperature);
  r.number("llm.max_tokens", c.endpoint.max_tokens);
  r.number("llm.max_attempts", c.endpoint.max_attempts);
  r.number("llm.backoff_seconds", c.endpoint.backoff_seconds);
  r.number("llm.concurrency", c.endpoint.concurrency);
  r.number("llm.shots_per_class", c.shots_per_class);
  r.boolean("llm.cache_only", c.cache_only);

  r.reject_unknown();
  if (c.endpoint.api_style != "completion" && c.endpoint.api_style != "chat") {
    throw Error(source + ": llm.api_style must be completion or chat");
  }
  c.propagate_seed();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error("config file not found: " + path.string());
  const auto kv = parse_key_values(read_file(path), path.string());
  return from_key_values(kv, path.parent_path(), path.string());
}

void RunConfig::propagate_seed() {
  em.seed = seed;
  em.train.seed = seed;
}

}  // namespace ssm
