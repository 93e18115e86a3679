#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "ssm/em.hpp"
#include "ssm/llm_client.hpp"

namespace ssm {

/// Flat `section.key -> value` view of a TOML-style file: `[section]`
/// headers, `key = value` lines, `#` comments, optional double quotes.
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(std::string_view text, const std::string& source = "config");

struct RunPaths {
  std::filesystem::path dataset;     // built dataset; empty = <out>/dataset.jsonl
  std::filesystem::path checkpoint;  // trained model; empty = <out>/model.json
  std::filesystem::path parses;      // CoNLL-U
  std::filesystem::path pairs;       // pairs JSON-lines
  std::filesystem::path embeddings;  // word vectors, text format
  std::filesystem::path lexicons;    // directory; empty = bundled
  std::filesystem::path templates;   // NLE templates; empty = built-in
  std::filesystem::path cache;       // LLM response cache
  std::filesystem::path replay;      // canned LLM responses; empty = HTTP
  std::filesystem::path shots;       // pairs file to draw prompt shots from; empty = pairs
  std::filesystem::path out = "out";
};

struct RunConfig {
  RunPaths paths;
  std::string structure = "large";
  std::uint64_t seed = 1;
  em::EMConfig em;
  llm::EndpointConfig endpoint;
  std::size_t shots_per_class = 2;
  bool cache_only = false;

  /// Reads the file; relative paths are resolved against its directory.
  static RunConfig load(const std::filesystem::path& path);
  static RunConfig from_key_values(const KeyValues& kv, const std::filesystem::path& base_dir = {},
                                   const std::string& source = "config");
  /// Pushes `seed` into the EM and training configs.
  void propagate_seed();
};

}  // namespace ssm
