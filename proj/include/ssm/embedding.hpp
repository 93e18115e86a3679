#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ssm/subphrase.hpp"

namespace ssm::corpus {

/// Read-only word vector table. All vectors have length `dim`.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  /// Returns false (and overwrites) when `word` was already present.
  bool insert(std::string word, Eigen::VectorXd vector);
  const Eigen::VectorXd* find(std::string_view word) const;

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, Eigen::VectorXd> entries_;
};

/// word2vec text format: `word v1 ... vdim` per line. An optional
/// "<count> <dim>" header line is accepted. Duplicate words: last wins.
EmbeddingTable load_embedding_table(const std::filesystem::path& path);
EmbeddingTable parse_embedding_table(std::string_view text, const std::string& source = "embeddings");

struct EmbeddedPhrase {
  Eigen::VectorXd vector;
  std::size_t hits = 0;  // tokens found in the table
  bool all_oov() const { return hits == 0; }
};

/// Sum of the token vectors; missing tokens contribute zero.
EmbeddedPhrase embed_subphrase(std::span<const std::string> words, const EmbeddingTable& table);
/// Same, looking each token up by lowercased form first, then by lemma.
EmbeddedPhrase embed_subphrase(std::span<const WordToken> tokens, const EmbeddingTable& table);

}  // namespace ssm::corpus
