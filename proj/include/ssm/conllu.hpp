#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ssm::corpus {

struct Token {
  std::string form;
  std::string lemma;
  std::string upos;
  int head = 0;  // 1-based, 0 = root
  std::string deprel;

  bool operator==(const Token&) const = default;
};

/// One dependency tree. `id` comes from a `# sent_id = ...` comment and
/// `text` from `# text = ...`; both may be empty.
struct ParsedSentence {
  std::string id;
  std::string text;
  std::vector<Token> tokens;

  /// 0-based index of the root token.
  std::size_t root() const;
  /// 0-based indices of tokens whose head is token `i` (0-based), in order.
  std::vector<std::size_t> children(std::size_t i) const;
  /// Token `i` and all of its descendants, sorted by position.
  std::vector<std::size_t> subtree(std::size_t i) const;

  bool operator==(const ParsedSentence&) const = default;
};

/// Throws FormatError when the tree is not single-rooted and acyclic.
void validate(const ParsedSentence& sentence, const std::string& source = "conllu");

/// Parses CoNLL-U text. Multiword-token ranges and empty nodes are skipped;
/// every sentence is validated.
std::vector<ParsedSentence> parse_conllu(std::string_view text, const std::string& source = "conllu");

std::string serialize_conllu(const std::vector<ParsedSentence>& sentences);

}  // namespace ssm::corpus
