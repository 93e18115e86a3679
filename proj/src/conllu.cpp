#include "ssm/conllu.hpp"

#include <algorithm>
#include <charconv>
#include <functional>

#include "ssm/util.hpp"

namespace ssm::corpus {

std::size_t ParsedSentence::root() const {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].head == 0) return i;
  }
  throw Error("sentence '" + id + "' has no root");
}

std::vector<std::size_t> ParsedSentence::children(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < tokens.size(); ++j) {
    if (tokens[j].head == static_cast<int>(i) + 1) out.push_back(j);
  }
  return out;
}

std::vector<std::size_t> ParsedSentence::subtree(std::size_t i) const {
  std::vector<std::size_t> out{i};
  for (std::size_t pos = 0; pos < out.size(); ++pos) {
    for (auto c : children(out[pos])) out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void validate(const ParsedSentence& s, const std::string& source) {
  const auto n = static_cast<int>(s.tokens.size());
  const std::string where = s.id.empty() ? std::string("sentence") : "sentence '" + s.id + "'";
  if (n == 0) throw FormatError(source, 0, where + " has no tokens");
  int roots = 0;
  for (const auto& t : s.tokens) {
    if (t.head < 0 || t.head > n) throw FormatError(source, 0, where + ": head index out of range");
    if (t.head == 0) ++roots;
  }
  if (roots != 1) throw FormatError(source, 0, where + " must have exactly one root, found " + std::to_string(roots));
  // every token must reach the root within n steps
  for (int i = 0; i < n; ++i) {
    int cur = i + 1;
    int steps = 0;
    while (cur != 0) {
      cur = s.tokens[static_cast<std::size_t>(cur - 1)].head;
      if (++steps > n) throw FormatError(source, 0, where + ": head graph contains a cycle");
    }
  }
}

namespace {

bool parse_int(std::string_view text, int& out) {
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string comment_value(std::string_view line, std::string_view key) {
  // "# key = value"
  auto body = trim(line.substr(1));
  if (body.substr(0, key.size()) != key) return {};
  body = trim(body.substr(key.size()));
  if (body.empty() || body.front() != '=') return {};
  return std::string(trim(body.substr(1)));
}

}  // namespace

std::vector<ParsedSentence> parse_conllu(std::string_view text, const std::string& source) {
  std::vector<ParsedSentence> out;
  ParsedSentence current;
  bool open = false;

  auto flush = [&] {
    if (open && !current.tokens.empty()) {
      validate(current, source);
      out.push_back(std::move(current));
    }
    current = ParsedSentence{};
    open = false;
  };

  const auto lines = split(text, '\n');
  for (std::size_t n = 0; n < lines.size(); ++n) {
    std::string_view line = lines[n];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::size_t line_no = n + 1;
    if (trim(line).empty()) {
      flush();
      continue;
    }
    open = true;
    if (line.front() == '#') {
      if (auto v = comment_value(line, "sent_id"); !v.empty()) current.id = v;
      if (auto v = comment_value(line, "text"); !v.empty()) current.text = v;
      continue;
    }
    const auto cols = split(line, '\t');
    if (cols.size() != 10) {
      throw FormatError(source, line_no, "expected 10 tab-separated columns, found " + std::to_string(cols.size()));
    }
    if (cols[0].find('-') != std::string::npos || cols[0].find('.') != std::string::npos) continue;
    int id = 0;
    if (!parse_int(cols[0], id) || id != static_cast<int>(current.tokens.size()) + 1) {
      throw FormatError(source, line_no, "token id '" + cols[0] + "' out of sequence");
    }
    Token tok;
    tok.form = cols[1];
    tok.lemma = cols[2];
    tok.upos = cols[3];
    if (!parse_int(cols[6], tok.head)) throw FormatError(source, line_no, "non-numeric head '" + cols[6] + "'");
    tok.deprel = cols[7];
    current.tokens.push_back(std::move(tok));
  }
  flush();
  return out;
}

std::string serialize_conllu(const std::vector<ParsedSentence>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    if (!s.id.empty()) out += "# sent_id = " + s.id + "\n";
    if (!s.text.empty()) out += "# text = " + s.text + "\n";
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      const auto& t = s.tokens[i];
      out += std::to_string(i + 1) + '\t' + t.form + '\t' + t.lemma + '\t' + t.upos + "\t_\t_\t" +
             std::to_string(t.head) + '\t' + t.deprel + "\t_\t_\n";
    }
    out += '\n';
  }
  return out;
}

}  // namespace ssm::corpus
