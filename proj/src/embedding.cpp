#include "ssm/embedding.hpp"

#include <charconv>
#include <stdexcept>

#include "ssm/util.hpp"

namespace ssm::corpus {

bool EmbeddingTable::insert(std::string word, Eigen::VectorXd vector) {
  if (static_cast<std::size_t>(vector.size()) != dim_) {
    throw std::invalid_argument("embedding for '" + word + "' has wrong length");
  }
  auto [it, fresh] = entries_.insert_or_assign(std::move(word), std::move(vector));
  return fresh;
}

const Eigen::VectorXd* EmbeddingTable::find(std::string_view word) const {
  auto it = entries_.find(std::string(word));
  return it == entries_.end() ? nullptr : &it->second;
}

namespace {

bool parse_double(std::string_view text, double& out) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool is_header(const std::vector<std::string>& fields) {
  if (fields.size() != 2) return false;
  for (const auto& f : fields) {
    if (f.empty() || f.find_first_not_of("0123456789") != std::string::npos) return false;
  }
  return true;
}

}  // namespace

EmbeddingTable parse_embedding_table(std::string_view text, const std::string& source) {
  const auto lines = split(text, '\n');
  EmbeddingTable table;
  bool have_dim = false;
  std::size_t duplicates = 0;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto line = trim(lines[n]);
    if (line.empty()) continue;
    const auto fields = split_whitespace(line);
    if (!have_dim && table.size() == 0 && n == 0 && is_header(fields)) continue;
    if (fields.size() < 2) throw FormatError(source, n + 1, "expected a word followed by numbers");
    const std::size_t dim = fields.size() - 1;
    if (!have_dim) {
      table = EmbeddingTable(dim);
      have_dim = true;
    } else if (dim != table.dim()) {
      throw FormatError(source, n + 1,
                        "vector length " + std::to_string(dim) + " does not match " + std::to_string(table.dim()));
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
      if (!parse_double(fields[i + 1], v[static_cast<Eigen::Index>(i)])) {
        throw FormatError(source, n + 1, "not a number: '" + fields[i + 1] + "'");
      }
    }
    if (!table.insert(fields[0], std::move(v))) ++duplicates;
  }
  if (!have_dim) throw FormatError(source, 0, "no entries");
  if (duplicates > 0) {
    log_warn(source + ": " + std::to_string(duplicates) + " duplicate word(s); the last vector wins");
  }
  return table;
}

EmbeddingTable load_embedding_table(const std::filesystem::path& path) {
  return parse_embedding_table(read_file(path), path.string());
}

EmbeddedPhrase embed_subphrase(std::span<const std::string> words, const EmbeddingTable& table) {
  EmbeddedPhrase out{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(table.dim())), 0};
  for (const auto& w : words) {
    if (const auto* v = table.find(to_lower(w))) {
      out.vector += *v;
      ++out.hits;
    }
  }
  return out;
}

EmbeddedPhrase embed_subphrase(std::span<const WordToken> tokens, const EmbeddingTable& table) {
  EmbeddedPhrase out{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(table.dim())), 0};
  for (const auto& t : tokens) {
    const auto* v = table.find(t.form);
    if (!v) v = table.find(t.lemma);
    if (v) {
      out.vector += *v;
      ++out.hits;
    }
  }
  return out;
}

}  // namespace ssm::corpus
