#include "ssm/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include "ssm/util.hpp"

namespace ssm::eval {

void LabelPairing::add(std::string id, RelationState ref, RelationState cand) {
  ids.push_back(std::move(id));
  reference.push_back(ref);
  candidate.push_back(cand);
}

namespace {

void require_non_empty(const LabelPairing& p) {
  if (p.reference.empty()) throw Error("label pairing is empty");
  if (p.reference.size() != p.candidate.size()) throw Error("label pairing has unequal lengths");
}

}  // namespace

double cohens_kappa(const LabelPairing& p) {
  require_non_empty(p);
  const auto n = static_cast<double>(p.size());
  std::array<double, 3> ref_count{};
  std::array<double, 3> cand_count{};
  double agree = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    ref_count[index(p.reference[i])] += 1.0;
    cand_count[index(p.candidate[i])] += 1.0;
    if (p.reference[i] == p.candidate[i]) agree += 1.0;
  }
  const double p_o = agree / n;
  double p_e = 0.0;
  for (std::size_t c = 0; c < 3; ++c) p_e += ref_count[c] * cand_count[c];
  p_e /= n * n;
  if (p_e >= 1.0) return 1.0;
  return (p_o - p_e) / (1.0 - p_e);
}

RatingMatrix parse_rating_csv(std::string_view text, const std::string& source) {
  RatingMatrix m;
  const auto lines = split(text, '\n');
  bool header = true;
  std::size_t width = 0;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto line = trim(lines[n]);
    if (line.empty()) continue;
    auto cells = split(line, ',');
    for (auto& c : cells) c = std::string(trim(c));
    if (header) {
      if (cells.size() < 3) throw FormatError(source, n + 1, "need an item column and at least two rater columns");
      width = cells.size();
      header = false;
      continue;
    }
    if (cells.size() != width) throw FormatError(source, n + 1, "row has " + std::to_string(cells.size()) + " cells, expected " + std::to_string(width));
    for (std::size_t i = 1; i < cells.size(); ++i) {
      if (cells[i].empty()) throw FormatError(source, n + 1, "missing rating");
    }
    m.items.push_back(cells[0]);
    m.ratings.emplace_back(cells.begin() + 1, cells.end());
  }
  if (m.items.empty()) throw FormatError(source, 0, "no rated items");
  return m;
}

double fleiss_kappa(const RatingMatrix& m) {
  if (m.ratings.empty()) throw Error("rating matrix is empty");
  const std::size_t r = m.raters();
  if (r < 2) throw Error("Fleiss' kappa needs at least two raters");
  std::map<std::string, double> category_totals;
  double mean_agreement = 0.0;
  for (const auto& row : m.ratings) {
    if (row.size() != r) throw Error("every item must be rated by all raters");
    std::map<std::string, double> counts;
    for (const auto& c : row) counts[c] += 1.0;
    double pairs = 0.0;
    for (const auto& [c, k] : counts) {
      pairs += k * (k - 1.0);
      category_totals[c] += k;
    }
    mean_agreement += pairs / (static_cast<double>(r) * static_cast<double>(r - 1));
  }
  const auto n = static_cast<double>(m.ratings.size());
  mean_agreement /= n;
  double chance = 0.0;
  for (const auto& [c, total] : category_totals) {
    const double p = total / (n * static_cast<double>(r));
    chance += p * p;
  }
  if (chance >= 1.0) {
    log_warn("Fleiss' kappa: a single category was used for every rating; reporting 1.0");
    return 1.0;
  }
  return (mean_agreement - chance) / (1.0 - chance);
}

LabelMetrics label_metrics(const LabelPairing& p) {
  require_non_empty(p);
  LabelMetrics out;
  out.n = p.size();
  std::array<std::size_t, 3> tp{};
  std::array<std::size_t, 3> predicted{};
  std::array<std::size_t, 3> actual{};
  std::size_t agree = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto r = index(p.reference[i]);
    const auto c = index(p.candidate[i]);
    ++actual[r];
    ++predicted[c];
    if (r == c) {
      ++tp[r];
      ++agree;
    }
  }
  out.accuracy = static_cast<double>(agree) / static_cast<double>(p.size());
  double f1_sum = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    auto& m = out.per_class[c];
    m.support = actual[c];
    if (actual[c] == 0 && predicted[c] == 0) continue;
    const double precision = predicted[c] ? static_cast<double>(tp[c]) / static_cast<double>(predicted[c]) : 0.0;
    const double recall = actual[c] ? static_cast<double>(tp[c]) / static_cast<double>(actual[c]) : 0.0;
    m.precision = precision;
    m.recall = recall;
    m.f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    f1_sum += *m.f1;
    ++present;
  }
  out.macro_f1 = present ? f1_sum / static_cast<double>(present) : 0.0;
  return out;
}

std::vector<std::string> text_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (auto& word : split_whitespace(text)) {
    std::string_view w = word;
    while (!w.empty() && std::ispunct(static_cast<unsigned char>(w.front()))) w.remove_prefix(1);
    while (!w.empty() && std::ispunct(static_cast<unsigned char>(w.back()))) w.remove_suffix(1);
    if (!w.empty()) out.push_back(to_lower(w));
  }
  return out;
}

double cosine_similarity(std::string_view a, std::string_view b, const corpus::EmbeddingTable& table) {
  const auto ta = text_tokens(a);
  const auto tb = text_tokens(b);
  const auto va = corpus::embed_subphrase(std::span<const std::string>(ta), table).vector;
  const auto vb = corpus::embed_subphrase(std::span<const std::string>(tb), table).vector;
  const double na = va.norm();
  const double nb = vb.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(va.dot(vb) / (na * nb), -1.0, 1.0);
}

double jaccard_similarity(std::string_view a, std::string_view b) {
  const auto ta = text_tokens(a);
  const auto tb = text_tokens(b);
  const std::set<std::string> sa(ta.begin(), ta.end());
  const std::set<std::string> sb(tb.begin(), tb.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t common = 0;
  for (const auto& w : sa) common += sb.count(w);
  const std::size_t all = sa.size() + sb.size() - common;
  return static_cast<double>(common) / static_cast<double>(all);
}

}  // namespace ssm::eval
