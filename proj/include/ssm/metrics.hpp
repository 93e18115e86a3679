#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ssm/embedding.hpp"
#include "ssm/relation.hpp"

namespace ssm::eval {

/// Reference and candidate labels aligned by example id.
struct LabelPairing {
  std::vector<std::string> ids;
  std::vector<RelationState> reference;
  std::vector<RelationState> candidate;

  void add(std::string id, RelationState ref, RelationState cand);
  std::size_t size() const { return reference.size(); }
};

/// (p_o - p_e) / (1 - p_e) with p_e from the product of the two marginals.
/// Returns 1.0 when p_e = 1 (both sides constant and equal).
double cohens_kappa(const LabelPairing& pairing);

/// n items rated by the same number of raters; categories are free strings.
struct RatingMatrix {
  std::vector<std::string> items;
  std::vector<std::vector<std::string>> ratings;  // ratings[item][rater]

  std::size_t raters() const { return ratings.empty() ? 0 : ratings.front().size(); }
};

/// CSV with a header row: item id column followed by one column per rater.
RatingMatrix parse_rating_csv(std::string_view text, const std::string& source = "ratings");

/// Fleiss' kappa. Returns 1.0 (with a warning) when a single category is
/// used throughout, where the chance agreement is 1.
double fleiss_kappa(const RatingMatrix& matrix);

struct ClassMetrics {
  /// Unset when the class occurs on neither side.
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  std::size_t support = 0;  // reference count
};

struct LabelMetrics {
  std::array<ClassMetrics, 3> per_class;
  double accuracy = 0.0;
  /// Unweighted mean F1 over classes present on at least one side.
  double macro_f1 = 0.0;
  std::size_t n = 0;
};

/// Precision of a class with no candidate predictions (or recall of a class
/// absent from the reference) is 0 when the class occurs on the other side.
LabelMetrics label_metrics(const LabelPairing& pairing);

/// Lowercased whitespace tokens with leading/trailing punctuation removed;
/// tokens that are pure punctuation are dropped.
std::vector<std::string> text_tokens(std::string_view text);

/// Cosine of the summed word vectors; 0 when either sum is the zero vector.
double cosine_similarity(std::string_view a, std::string_view b, const corpus::EmbeddingTable& table);

/// |A n B| / |A u B| over token sets; 1 when both are empty.
double jaccard_similarity(std::string_view a, std::string_view b);

}  // namespace ssm::eval
