#pragma once

#include "newsgate/types.hpp"

#include <cstdint>
#include <map>
#include <span>

namespace newsgate {

inline constexpr double kMaxRating = 5.0;

/// One rating λ given by one actor on one article, with the actor's
/// credibility at the moment of rating.
struct RatingRecord {
  ParticipantId actor_id;
  double lambda = 0.0;
  double credibility_snapshot = 0.0;
  ArticleId article_id;
};

/// Outcome of the validator round for one article.
struct ValidationTally {
  std::uint64_t eta = 0;    // validators who validated
  std::uint64_t eta_b = 0;  // of those, believers
  // analyzer id -> number of validators whose belief matched that analyzer's verdict
  std::map<ParticipantId, std::uint64_t> per_analyzer_agreement;
};

struct ScoringParams {
  double omega1 = 0.1;  // reporter weight
  double omega2 = 0.5;  // analyzer weight
  double omega3 = 0.4;  // validator weight
  double theta = 1.0;   // reporter penalization factor
  double gate_analyzer = 0.5;
  double gate_total = 0.5;

  /// Throws InvalidWeights (weights negative or not summing to 1 within 1e-12)
  /// or NonPositiveTheta / InvalidConfig for the remaining fields.
  void validate() const;
};

enum class AnalysisGate { ProceedToValidation, RejectedFakeSuspect };
enum class PublicationGate { Published, RejectedFake };

/// Throws InvalidRating unless λ ∈ [0,5] and δ ∈ [0,1].
void validate_record(const RatingRecord& record);

/// 𝓡 = λ_r · δ_r
double reporter_rating(const RatingRecord& record);
double reporter_rating(double lambda, double credibility);

/// 𝓐 = (1/n) Σ δ_i · λ_i. Products are summed in sorted order so the result
/// does not depend on panel order. Throws EmptyPanel.
double analyzer_rating(std::span<const RatingRecord> records);

/// 𝓥 = (η_b / η) · 5. Throws NoValidators when η = 0.
double validator_belief(const ValidationTally& tally);
double validator_belief(std::uint64_t believers, std::uint64_t validators);

/// 𝓢_total = (𝓡·ω₁ + 𝓐·ω₂ + 𝓥·ω₃) / 5, in [0,1].
double total_score(double reporter, double analyzers, double validators,
                   const ScoringParams& params);

/// Proceeds iff 𝓐/5 ≥ τ_a. Ties pass.
AnalysisGate gate_after_analysis(double analyzer_score, const ScoringParams& params);

/// Published iff 𝓢_total ≥ τ. Ties pass.
PublicationGate gate_after_validation(double total, const ScoringParams& params);

}  // namespace newsgate
