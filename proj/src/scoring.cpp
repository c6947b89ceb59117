#include "newsgate/scoring.hpp"

#include "newsgate/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace newsgate {

namespace {

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }
bool in_rating_range(double v) { return std::isfinite(v) && v >= 0.0 && v <= kMaxRating; }

void require_rating(double v, const char* what) {
  if (!in_rating_range(v)) {
    throw ProtocolError(ErrorCode::InvalidRating, std::string(what) + " outside [0,5]");
  }
}

}  // namespace

void ScoringParams::validate() const {
  for (double w : {omega1, omega2, omega3}) {
    if (!std::isfinite(w) || w < 0.0) {
      throw ProtocolError(ErrorCode::InvalidWeights, "weights must be non-negative");
    }
  }
  if (std::abs(omega1 + omega2 + omega3 - 1.0) > 1e-12) {
    throw ProtocolError(ErrorCode::InvalidWeights, "weights must sum to 1");
  }
  if (!std::isfinite(theta) || theta <= 0.0) {
    throw ProtocolError(ErrorCode::NonPositiveTheta, "theta must be positive");
  }
  if (!in_unit(gate_analyzer) || !in_unit(gate_total)) {
    throw ProtocolError(ErrorCode::InvalidConfig, "gate thresholds must lie in [0,1]");
  }
}

void validate_record(const RatingRecord& record) {
  require_rating(record.lambda, "rating");
  if (!in_unit(record.credibility_snapshot)) {
    throw ProtocolError(ErrorCode::InvalidRating, "credibility snapshot outside [0,1]");
  }
}

double reporter_rating(double lambda, double credibility) {
  return reporter_rating(RatingRecord{{}, lambda, credibility, {}});
}

double reporter_rating(const RatingRecord& record) {
  validate_record(record);
  return record.lambda * record.credibility_snapshot;
}

double analyzer_rating(std::span<const RatingRecord> records) {
  if (records.empty()) throw ProtocolError(ErrorCode::EmptyPanel, "analyzer_rating");
  std::vector<double> terms;
  terms.reserve(records.size());
  for (const auto& r : records) {
    validate_record(r);
    terms.push_back(r.credibility_snapshot * r.lambda);
  }
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += t;
  return std::min(kMaxRating, sum / static_cast<double>(records.size()));
}

double validator_belief(std::uint64_t believers, std::uint64_t validators) {
  if (validators == 0) throw ProtocolError(ErrorCode::NoValidators, "validator_belief");
  if (believers > validators) {
    throw ProtocolError(ErrorCode::InvalidRating, "more believers than validators");
  }
  return static_cast<double>(believers) / static_cast<double>(validators) * kMaxRating;
}

double validator_belief(const ValidationTally& tally) {
  return validator_belief(tally.eta_b, tally.eta);
}

double total_score(double reporter, double analyzers, double validators,
                   const ScoringParams& params) {
  params.validate();
  require_rating(reporter, "reporter score");
  require_rating(analyzers, "analyzer score");
  require_rating(validators, "validator score");
  const double s = (reporter * params.omega1 + analyzers * params.omega2 +
                    validators * params.omega3) / kMaxRating;
  // Weights may sum to 1 ± 1e-12; keep the documented range exact.
  return std::clamp(s, 0.0, 1.0);
}

AnalysisGate gate_after_analysis(double analyzer_score, const ScoringParams& params) {
  return analyzer_score / kMaxRating >= params.gate_analyzer ? AnalysisGate::ProceedToValidation
                                                             : AnalysisGate::RejectedFakeSuspect;
}

PublicationGate gate_after_validation(double total, const ScoringParams& params) {
  return total >= params.gate_total ? PublicationGate::Published : PublicationGate::RejectedFake;
}

}  // namespace newsgate
