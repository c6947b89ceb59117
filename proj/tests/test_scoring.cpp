#include "newsgate/error.hpp"
#include "newsgate/oracle.hpp"
#include "newsgate/random.hpp"
#include "newsgate/scoring.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace newsgate;

namespace {

RatingRecord rec(double lambda, double credibility, std::string id = "a") {
  return {std::move(id), lambda, credibility, "art"};
}

ScoringParams weights(double w1, double w2, double w3) {
  ScoringParams p;
  p.omega1 = w1;
  p.omega2 = w2;
  p.omega3 = w3;
  return p;
}

template <typename Fn>
void expect_code(ErrorCode code, Fn&& fn) {
  try {
    fn();
    FAIL() << "expected " << to_string(code);
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace

TEST(ReporterRating, WorkedExamples) {
  EXPECT_DOUBLE_EQ(reporter_rating(rec(4.0, 0.5)), 2.0);
  EXPECT_EQ(reporter_rating(rec(0.0, 0.73)), 0.0);
  EXPECT_EQ(reporter_rating(rec(5.0, 1.0)), 5.0);
}

TEST(ReporterRating, RejectsOutOfRangeInputs) {
  expect_code(ErrorCode::InvalidRating, [] { reporter_rating(rec(5.5, 0.5)); });
  expect_code(ErrorCode::InvalidRating, [] { reporter_rating(rec(3.0, 1.2)); });
}

TEST(AnalyzerRating, WorkedExamples) {
  const std::vector<RatingRecord> two{rec(4.0, 0.5), rec(2.0, 1.0)};
  EXPECT_DOUBLE_EQ(analyzer_rating(two), 2.0);
  const std::vector<RatingRecord> one{rec(3.0, 1.0)};
  EXPECT_EQ(analyzer_rating(one), 3.0);
  const std::vector<RatingRecord> zeros{rec(0.0, 0.9), rec(0.0, 0.2)};
  EXPECT_EQ(analyzer_rating(zeros), 0.0);
}

TEST(AnalyzerRating, EmptyPanel) {
  expect_code(ErrorCode::EmptyPanel, [] { analyzer_rating(std::vector<RatingRecord>{}); });
}

TEST(ValidatorBelief, WorkedExamples) {
  EXPECT_DOUBLE_EQ(validator_belief(3, 5), 3.0);
  EXPECT_EQ(validator_belief(7, 7), 5.0);
  EXPECT_EQ(validator_belief(0, 9), 0.0);
  expect_code(ErrorCode::NoValidators, [] { validator_belief(0, 0); });
}

TEST(TotalScore, WorkedExampleAndExtremes) {
  EXPECT_NEAR(total_score(2.0, 3.0, 4.0, weights(0.2, 0.5, 0.3)), 0.62, 1e-15);
  EXPECT_EQ(total_score(5.0, 5.0, 5.0, ScoringParams{}), 1.0);
  EXPECT_EQ(total_score(0.0, 0.0, 0.0, ScoringParams{}), 0.0);
  EXPECT_EQ(total_score(5.0, 5.0, 5.0, weights(1.0, 0.0, 0.0)), 1.0);
  EXPECT_EQ(total_score(5.0, 5.0, 5.0, weights(0.0, 0.0, 1.0)), 1.0);
}

TEST(TotalScore, RejectsBadWeights) {
  expect_code(ErrorCode::InvalidWeights, [] { total_score(1, 1, 1, weights(0.5, 0.5, 0.5)); });
  expect_code(ErrorCode::InvalidWeights, [] { total_score(1, 1, 1, weights(-0.1, 0.6, 0.5)); });
}

TEST(Gates, ExamplesAndTies) {
  const ScoringParams p;
  EXPECT_EQ(gate_after_analysis(3.0, p), AnalysisGate::ProceedToValidation);
  EXPECT_EQ(gate_after_analysis(2.4, p), AnalysisGate::RejectedFakeSuspect);
  EXPECT_EQ(gate_after_analysis(2.5, p), AnalysisGate::ProceedToValidation);
  EXPECT_EQ(gate_after_validation(0.62, p), PublicationGate::Published);
  EXPECT_EQ(gate_after_validation(0.49, p), PublicationGate::RejectedFake);
  EXPECT_EQ(gate_after_validation(0.5, p), PublicationGate::Published);
}

TEST(ScoringProperties, RangeClosureOverRandomInputs) {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const double w1 = rng.uniform(), w2 = (1 - w1) * rng.uniform();
    const auto p = weights(w1, w2, 1 - w1 - w2);
    const double r = reporter_rating(5 * rng.uniform(), rng.uniform());
    std::vector<RatingRecord> panel;
    for (std::uint64_t k = 0, n = 1 + rng.below(8); k < n; ++k) panel.push_back(rec(5 * rng.uniform(), rng.uniform()));
    const double a = analyzer_rating(panel);
    const auto eta = 1 + rng.below(40);
    const double v = validator_belief(rng.below(eta + 1), eta);
    for (double x : {r, a, v}) {
      ASSERT_GE(x, 0.0);
      ASSERT_LE(x, 5.0);
    }
    const double s = total_score(r, a, v, p);
    ASSERT_GE(s, 0.0);
    ASSERT_LE(s, 1.0);
  }
}

TEST(ScoringProperties, AnalyzerRatingIsLinearInCredibility) {
  Rng rng(12);
  for (int i = 0; i < 500; ++i) {
    std::vector<RatingRecord> panel, scaled;
    const double c = rng.uniform();
    for (std::uint64_t k = 0, n = 1 + rng.below(6); k < n; ++k) {
      // Credibilities are powers of two so that c·δ is exact and the
      // comparison can be tight.
      const double d = std::ldexp(1.0, -static_cast<int>(rng.below(4)));
      const double l = 5 * rng.uniform();
      panel.push_back(rec(l, d));
      scaled.push_back(rec(l, c * d));
    }
    EXPECT_NEAR(analyzer_rating(scaled), c * analyzer_rating(panel), 1e-14);
  }
}

TEST(ScoringProperties, AnalyzerRatingIsPermutationInvariant) {
  Rng rng(13);
  for (int i = 0; i < 500; ++i) {
    std::vector<RatingRecord> panel;
    for (std::uint64_t k = 0, n = 2 + rng.below(8); k < n; ++k) {
      panel.push_back(rec(5 * rng.uniform(), rng.uniform(), "p" + std::to_string(k)));
    }
    const double base = analyzer_rating(panel);
    for (int s = 0; s < 5; ++s) {
      rng.shuffle(panel);
      ASSERT_EQ(analyzer_rating(panel), base);
    }
  }
}

TEST(ScoringProperties, RaisingThresholdNeverPublishesMore) {
  Rng rng(14);
  for (int i = 0; i < 2000; ++i) {
    ScoringParams lo, hi;
    lo.gate_total = rng.uniform();
    hi.gate_total = lo.gate_total + (1 - lo.gate_total) * rng.uniform();
    const double s = rng.uniform();
    if (gate_after_validation(s, lo) == PublicationGate::RejectedFake) {
      ASSERT_EQ(gate_after_validation(s, hi), PublicationGate::RejectedFake);
    }
  }
}

TEST(FormulaOracle, AllFormulasAgree) {
  for (const auto& check : run_formula_oracle_suite(20240117, 1000, 1e-12)) {
    EXPECT_TRUE(check.passed()) << check.name << ": " << check.first_failure;
    EXPECT_GE(check.cases, 1000u) << check.name;
  }
}

TEST(FormulaOracle, ReferenceMatchesHandExamples) {
  EXPECT_NEAR(static_cast<double>(oracle::total_score(2, 3, 4, 0.2L, 0.5L, 0.3L)), 0.62, 1e-15);
  EXPECT_NEAR(static_cast<double>(oracle::analyzer_credibility(3, 2, 1, 0, {0.8L})), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(static_cast<double>(oracle::reporter_credibility(0.5L, 2.0L, 3, 0, 0.1L)), 1.0 / 13.0, 1e-15);
}
