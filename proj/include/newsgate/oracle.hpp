#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace newsgate::oracle {

// Reference evaluators for the scoring and credibility formulas, written
// separately from the production code in long double and, where possible,
// in a different algebraic form.

long double reporter_rating(long double lambda, long double credibility);
/// (credibility, lambda) pairs.
long double analyzer_rating(const std::vector<std::pair<long double, long double>>& panel);
long double validator_belief(std::uint64_t believers, std::uint64_t validators);
long double total_score(long double r, long double a, long double v, long double w1, long double w2,
                        long double w3);
long double reporter_credibility(long double credibility, long double theta, std::uint64_t fakes,
                                 std::uint64_t genuine, long double growth);
long double analyzer_credibility(std::uint64_t tp, std::uint64_t tn, std::uint64_t fp,
                                 std::uint64_t fn, const std::vector<long double>& history);

}  // namespace newsgate::oracle

namespace newsgate {

struct OracleCheck {
  std::string name;
  std::size_t cases = 0;
  double max_abs_error = 0.0;
  std::size_t failures = 0;
  std::string first_failure;

  bool passed() const { return failures == 0; }
};

/// Largest relative error between logistic_gradient and central finite
/// differences of logistic_loss over `pairs` random (weights, example) pairs.
double max_gradient_relative_error(std::uint64_t seed, std::size_t pairs);

/// Compares each production formula with its reference on `cases` seeded
/// random valid inputs plus the hand-worked examples. One entry per formula,
/// then one for the two gates.
std::vector<OracleCheck> run_formula_oracle_suite(std::uint64_t seed, std::size_t cases,
                                                  double tolerance);

}  // namespace newsgate
