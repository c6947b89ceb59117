#include "newsgate/oracle.hpp"

#include "newsgate/classifier.hpp"
#include "newsgate/participants.hpp"
#include "newsgate/random.hpp"
#include "newsgate/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>

namespace newsgate::oracle {

long double reporter_rating(long double lambda, long double credibility) { return credibility * lambda; }

long double analyzer_rating(const std::vector<std::pair<long double, long double>>& panel) {
  long double sum = 0.0L;
  for (auto it = panel.rbegin(); it != panel.rend(); ++it) sum += it->first * it->second;
  return sum / static_cast<long double>(panel.size());
}

long double validator_belief(std::uint64_t believers, std::uint64_t validators) {
  return 5.0L * static_cast<long double>(believers) / static_cast<long double>(validators);
}

long double total_score(long double r, long double a, long double v, long double w1, long double w2,
                        long double w3) {
  const long double s = (w1 * r) * 0.2L + (w2 * a) * 0.2L + (w3 * v) * 0.2L;
  return std::clamp(s, 0.0L, 1.0L);
}

long double reporter_credibility(long double credibility, long double theta, std::uint64_t fakes,
                                 std::uint64_t genuine, long double growth) {
  if (fakes == 0) return std::clamp(1.0L - (1.0L - growth) * (1.0L - credibility), 0.0L, 1.0L);
  if (credibility == 0.0L) return 0.0L;
  const long double g = genuine == 0 ? 1.0L : static_cast<long double>(genuine);
  return std::clamp(1.0L / (1.0L + theta * static_cast<long double>(fakes) / (g * credibility)), 0.0L, 1.0L);
}

long double analyzer_credibility(std::uint64_t tp, std::uint64_t tn, std::uint64_t fp,
                                 std::uint64_t fn, const std::vector<long double>& history) {
  const long double correct = static_cast<long double>(tp + tn);
  const long double total = correct + static_cast<long double>(fp + fn);
  long double weighted = 0.0L;
  for (const long double h : history) weighted += h * correct;
  return std::clamp(weighted / (total * static_cast<long double>(history.size())), 0.0L, 1.0L);
}

}  // namespace newsgate::oracle

namespace newsgate {

namespace {

class Checker {
 public:
  Checker(std::string name, double tolerance) : tol_(tolerance) { result_.name = std::move(name); }

  void compare(double actual, long double expected, const char* what) {
    ++result_.cases;
    const double err = static_cast<double>(std::fabs(static_cast<long double>(actual) - expected));
    result_.max_abs_error = std::max(result_.max_abs_error, err);
    if (!(err <= tol_)) {
      if (result_.failures++ == 0) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s: got %.17g, expected %.17Lg", what, actual, expected);
        result_.first_failure = buf;
      }
    }
  }

  void expect(bool ok, const char* what) {
    ++result_.cases;
    if (!ok && result_.failures++ == 0) result_.first_failure = what;
  }

  OracleCheck take() { return std::move(result_); }

 private:
  double tol_;
  OracleCheck result_;
};

ScoringParams with_weights(double w1, double w2) {
  ScoringParams p;
  p.omega1 = w1;
  p.omega2 = w2;
  p.omega3 = 1.0 - w1 - w2;
  return p;
}

}  // namespace

std::vector<OracleCheck> run_formula_oracle_suite(std::uint64_t seed, std::size_t cases, double tolerance) {
  Rng rng(seed);
  auto rating = [&] { return 5.0 * rng.uniform(); };
  auto unit = [&] { return rng.uniform(); };
  std::vector<OracleCheck> out;

  {
    Checker c("reporter_rating", tolerance);
    c.compare(reporter_rating(4.0, 0.5), 2.0L, "worked example");
    c.compare(reporter_rating(5.0, 1.0), 5.0L, "maximum");
    for (std::size_t i = 0; i < cases; ++i) {
      const double l = rating(), d = unit();
      c.compare(reporter_rating(l, d), oracle::reporter_rating(l, d), "random");
    }
    out.push_back(c.take());
  }
  {
    Checker c("analyzer_rating", tolerance);
    const std::vector<RatingRecord> example{{"a", 4.0, 0.5, "x"}, {"b", 2.0, 1.0, "x"}};
    c.compare(analyzer_rating(example), 2.0L, "worked example");
    for (std::size_t i = 0; i < cases; ++i) {
      const auto n = 1 + rng.below(12);
      std::vector<RatingRecord> records;
      std::vector<std::pair<long double, long double>> ref;
      for (std::uint64_t k = 0; k < n; ++k) {
        const double l = rating(), d = unit();
        records.push_back({"p" + std::to_string(k), l, d, "x"});
        ref.emplace_back(d, l);
      }
      c.compare(analyzer_rating(records), oracle::analyzer_rating(ref), "random");
    }
    out.push_back(c.take());
  }
  {
    Checker c("validator_belief", tolerance);
    c.compare(validator_belief(3, 5), 3.0L, "worked example");
    for (std::size_t i = 0; i < cases; ++i) {
      const auto eta = 1 + rng.below(200);
      const auto eta_b = rng.below(eta + 1);
      c.compare(validator_belief(eta_b, eta), oracle::validator_belief(eta_b, eta), "random");
    }
    out.push_back(c.take());
  }
  {
    Checker c("total_score", tolerance);
    c.compare(total_score(2.0, 3.0, 4.0, with_weights(0.2, 0.5)), 0.62L, "worked example");
    c.compare(total_score(5.0, 5.0, 5.0, ScoringParams{}), 1.0L, "maximum");
    c.compare(total_score(0.0, 0.0, 0.0, ScoringParams{}), 0.0L, "minimum");
    for (std::size_t i = 0; i < cases; ++i) {
      const double w1 = unit();
      const double w2 = (1.0 - w1) * unit();
      const auto p = with_weights(w1, w2);
      const double r = rating(), a = rating(), v = rating();
      c.compare(total_score(r, a, v, p), oracle::total_score(r, a, v, p.omega1, p.omega2, p.omega3), "random");
    }
    out.push_back(c.take());
  }
  {
    Checker c("reporter_credibility", tolerance);
    c.compare(reporter_credibility_step(0.5, 1.0, 1, 1), 1.0L / 3.0L, "worked example");
    c.compare(reporter_credibility_step(0.5, 1.0, 0, 1), 0.55L, "growth example");
    c.compare(reporter_credibility_step(0.5, 2.0, 3, 0), 1.0L / 13.0L, "G guard example");
    for (std::size_t i = 0; i < cases; ++i) {
      const double d = unit();
      const double theta = 0.01 + 10.0 * unit();
      const auto f = rng.below(4) == 0 ? 0 : rng.below(50);
      const auto g = rng.below(50);
      c.compare(reporter_credibility_step(d, theta, f, g, kDefaultGrowthRate),
                oracle::reporter_credibility(d, theta, f, g, kDefaultGrowthRate), "random");
    }
    out.push_back(c.take());
  }
  {
    Checker c("analyzer_credibility", tolerance);
    const std::vector<double> h{0.8};
    c.compare(analyzer_credibility_value({3, 2, 1, 0}, h), 2.0L / 3.0L, "worked example");
    for (std::size_t i = 0; i < cases; ++i) {
      ConfusionCounts cc{rng.below(30), rng.below(30), rng.below(30), rng.below(30)};
      if (cc.total() == 0) cc.true_positive = 1;
      const auto n = 1 + rng.below(40);
      std::vector<double> hist;
      std::vector<long double> ref;
      for (std::uint64_t k = 0; k < n; ++k) {
        // Agreement ratios are η_a/η for small η, as in the protocol.
        const auto eta = 1 + rng.below(25);
        const double r = static_cast<double>(rng.below(eta + 1)) / static_cast<double>(eta);
        hist.push_back(r);
        ref.push_back(r);
      }
      c.compare(analyzer_credibility_value(cc, hist),
                oracle::analyzer_credibility(cc.true_positive, cc.true_negative, cc.false_positive,
                                             cc.false_negative, ref),
                "random");
    }
    out.push_back(c.take());
  }
  {
    Checker c("gates", tolerance);
    const ScoringParams p;
    c.expect(gate_after_analysis(3.0, p) == AnalysisGate::ProceedToValidation, "A=3.0 proceeds");
    c.expect(gate_after_analysis(2.4, p) == AnalysisGate::RejectedFakeSuspect, "A=2.4 rejected");
    c.expect(gate_after_analysis(2.5, p) == AnalysisGate::ProceedToValidation, "A=2.5 proceeds");
    c.expect(gate_after_validation(0.62, p) == PublicationGate::Published, "S=0.62 published");
    c.expect(gate_after_validation(0.49, p) == PublicationGate::RejectedFake, "S=0.49 rejected");
    c.expect(gate_after_validation(0.5, p) == PublicationGate::Published, "S=0.5 published");
    for (std::size_t i = 0; i < cases; ++i) {
      ScoringParams q;
      q.gate_analyzer = unit();
      q.gate_total = unit();
      const double a = rating(), s = unit();
      const bool proceed = static_cast<long double>(a) / 5.0L >= static_cast<long double>(q.gate_analyzer);
      const bool publish = s >= q.gate_total;
      c.expect((gate_after_analysis(a, q) == AnalysisGate::ProceedToValidation) == proceed, "analysis gate");
      c.expect((gate_after_validation(s, q) == PublicationGate::Published) == publish, "publication gate");
    }
    out.push_back(c.take());
  }
  return out;
}

double max_gradient_relative_error(std::uint64_t seed, std::size_t pairs) {
  constexpr std::uint32_t kDims = 64;
  constexpr double kStep = 1e-6;
  Rng rng(seed);
  double worst = 0.0;
  auto relative = [](double analytic, double numeric) {
    const double scale = std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
    return std::fabs(analytic - numeric) / scale;
  };
  for (std::size_t n = 0; n < pairs; ++n) {
    std::vector<double> w(kDims + 1);
    for (auto& v : w) v = 4.0 * rng.uniform() - 2.0;
    double bias = 2.0 * rng.uniform() - 1.0;
    FeatureVector x;
    x.dims = kDims;
    std::set<std::uint32_t> used;
    for (std::uint64_t k = 0, m = 1 + rng.below(8); k < m; ++k) used.insert(static_cast<std::uint32_t>(rng.below(kDims)));
    for (const auto i : used) x.terms.emplace_back(i, 2.0 * rng.uniform() - 1.0);
    x.stance = rng.uniform();
    const double y = rng.bernoulli(0.5) ? 1.0 : 0.0;

    const auto grad = logistic_gradient(w, bias, x, y);
    std::vector<double> analytic(kDims + 1, 0.0);
    for (const auto& [i, g] : grad.weights) analytic[i] += g;

    std::vector<std::uint32_t> coords(used.begin(), used.end());
    coords.push_back(kDims);
    for (const auto i : coords) {
      const double saved = w[i];
      w[i] = saved + kStep;
      const double up = logistic_loss(w, bias, x, y);
      w[i] = saved - kStep;
      const double down = logistic_loss(w, bias, x, y);
      w[i] = saved;
      worst = std::max(worst, relative(analytic[i], (up - down) / (2 * kStep)));
    }
    const double up = logistic_loss(w, bias + kStep, x, y);
    const double down = logistic_loss(w, bias - kStep, x, y);
    worst = std::max(worst, relative(grad.bias, (up - down) / (2 * kStep)));
  }
  return worst;
}

}  // namespace newsgate
