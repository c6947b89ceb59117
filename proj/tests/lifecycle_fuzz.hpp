#pragma once

// Random event sequences against the lifecycle engine. Shared by the unit
// tests and the acceptance binary.

#include "newsgate/error.hpp"
#include "newsgate/lifecycle.hpp"

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace newsgate::fuzz {

struct Report {
  std::uint64_t sequences = 0;
  std::uint64_t events = 0;
  std::uint64_t declared_errors = 0;
  std::uint64_t illegal_transitions = 0;
  std::uint64_t undeclared_errors = 0;
  std::uint64_t unchanged_violations = 0;  // failed op changed the ledger or an article
  std::uint64_t ledger_failures = 0;
  std::uint64_t gate_violations = 0;
  std::string first_problem;

  bool ok() const {
    return illegal_transitions == 0 && undeclared_errors == 0 && unchanged_violations == 0 &&
           ledger_failures == 0 && gate_violations == 0;
  }
};

class RandomRatings : public RatingProvider {
 public:
  explicit RandomRatings(Rng& rng) : rng_(rng) {}
  double rate(const Participant&, const ArticleView&) override {
    const auto roll = rng_.below(100);
    if (roll == 0) throw std::runtime_error("provider offline");
    if (roll == 1) return 6.0;
    return roll < 50 ? 5.0 * rng_.uniform() : 5.0 - 0.5 * rng_.uniform();
  }

 private:
  Rng& rng_;
};

class RandomBeliefs : public BeliefProvider {
 public:
  explicit RandomBeliefs(Rng& rng) : rng_(rng) {}
  bool believes(const Participant&, const ArticleView&) override {
    if (rng_.below(200) == 0) throw std::runtime_error("validator offline");
    return rng_.bernoulli(0.6);
  }

 private:
  Rng& rng_;
};

inline bool reachable_in_one_call(ArticleState from, ArticleState to) {
  if (from == to || is_legal_transition(from, to)) return true;
  // run_analysis passes through UnderAnalysis within a single call.
  return is_legal_transition(from, ArticleState::UnderAnalysis) &&
         is_legal_transition(ArticleState::UnderAnalysis, to);
}

inline void note(Report& r, const std::string& what) {
  if (r.first_problem.empty()) r.first_problem = what;
}

inline void run_sequence(std::uint64_t seed, std::size_t length, Report& report) {
  Rng rng(seed);
  EngineConfig cfg;
  cfg.max_validators = 3;
  Engine engine(cfg, seed);
  std::vector<ParticipantSpec> specs{
      {"r1", {Role::Reporter}, {}, {}},
      {"r2", {Role::Reporter, Role::AnalyzerJournalist}, {"x"}, {}},
      {"dl", {Role::AnalyzerDL}, {}, {}},
      {"j1", {Role::AnalyzerJournalist}, {}, {}},
      {"j2", {Role::AnalyzerJournalist}, {}, {}},
      {"j3", {Role::AnalyzerJournalist}, {}, {}},
      {"l1", {Role::AnalyzerLocal}, {"x"}, {}},
      {"l2", {Role::AnalyzerLocal}, {}, {"y"}},
      {"v1", {Role::Validator}, {"x"}, {}},
      {"v2", {Role::Validator}, {}, {"y"}},
      {"v3", {Role::Validator}, {"x"}, {"y"}},
      {"v4", {Role::Validator, Role::Reporter}, {"x"}, {}},
  };
  engine.register_participants(specs, 0);
  RandomRatings ratings(rng);
  RandomBeliefs beliefs(rng);
  const ProviderLookup lookup = [&](const Participant&) -> RatingProvider* {
    return rng.below(150) == 0 ? nullptr : &ratings;
  };
  const std::vector<std::string> reporters{"r1", "r2", "v4", "j1", "ghost"};
  const std::vector<std::string> tags{"x", "y", "z"};

  ++report.sequences;
  for (std::size_t step = 0; step < length; ++step) {
    ++report.events;
    const Tick tick = step + 1;
    std::vector<ArticleState> before;
    for (const auto& a : engine.articles()) before.push_back(a.state);
    const auto tip = engine.ledger().tip_hash();
    const std::size_t n_articles = engine.articles().size();
    // Existing ids most of the time, now and then an unknown one.
    const std::string target =
        n_articles == 0 || rng.below(20) == 0 ? "art-999999"
                                              : engine.articles()[rng.below(n_articles)].id;
    const auto op = rng.below(n_articles == 0 ? 1 : 6);

    std::set<ErrorCode> declared;
    std::string op_name;
    try {
      switch (op) {
        case 0: {
          op_name = "submit";
          declared = {ErrorCode::InvalidRating, ErrorCode::NotAReporter, ErrorCode::UnknownParticipant};
          ArticleTags t;
          t.area.insert(tags[rng.below(3)]);
          if (rng.bernoulli(0.5)) t.domain.insert(tags[rng.below(3)]);
          const double lambda = rng.below(20) == 0 ? -1.0 : 5.0 * rng.uniform();
          engine.submit(reporters[rng.below(reporters.size())], "title", "body", t, lambda, tick);
          break;
        }
        case 1: {
          op_name = "run_analysis";
          declared = {ErrorCode::UnknownArticle, ErrorCode::InvalidState, ErrorCode::ProviderFailure,
                      ErrorCode::InsufficientMachineAnalyzers, ErrorCode::InsufficientJournalists,
                      ErrorCode::InvalidPanelSpec};
          std::optional<PanelSpec> panel;
          const auto roll = rng.below(10);
          if (roll == 0) panel = PanelSpec{2, 1, 0};
          if (roll == 1) panel = PanelSpec{0, 3, 3};
          if (roll == 2) panel = PanelSpec{0, 0, 0};
          engine.run_analysis(target, lookup, tick, panel);
          break;
        }
        case 2:
          op_name = "run_validation";
          declared = {ErrorCode::UnknownArticle, ErrorCode::InvalidState, ErrorCode::NoValidators,
                      ErrorCode::ProviderFailure};
          engine.run_validation(target, beliefs, tick);
          break;
        case 3:
          op_name = "decide_publication";
          declared = {ErrorCode::UnknownArticle, ErrorCode::InvalidState, ErrorCode::CommitmentMismatch};
          if (rng.below(30) == 0 && engine.find_article(target)) engine.corrupt_nonce_for_testing(target);
          engine.decide_publication(target, tick);
          break;
        default:
          op_name = "resolve";
          declared = {ErrorCode::UnknownArticle, ErrorCode::InvalidState, ErrorCode::AlreadyResolved};
          engine.resolve(target, rng.bernoulli(0.5) ? Truth::Fake : Truth::Authentic, tick);
          break;
      }
    } catch (const ProtocolError& e) {
      ++report.declared_errors;
      if (!declared.count(e.code())) {
        ++report.undeclared_errors;
        note(report, op_name + " raised undeclared " + e.what());
      }
      bool changed = engine.ledger().tip_hash() != tip || engine.articles().size() != n_articles;
      for (std::size_t i = 0; i < before.size() && !changed; ++i) {
        changed = engine.articles()[i].state != before[i];
      }
      if (changed) {
        ++report.unchanged_violations;
        note(report, op_name + " failed with " + e.what() + " but changed state");
      }
    } catch (const std::exception& e) {
      ++report.undeclared_errors;
      note(report, op_name + " raised non-protocol exception: " + e.what());
    }

    for (std::size_t i = 0; i < before.size(); ++i) {
      const auto now = engine.articles()[i].state;
      if (!reachable_in_one_call(before[i], now)) {
        ++report.illegal_transitions;
        note(report, std::string(to_string(before[i])) + " -> " + std::string(to_string(now)));
      }
    }
  }

  if (!engine.ledger().verify_chain().ok) {
    ++report.ledger_failures;
    note(report, "ledger failed verification, seed " + std::to_string(seed));
  }
  for (const auto& tx : engine.ledger().query({TxKind::PublicationDecision, std::nullopt, std::nullopt})) {
    const auto& p = std::get<PublicationDecisionPayload>(tx.payload);
    if (p.published != (p.score_total >= cfg.scoring.gate_total)) {
      ++report.gate_violations;
      note(report, "publication decision disagrees with its score");
    }
  }
  for (const auto& tx : engine.ledger().query({TxKind::AnalyzerGate, std::nullopt, std::nullopt})) {
    const auto& p = std::get<AnalyzerGatePayload>(tx.payload);
    if (p.proceed != (p.score_a / 5.0 >= cfg.scoring.gate_analyzer)) {
      ++report.gate_violations;
      note(report, "analyzer gate disagrees with its score");
    }
  }
}

inline Report run(std::uint64_t base_seed, std::size_t sequences, std::size_t length) {
  Report report;
  for (std::size_t i = 0; i < sequences; ++i) run_sequence(Rng::derive(base_seed, i), length, report);
  return report;
}

}  // namespace newsgate::fuzz
