#pragma once

#include "newsgate/ledger.hpp"
#include "newsgate/participants.hpp"
#include "newsgate/random.hpp"
#include "newsgate/scoring.hpp"
#include "newsgate/selection.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace newsgate {

enum class ArticleState {
  Submitted,
  UnderAnalysis,
  RejectedAtAnalysis,
  UnderValidation,
  Published,
  RejectedFake,
  Resolved,
};

std::string_view to_string(ArticleState state);

/// The only edges an article may take:
///   Submitted -> UnderAnalysis -> {RejectedAtAnalysis | UnderValidation}
///   UnderValidation -> {Published | RejectedFake}
///   {RejectedAtAnalysis | Published | RejectedFake} -> Resolved
bool is_legal_transition(ArticleState from, ArticleState to);

struct NewsArticle {
  ArticleId id;
  std::string title;
  std::string body;
  ArticleTags tags;
  Digest commitment{};
  double reporter_lambda = 0.0;
  ArticleState state = ArticleState::Submitted;
  std::vector<ParticipantId> panel;
  std::vector<RatingRecord> ratings;
  std::optional<ValidationTally> tally;
  std::optional<double> score_r;  // filled at the publication decision
  std::optional<double> score_a;
  std::optional<double> score_v;
  std::optional<double> score_total;
  std::optional<Truth> truth;  // known only after resolution
  bool quarantined = false;    // reveal failed
};

struct EngineConfig {
  ScoringParams scoring;
  PanelSpec panel;
  std::uint32_t max_validators = 25;
  double reporter_growth_rate = kDefaultGrowthRate;

  void validate() const;
};

class BeliefProvider {
 public:
  virtual ~BeliefProvider() = default;
  virtual bool believes(const Participant& validator, const ArticleView& article) = 0;
};

struct ResolutionReport {
  ArticleId article;
  Truth truth = Truth::Fake;
  ArticleState decided_state = ArticleState::Published;
  ResolutionOutcome outcome;
};

/// Protocol state machine. Owns the participant registry and the ledger and is
/// their only writer. Each lifecycle transition of one article is sealed as
/// one block. Operations that fail leave the article, the registry and the
/// ledger as they were.
class Engine {
 public:
  Engine(EngineConfig config, std::uint64_t seed, std::vector<Transaction> genesis = {});

  /// Registers a batch of participants in one block.
  std::vector<ParticipantId> register_participants(std::span<const ParticipantSpec> specs, Tick tick);

  /// Stores the article, generates a pseudonym commitment and records only the
  /// commitment, tags and content digest. Throws InvalidRating, NotAReporter,
  /// UnknownParticipant.
  const NewsArticle& submit(const ParticipantId& reporter, std::string title, std::string body,
                            ArticleTags tags, double reporter_lambda, Tick tick);

  /// Selects the panel, collects ratings and applies the analyzer gate.
  /// `panel_override` replaces the configured panel for this article.
  AnalysisGate run_analysis(const ArticleId& id, const ProviderLookup& providers, Tick tick,
                            const std::optional<PanelSpec>& panel_override = std::nullopt);

  /// Collects beliefs from tag-matched validators (at most max_validators,
  /// sampled). Throws NoValidators, ProviderFailure.
  ValidationTally run_validation(const ArticleId& id, BeliefProvider& beliefs, Tick tick);

  /// Computes the total score, applies the final gate and reveals the
  /// reporter. Throws CommitmentMismatch and quarantines the article if the
  /// reveal does not match the commitment.
  PublicationGate decide_publication(const ArticleId& id, Tick tick);

  /// Applies ground truth. Valid from Published, RejectedFake and
  /// RejectedAtAnalysis. Throws AlreadyResolved.
  ResolutionReport resolve(const ArticleId& id, Truth truth, Tick tick);

  const NewsArticle& article(const ArticleId& id) const;
  const NewsArticle* find_article(const ArticleId& id) const;
  /// Submission order; references stay valid as articles are added.
  const std::deque<NewsArticle>& articles() const { return articles_; }

  const Registry& registry() const { return registry_; }
  const Ledger& ledger() const { return ledger_; }
  const EngineConfig& config() const { return config_; }

  /// Reporter behind an article once it has been revealed, else nullopt.
  std::optional<ParticipantId> revealed_reporter(const ArticleId& id) const;

  /// Test hook: replaces the stored nonce so the next reveal fails.
  void corrupt_nonce_for_testing(const ArticleId& id);

 private:
  struct Secret {
    ParticipantId reporter;
    Digest nonce{};
    double reporter_score = 0.0;
    bool revealed = false;
  };

  NewsArticle& mutable_article(const ArticleId& id);
  void require_state(const NewsArticle& a, ArticleState expected, const char* op) const;
  void seal(TxBatch batch);

  EngineConfig config_;
  Rng rng_;
  Registry registry_;
  Ledger ledger_;
  std::deque<NewsArticle> articles_;
  std::map<ArticleId, std::size_t> article_index_;
  std::map<ArticleId, Secret> secrets_;
};

}  // namespace newsgate
