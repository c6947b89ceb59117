#pragma once

#include "newsgate/classifier.hpp"
#include "newsgate/lifecycle.hpp"
#include "newsgate/random.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace newsgate {

/// Synthetic text generator. Fake articles carry sensational marker words and
/// headlines unrelated to their body; authentic ones carry neutral reporting
/// markers and headlines drawn from the body.
struct CorpusParams {
  std::vector<std::string> fake_markers;
  std::vector<std::string> authentic_markers;
  std::vector<std::string> filler;
  std::uint32_t markers_per_doc = 3;
  std::uint32_t filler_per_doc = 20;
  std::uint32_t title_words = 4;
  double marker_noise = 0.1;  // chance a marker slot draws from the other class

  static CorpusParams defaults();
  /// Throws OverlappingVocabularies or InvalidConfig.
  void validate() const;
};

LabeledDocument generate_document(const CorpusParams& params, Truth truth, Rng& rng);

/// Exactly round(count · fake_fraction) fake documents, in shuffled order.
std::vector<LabeledDocument> generate_corpus(const CorpusParams& params, std::uint32_t count,
                                             double fake_fraction, Rng& rng);

struct ValidatorCohort {
  std::string label;
  std::uint32_t count = 0;
  double believe_authentic = 0.8;
  double believe_fake = 0.2;
};

struct ScenarioConfig {
  std::uint64_t seed = 42;
  std::uint32_t article_count = 500;
  std::uint32_t bootstrap_articles = 50;
  std::uint32_t holdout_articles = 200;

  std::uint32_t honest_reporters = 8;
  std::uint32_t malicious_reporters = 2;
  double p_fake = 0.8;
  double honest_lambda_min = 4.0;
  double honest_lambda_max = 5.0;
  double malicious_lambda = 5.0;

  std::uint32_t journalists = 8;
  std::uint32_t local_analyzers = 12;
  std::uint32_t dl_analyzers = 1;
  std::uint32_t colluding_journalists = 0;
  std::uint32_t colluding_locals = 0;
  double analyzer_accuracy = 0.9;
  double rating_noise = 0.0;  // honest ratings pulled inwards from 0 or 5 by up to this much

  std::vector<ValidatorCohort> validator_cohorts{{"default", 25, 0.8, 0.2}};
  std::uint32_t validator_interests = 0;  // domain tags each validator follows; 0 = all

  std::vector<std::string> areas{"north", "south", "east", "west"};
  std::vector<std::string> domains{"politics", "health", "economy", "science"};

  CorpusParams corpus = CorpusParams::defaults();
  ScoringParams scoring;
  PanelSpec panel;
  ClassifierConfig classifier;
  std::uint32_t resolution_delay = 10;
  std::uint32_t max_validators = 25;
  std::uint32_t retrain_interval = 100;

  /// Throws InvalidConfig (or the scoring/panel/corpus errors).
  void validate() const;
};

/// Reads a JSON object; every key is optional and overrides the default.
/// Unknown keys are rejected. Throws InvalidConfig or IoError.
ScenarioConfig parse_config(std::string_view json_text);
ScenarioConfig load_config(const std::filesystem::path& path);

struct ArticleSummary {
  ArticleId article;
  ParticipantId reporter;
  bool malicious_reporter = false;
  Truth truth = Truth::Fake;
  ArticleState decision = ArticleState::RejectedAtAnalysis;  // state before resolution
  double score_a = 0.0;
  std::optional<double> score_total;
  Tick submitted = 0;
  Tick resolved = 0;
};

struct MetricsReport {
  std::uint64_t seed = 0;
  std::uint32_t article_count = 0;
  std::uint32_t bootstrap_articles = 0;
  std::uint32_t fake_articles = 0;
  std::uint32_t authentic_articles = 0;
  double fake_published_rate = 0.0;
  double authentic_rejected_rate = 0.0;
  std::uint32_t published = 0;
  std::uint32_t rejected_at_analysis = 0;
  std::uint32_t rejected_fake = 0;
  std::uint32_t resolved = 0;
  std::map<std::string, double> mean_final_credibility;  // cohort -> mean δ
  double classifier_heldout_accuracy = 0.0;
  double classifier_training_loss = 0.0;
  std::uint32_t classifier_trainings = 0;
  std::uint64_t ledger_blocks = 0;
  std::uint64_t ledger_transactions = 0;
  std::string ledger_tip_hash;
  std::vector<ArticleSummary> articles;

  /// Reals rounded to 12 significant digits.
  std::string to_json() const;
};

struct ScenarioResult {
  MetricsReport metrics;
  std::string ledger_jsonl;
  std::string trajectories_csv;
  std::map<ArticleId, ParticipantId> reporter_of;  // every article, bootstrap included
  Digest tip_hash{};
};

/// Bootstrap phase (articles analysed without the machine analyzer and
/// resolved at once), classifier training on the resolved history, then
/// article_count articles through the full lifecycle with delayed resolution.
ScenarioResult run_scenario(const ScenarioConfig& config);

/// Writes metrics.json, trajectories.csv and ledger.jsonl into `dir`, each via
/// a temporary file and rename. Throws IoError.
void write_outputs(const ScenarioResult& result, const std::filesystem::path& dir);

/// Number of transactions that mention an article's reporter before that
/// article's publication decision (or, for articles stopped at analysis,
/// up to and including the analyzer gate). Matches on the serialized
/// transaction text.
std::size_t count_identity_leaks(const Ledger& ledger,
                                 const std::map<ArticleId, ParticipantId>& reporter_of);

}  // namespace newsgate
