#include "newsgate/lifecycle.hpp"

#include "newsgate/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace newsgate {

std::string_view to_string(ArticleState state) {
  switch (state) {
    case ArticleState::Submitted: return "Submitted";
    case ArticleState::UnderAnalysis: return "UnderAnalysis";
    case ArticleState::RejectedAtAnalysis: return "RejectedAtAnalysis";
    case ArticleState::UnderValidation: return "UnderValidation";
    case ArticleState::Published: return "Published";
    case ArticleState::RejectedFake: return "RejectedFake";
    case ArticleState::Resolved: return "Resolved";
  }
  return "Unknown";
}

bool is_legal_transition(ArticleState from, ArticleState to) {
  using S = ArticleState;
  switch (from) {
    case S::Submitted: return to == S::UnderAnalysis;
    case S::UnderAnalysis: return to == S::RejectedAtAnalysis || to == S::UnderValidation;
    case S::UnderValidation: return to == S::Published || to == S::RejectedFake;
    case S::RejectedAtAnalysis:
    case S::Published:
    case S::RejectedFake: return to == S::Resolved;
    case S::Resolved: return false;
  }
  return false;
}

void EngineConfig::validate() const {
  scoring.validate();
  panel.validate();
  if (max_validators == 0) throw ProtocolError(ErrorCode::InvalidConfig, "max_validators must be positive");
  if (!std::isfinite(reporter_growth_rate) || reporter_growth_rate < 0.0 || reporter_growth_rate > 1.0) {
    throw ProtocolError(ErrorCode::InvalidConfig, "reporter growth rate must lie in [0,1]");
  }
}

Engine::Engine(EngineConfig config, std::uint64_t seed, std::vector<Transaction> genesis)
    : config_(std::move(config)),
      rng_(seed),
      registry_(config_.reporter_growth_rate),
      ledger_(std::move(genesis)) {
  config_.validate();
}

void Engine::seal(TxBatch batch) {
  if (!batch.empty()) ledger_.append_block(std::move(batch));
}

std::vector<ParticipantId> Engine::register_participants(std::span<const ParticipantSpec> specs,
                                                         Tick tick) {
  // Dry run on a copy so a bad spec leaves the registry untouched.
  Registry trial = registry_;
  TxBatch batch;
  std::vector<ParticipantId> ids;
  for (const auto& spec : specs) ids.push_back(trial.register_participant(spec, tick, batch).id);
  seal(std::move(batch));
  registry_ = std::move(trial);
  return ids;
}

const NewsArticle& Engine::article(const ArticleId& id) const {
  if (const auto* a = find_article(id)) return *a;
  throw ProtocolError(ErrorCode::UnknownArticle, id);
}

const NewsArticle* Engine::find_article(const ArticleId& id) const {
  const auto it = article_index_.find(id);
  return it == article_index_.end() ? nullptr : &articles_[it->second];
}

NewsArticle& Engine::mutable_article(const ArticleId& id) {
  return const_cast<NewsArticle&>(article(id));
}

void Engine::require_state(const NewsArticle& a, ArticleState expected, const char* op) const {
  if (a.state != expected) {
    throw ProtocolError(ErrorCode::InvalidState, std::string(op) + " on " + a.id + " in state " +
                                                     std::string(to_string(a.state)));
  }
}

std::optional<ParticipantId> Engine::revealed_reporter(const ArticleId& id) const {
  const auto it = secrets_.find(id);
  if (it == secrets_.end() || !it->second.revealed) return std::nullopt;
  return it->second.reporter;
}

void Engine::corrupt_nonce_for_testing(const ArticleId& id) {
  article(id);
  secrets_.at(id).nonce[0] ^= 0xff;
}

const NewsArticle& Engine::submit(const ParticipantId& reporter, std::string title,
                                  std::string body, ArticleTags tags, double reporter_lambda,
                                  Tick tick) {
  const Participant& rep = registry_.at(reporter);
  if (!rep.has_role(Role::Reporter)) throw ProtocolError(ErrorCode::NotAReporter, reporter);
  if (!std::isfinite(reporter_lambda) || reporter_lambda < 0.0 || reporter_lambda > kMaxRating) {
    throw ProtocolError(ErrorCode::InvalidRating, "reporter rating outside [0,5]");
  }
  const double reporter_score = reporter_rating(reporter_lambda, rep.credibility);

  NewsArticle a;
  char buf[32];
  std::snprintf(buf, sizeof buf, "art-%06zu", articles_.size());
  a.id = buf;
  a.title = std::move(title);
  a.body = std::move(body);
  for (const auto& t : tags.area) a.tags.area.insert(normalize_tag(t));
  for (const auto& t : tags.domain) a.tags.domain.insert(normalize_tag(t));
  a.reporter_lambda = reporter_lambda;
  const auto pseudonym = make_commitment(reporter, rng_);
  a.commitment = pseudonym.commitment;

  ByteWriter content;
  content.str(a.title);
  content.str(a.body);

  SubmitPayload payload;
  payload.commitment = a.commitment;
  payload.area_tags.assign(a.tags.area.begin(), a.tags.area.end());
  payload.domain_tags.assign(a.tags.domain.begin(), a.tags.domain.end());
  payload.content_digest = sha256(content.data());

  Transaction tx;
  tx.article_id = a.id;
  tx.actor = to_hex(a.commitment);
  tx.timestamp = tick;
  tx.payload = std::move(payload);
  seal({std::move(tx)});

  secrets_[a.id] = Secret{reporter, pseudonym.nonce, reporter_score, false};
  article_index_[a.id] = articles_.size();
  articles_.push_back(std::move(a));
  return articles_.back();
}

AnalysisGate Engine::run_analysis(const ArticleId& id, const ProviderLookup& providers, Tick tick,
                                  const std::optional<PanelSpec>& panel_override) {
  NewsArticle& a = mutable_article(id);
  require_state(a, ArticleState::Submitted, "run_analysis");
  const Secret& secret = secrets_.at(id);

  const auto panel = select_panel(a.tags, registry_, panel_override.value_or(config_.panel), rng_,
                                  secret.reporter);
  const ArticleView view{a.id, a.title, a.body, &a.tags};
  TxBatch batch;
  auto ratings = panel_ratings(panel, registry_, view, providers, tick, batch);
  const double score_a = analyzer_rating(ratings);
  const AnalysisGate gate = gate_after_analysis(score_a, config_.scoring);

  Transaction tx;
  tx.article_id = a.id;
  tx.timestamp = tick;
  tx.payload = AnalyzerGatePayload{score_a, gate == AnalysisGate::ProceedToValidation};
  batch.push_back(std::move(tx));
  seal(std::move(batch));

  a.state = ArticleState::UnderAnalysis;
  a.panel = panel;
  a.ratings = std::move(ratings);
  a.score_a = score_a;
  a.state = gate == AnalysisGate::ProceedToValidation ? ArticleState::UnderValidation
                                                      : ArticleState::RejectedAtAnalysis;
  return gate;
}

ValidationTally Engine::run_validation(const ArticleId& id, BeliefProvider& beliefs, Tick tick) {
  NewsArticle& a = mutable_article(id);
  require_state(a, ArticleState::UnderValidation, "run_validation");
  if (a.tally) throw ProtocolError(ErrorCode::InvalidState, "run_validation: " + id + " already validated");
  const Secret& secret = secrets_.at(id);

  std::vector<ParticipantId> pool;
  for (const auto& p : registry_.participants()) {
    if (p.has_role(Role::Validator) && p.id != secret.reporter && tags_intersect(p, a.tags)) {
      pool.push_back(p.id);
    }
  }
  if (pool.empty()) throw ProtocolError(ErrorCode::NoValidators, "no validator follows the tags of " + id);
  rng_.shuffle(pool);
  if (pool.size() > config_.max_validators) pool.resize(config_.max_validators);

  const ArticleView view{a.id, a.title, a.body, &a.tags};
  ValidationTally tally;
  TxBatch batch;
  for (const auto& vid : pool) {
    bool believes = false;
    try {
      believes = beliefs.believes(registry_.at(vid), view);
    } catch (const std::exception& e) {
      throw ProtocolError(ErrorCode::ProviderFailure, vid + ": " + e.what());
    }
    ++tally.eta;
    if (believes) ++tally.eta_b;
    Transaction tx;
    tx.article_id = a.id;
    tx.actor = vid;
    tx.timestamp = tick;
    tx.payload = ValidatorBeliefPayload{believes};
    batch.push_back(std::move(tx));
  }
  for (const auto& r : a.ratings) {
    const bool says_real = r.lambda >= kVerdictThreshold;
    tally.per_analyzer_agreement[r.actor_id] = says_real ? tally.eta_b : tally.eta - tally.eta_b;
  }
  seal(std::move(batch));

  a.tally = tally;
  a.score_v = validator_belief(tally);
  return tally;
}

PublicationGate Engine::decide_publication(const ArticleId& id, Tick tick) {
  NewsArticle& a = mutable_article(id);
  require_state(a, ArticleState::UnderValidation, "decide_publication");
  if (!a.tally || !a.score_v || !a.score_a) {
    throw ProtocolError(ErrorCode::InvalidState, "decide_publication: " + id + " has no validation tally");
  }
  Secret& secret = secrets_.at(id);
  if (!commitment_matches(a.commitment, secret.reporter, secret.nonce)) {
    a.quarantined = true;
    throw ProtocolError(ErrorCode::CommitmentMismatch, id);
  }

  const double total = total_score(secret.reporter_score, *a.score_a, *a.score_v, config_.scoring);
  const PublicationGate gate = gate_after_validation(total, config_.scoring);

  PublicationDecisionPayload payload;
  payload.score_r = secret.reporter_score;
  payload.score_a = *a.score_a;
  payload.score_v = *a.score_v;
  payload.score_total = total;
  payload.published = gate == PublicationGate::Published;
  payload.revealed_reporter = secret.reporter;
  payload.nonce = secret.nonce;

  Transaction tx;
  tx.article_id = a.id;
  tx.actor = secret.reporter;
  tx.timestamp = tick;
  tx.payload = std::move(payload);
  seal({std::move(tx)});

  secret.revealed = true;
  a.score_r = secret.reporter_score;
  a.score_total = total;
  a.state = gate == PublicationGate::Published ? ArticleState::Published : ArticleState::RejectedFake;
  return gate;
}

ResolutionReport Engine::resolve(const ArticleId& id, Truth truth, Tick tick) {
  NewsArticle& a = mutable_article(id);
  if (a.state == ArticleState::Resolved) throw ProtocolError(ErrorCode::AlreadyResolved, id);
  if (a.state != ArticleState::Published && a.state != ArticleState::RejectedFake &&
      a.state != ArticleState::RejectedAtAnalysis) {
    throw ProtocolError(ErrorCode::InvalidState,
                        "resolve on " + id + " in state " + std::string(to_string(a.state)));
  }
  const Secret& secret = secrets_.at(id);

  ResolutionInput input;
  input.article = id;
  input.reporter = secret.reporter;
  input.truth = truth;
  for (const auto& r : a.ratings) input.panel.push_back({r.actor_id, r.lambda});
  input.tally = a.tally;
  input.theta = config_.scoring.theta;
  input.tick = tick;

  TxBatch batch;
  Transaction tx;
  tx.article_id = id;
  tx.timestamp = tick;
  tx.payload = ResolutionPayload{truth};
  batch.push_back(std::move(tx));

  Registry trial = registry_;
  ResolutionReport report;
  report.outcome = trial.record_resolution_outcome(input, batch);
  seal(std::move(batch));
  registry_ = std::move(trial);

  report.article = id;
  report.truth = truth;
  report.decided_state = a.state;
  a.truth = truth;
  a.state = ArticleState::Resolved;
  return report;
}

}  // namespace newsgate
