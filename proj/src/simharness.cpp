#include "newsgate/simharness.hpp"

#include "newsgate/error.hpp"
#include "newsgate/format.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <functional>
#include <memory>
#include <set>
#include <sstream>
#include <system_error>

namespace newsgate {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Corpus

CorpusParams CorpusParams::defaults() {
  CorpusParams p;
  p.fake_markers = {"shocking", "unbelievable", "outrageous", "secret",   "exposed",
                    "miracle",  "horrifying",   "scandal",    "bombshell", "furious",
                    "insane",   "destroyed",    "shameful",   "terrifying", "conspiracy"};
  p.authentic_markers = {"officials", "according", "statement", "percent",    "announced",
                         "confirmed", "data",      "study",     "spokesperson", "quarterly",
                         "survey",    "committee", "estimates", "analysts",   "minutes"};
  p.filler = {"government", "city",     "council",  "market",    "economy",  "health",
              "hospital",   "school",   "election", "minister",  "budget",   "water",
              "energy",     "road",     "police",   "court",     "company",  "bank",
              "price",      "farmers",  "weather",  "river",     "bridge",   "station",
              "museum",     "festival", "team",     "league",    "university", "vaccine",
              "clinic",     "border",   "trade",    "export",    "factory",  "workers",
              "union",      "tax",      "housing",  "rent",      "transport", "airport",
              "rail",       "harbor",   "village",  "district",  "province", "mayor",
              "parliament", "senate",   "policy",   "plan",      "project",  "program",
              "coast",      "forest",   "library",  "garden",    "highway",  "teachers"};
  return p;
}

void CorpusParams::validate() const {
  if (fake_markers.empty() || authentic_markers.empty() || filler.empty()) {
    throw ProtocolError(ErrorCode::InvalidConfig, "corpus vocabularies must be non-empty");
  }
  if (!std::isfinite(marker_noise) || marker_noise < 0.0 || marker_noise > 1.0) {
    throw ProtocolError(ErrorCode::InvalidConfig, "marker_noise must lie in [0,1]");
  }
  if (title_words == 0) throw ProtocolError(ErrorCode::InvalidConfig, "title_words must be positive");
  if (filler_per_doc == 0) throw ProtocolError(ErrorCode::InvalidConfig, "filler_per_doc must be positive");

  // Words are compared as the classifier sees them, so "report" and
  // "reported" count as the same word.
  auto stems = [](const std::vector<std::string>& words) {
    std::set<std::string> out;
    for (const auto& w : words) {
      for (const auto& t : tokenize(w)) out.insert(stem(t));
    }
    return out;
  };
  const auto fake = stems(fake_markers);
  const auto authentic = stems(authentic_markers);
  const auto fill = stems(filler);
  auto first_common = [](const std::set<std::string>& a, const std::set<std::string>& b) {
    for (const auto& w : a) {
      if (b.count(w)) return std::optional<std::string>(w);
    }
    return std::optional<std::string>();
  };
  if (auto w = first_common(fake, authentic)) {
    throw ProtocolError(ErrorCode::OverlappingVocabularies, "fake and authentic markers share '" + *w + "'");
  }
  if (auto w = first_common(fill, fake)) {
    throw ProtocolError(ErrorCode::OverlappingVocabularies, "filler and fake markers share '" + *w + "'");
  }
  if (auto w = first_common(fill, authentic)) {
    throw ProtocolError(ErrorCode::OverlappingVocabularies, "filler and authentic markers share '" + *w + "'");
  }
}

namespace {

const std::string& pick(const std::vector<std::string>& words, Rng& rng) {
  return words[static_cast<std::size_t>(rng.below(words.size()))];
}

std::string sentence(const std::vector<std::string>& words, char end) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  out += end;
  return out;
}

}  // namespace

LabeledDocument generate_document(const CorpusParams& params, Truth truth, Rng& rng) {
  const bool fake = truth == Truth::Fake;
  const auto& own = fake ? params.fake_markers : params.authentic_markers;
  const auto& other = fake ? params.authentic_markers : params.fake_markers;

  std::vector<std::string> words;
  for (std::uint32_t i = 0; i < params.filler_per_doc; ++i) words.push_back(pick(params.filler, rng));
  const std::vector<std::string> topic = words;
  for (std::uint32_t i = 0; i < params.markers_per_doc; ++i) {
    const auto& marker = rng.bernoulli(params.marker_noise) ? pick(other, rng) : pick(own, rng);
    const auto pos = static_cast<std::ptrdiff_t>(rng.below(words.size() + 1));
    words.insert(words.begin() + pos, marker);
  }

  // Authentic headlines summarize the body; fake ones lead with a sensational
  // word and wander off topic.
  std::vector<std::string> title;
  if (fake) {
    title.push_back(pick(own, rng));
    while (title.size() < params.title_words) title.push_back(pick(params.filler, rng));
  } else {
    while (title.size() < params.title_words) title.push_back(pick(topic, rng));
  }

  LabeledDocument doc;
  doc.label = truth;
  doc.title = sentence(title, fake ? '!' : '.');
  doc.body = sentence(words, '.');
  return doc;
}

std::vector<LabeledDocument> generate_corpus(const CorpusParams& params, std::uint32_t count,
                                             double fake_fraction, Rng& rng) {
  params.validate();
  if (!std::isfinite(fake_fraction) || fake_fraction < 0.0 || fake_fraction > 1.0) {
    throw ProtocolError(ErrorCode::InvalidConfig, "fake fraction must lie in [0,1]");
  }
  const auto n_fake = static_cast<std::uint32_t>(std::llround(count * fake_fraction));
  std::vector<Truth> labels(count, Truth::Authentic);
  std::fill(labels.begin(), labels.begin() + n_fake, Truth::Fake);
  rng.shuffle(labels);
  std::vector<LabeledDocument> docs;
  docs.reserve(count);
  for (const Truth t : labels) docs.push_back(generate_document(params, t, rng));
  return docs;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

void require_probability(double p, const char* name) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw ProtocolError(ErrorCode::InvalidConfig, std::string(name) + " must lie in [0,1]");
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  scoring.validate();
  panel.validate();
  corpus.validate();
  require_probability(p_fake, "p_fake");
  require_probability(analyzer_accuracy, "analyzer_accuracy");
  for (const auto& c : validator_cohorts) {
    require_probability(c.believe_authentic, "believe_authentic");
    require_probability(c.believe_fake, "believe_fake");
  }
  auto in_rating_range = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= kMaxRating; };
  if (!in_rating_range(honest_lambda_min) || !in_rating_range(honest_lambda_max) ||
      honest_lambda_min > honest_lambda_max || !in_rating_range(malicious_lambda)) {
    throw ProtocolError(ErrorCode::InvalidConfig, "reporter ratings must lie in [0,5] with min <= max");
  }
  if (!std::isfinite(rating_noise) || rating_noise < 0.0 || rating_noise > 2.5) {
    throw ProtocolError(ErrorCode::InvalidConfig, "rating_noise must lie in [0,2.5]");
  }
  if (honest_reporters + malicious_reporters == 0) {
    throw ProtocolError(ErrorCode::InvalidConfig, "at least one reporter is required");
  }
  if (colluding_journalists > journalists) {
    throw ProtocolError(ErrorCode::InvalidConfig, "colluding_journalists exceeds journalists");
  }
  if (colluding_locals > local_analyzers) {
    throw ProtocolError(ErrorCode::InvalidConfig, "colluding_locals exceeds local_analyzers");
  }
  if (areas.empty() || domains.empty()) {
    throw ProtocolError(ErrorCode::InvalidConfig, "areas and domains must be non-empty");
  }
  if (validator_interests > domains.size()) {
    throw ProtocolError(ErrorCode::InvalidConfig, "validator_interests exceeds the number of domains");
  }
  if (max_validators == 0) throw ProtocolError(ErrorCode::InvalidConfig, "max_validators must be positive");
  if (retrain_interval == 0) throw ProtocolError(ErrorCode::InvalidConfig, "retrain_interval must be positive");
  if (classifier.dims == 0 || classifier.epochs == 0 || !(classifier.learning_rate > 0.0) ||
      !(classifier.max_df > 0.0 && classifier.max_df <= 1.0)) {
    throw ProtocolError(ErrorCode::InvalidConfig, "invalid classifier settings");
  }
}

namespace {

[[noreturn]] void bad_key(const std::string& key, const char* expected) {
  throw ProtocolError(ErrorCode::InvalidConfig, "'" + key + "' must be " + expected);
}

std::uint64_t as_u64(const json& v, const std::string& key) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    bad_key(key, "a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::uint32_t as_u32(const json& v, const std::string& key) {
  const auto n = as_u64(v, key);
  if (n > UINT32_MAX) bad_key(key, "at most 4294967295");
  return static_cast<std::uint32_t>(n);
}

double as_real(const json& v, const std::string& key) {
  if (!v.is_number()) bad_key(key, "a number");
  return v.get<double>();
}

std::vector<std::string> as_strings(const json& v, const std::string& key) {
  if (!v.is_array()) bad_key(key, "an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) bad_key(key, "an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

using Setter = std::function<void(const json&, const std::string&)>;

void apply_object(const json& obj, const std::map<std::string, Setter>& setters, const std::string& where) {
  if (!obj.is_object()) throw ProtocolError(ErrorCode::InvalidConfig, where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ProtocolError(ErrorCode::InvalidConfig, "unknown key '" + key + "' in " + where);
    it->second(value, key);
  }
}

ValidatorCohort parse_cohort(const json& v) {
  ValidatorCohort c;
  apply_object(v,
               {{"label", [&](const json& x, const std::string& k) {
                   if (!x.is_string()) bad_key(k, "a string");
                   c.label = x.get<std::string>();
                 }},
                {"count", [&](const json& x, const std::string& k) { c.count = as_u32(x, k); }},
                {"believe_authentic", [&](const json& x, const std::string& k) { c.believe_authentic = as_real(x, k); }},
                {"believe_fake", [&](const json& x, const std::string& k) { c.believe_fake = as_real(x, k); }}},
               "validator cohort");
  return c;
}

}  // namespace

ScenarioConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ProtocolError(ErrorCode::InvalidConfig, std::string("malformed JSON: ") + e.what());
  }

  ScenarioConfig c;
  auto u32 = [](std::uint32_t& field) {
    return Setter([&field](const json& v, const std::string& k) { field = as_u32(v, k); });
  };
  auto real = [](double& field) {
    return Setter([&field](const json& v, const std::string& k) { field = as_real(v, k); });
  };
  auto strings = [](std::vector<std::string>& field) {
    return Setter([&field](const json& v, const std::string& k) { field = as_strings(v, k); });
  };

  const std::map<std::string, Setter> corpus_keys{
      {"fake_markers", strings(c.corpus.fake_markers)},
      {"authentic_markers", strings(c.corpus.authentic_markers)},
      {"filler", strings(c.corpus.filler)},
      {"markers_per_doc", u32(c.corpus.markers_per_doc)},
      {"filler_per_doc", u32(c.corpus.filler_per_doc)},
      {"title_words", u32(c.corpus.title_words)},
      {"marker_noise", real(c.corpus.marker_noise)},
  };
  const std::map<std::string, Setter> classifier_keys{
      {"dims", u32(c.classifier.dims)},
      {"epochs", u32(c.classifier.epochs)},
      {"learning_rate", real(c.classifier.learning_rate)},
      {"max_df", real(c.classifier.max_df)},
  };

  const std::map<std::string, Setter> keys{
      {"seed", [&](const json& v, const std::string& k) { c.seed = as_u64(v, k); }},
      {"article_count", u32(c.article_count)},
      {"bootstrap_articles", u32(c.bootstrap_articles)},
      {"holdout_articles", u32(c.holdout_articles)},
      {"honest_reporters", u32(c.honest_reporters)},
      {"malicious_reporters", u32(c.malicious_reporters)},
      {"p_fake", real(c.p_fake)},
      {"honest_lambda_min", real(c.honest_lambda_min)},
      {"honest_lambda_max", real(c.honest_lambda_max)},
      {"malicious_lambda", real(c.malicious_lambda)},
      {"journalists", u32(c.journalists)},
      {"local_analyzers", u32(c.local_analyzers)},
      {"dl_analyzers", u32(c.dl_analyzers)},
      {"colluding_journalists", u32(c.colluding_journalists)},
      {"colluding_locals", u32(c.colluding_locals)},
      {"analyzer_accuracy", real(c.analyzer_accuracy)},
      {"rating_noise", real(c.rating_noise)},
      {"validator_cohorts",
       [&](const json& v, const std::string& k) {
         if (!v.is_array()) bad_key(k, "an array of objects");
         c.validator_cohorts.clear();
         for (const auto& e : v) c.validator_cohorts.push_back(parse_cohort(e));
       }},
      {"validator_interests", u32(c.validator_interests)},
      {"areas", strings(c.areas)},
      {"domains", strings(c.domains)},
      {"corpus", [&](const json& v, const std::string&) { apply_object(v, corpus_keys, "corpus"); }},
      {"classifier", [&](const json& v, const std::string&) { apply_object(v, classifier_keys, "classifier"); }},
      {"omega1", real(c.scoring.omega1)},
      {"omega2", real(c.scoring.omega2)},
      {"omega3", real(c.scoring.omega3)},
      {"theta", real(c.scoring.theta)},
      {"gate_analyzer", real(c.scoring.gate_analyzer)},
      {"gate_total", real(c.scoring.gate_total)},
      {"n_dl", u32(c.panel.n_dl)},
      {"n_journalist", u32(c.panel.n_journalist)},
      {"n_local", u32(c.panel.n_local)},
      {"resolution_delay", u32(c.resolution_delay)},
      {"max_validators", u32(c.max_validators)},
      {"retrain_interval", u32(c.retrain_interval)},
  };
  apply_object(root, keys, "scenario config");
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProtocolError(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

// ---------------------------------------------------------------------------
// Agents

namespace {

enum class Behavior { Honest, Colluding };

/// Human analyzers. An honest analyzer reaches the right verdict with
/// probability `accuracy` and rates at the matching end of the scale, pulled
/// inwards by up to `noise`. A colluder rates every fake article 5.
class SimulatedAnalysts : public RatingProvider {
 public:
  SimulatedAnalysts(const std::map<ArticleId, Truth>& truth, double accuracy, double noise, Rng& rng)
      : truth_(truth), accuracy_(accuracy), noise_(noise), rng_(rng) {}

  void set_behavior(const ParticipantId& id, Behavior b) { behavior_[id] = b; }

  double rate(const Participant& analyzer, const ArticleView& article) override {
    const Truth truth = truth_.at(article.id);
    const auto it = behavior_.find(analyzer.id);
    const Behavior b = it == behavior_.end() ? Behavior::Honest : it->second;
    if (b == Behavior::Colluding && truth == Truth::Fake) return kMaxRating;
    const bool correct = rng_.bernoulli(accuracy_);
    const bool says_real = (truth == Truth::Authentic) == correct;
    const double pull = noise_ * rng_.uniform();
    return says_real ? kMaxRating - pull : pull;
  }

 private:
  const std::map<ArticleId, Truth>& truth_;
  double accuracy_;
  double noise_;
  Rng& rng_;
  std::map<ParticipantId, Behavior> behavior_;
};

class SimulatedValidators : public BeliefProvider {
 public:
  SimulatedValidators(const std::map<ArticleId, Truth>& truth, Rng& rng) : truth_(truth), rng_(rng) {}

  void set_cohort(const ParticipantId& id, const ValidatorCohort& cohort) { cohort_[id] = cohort; }

  bool believes(const Participant& validator, const ArticleView& article) override {
    const auto& c = cohort_.at(validator.id);
    const bool authentic = truth_.at(article.id) == Truth::Authentic;
    return rng_.bernoulli(authentic ? c.believe_authentic : c.believe_fake);
  }

 private:
  const std::map<ArticleId, Truth>& truth_;
  Rng& rng_;
  std::map<ParticipantId, ValidatorCohort> cohort_;
};

std::string numbered(const char* prefix, std::uint32_t i, int width) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s-%0*u", prefix, width, i + 1);
  return buf;
}

int width_for(std::uint32_t n) { return n >= 100 ? 3 : 2; }

struct Pending {
  Tick due = 0;
  ArticleId id;
};

}  // namespace

// ---------------------------------------------------------------------------
// Scenario

ScenarioResult run_scenario(const ScenarioConfig& config) {
  config.validate();

  Rng population_rng(Rng::derive(config.seed, 1));
  Rng corpus_rng(Rng::derive(config.seed, 2));
  Rng analyst_rng(Rng::derive(config.seed, 3));
  Rng validator_rng(Rng::derive(config.seed, 4));
  Rng holdout_rng(Rng::derive(config.seed, 5));

  EngineConfig engine_config;
  engine_config.scoring = config.scoring;
  engine_config.panel = config.panel;
  engine_config.max_validators = config.max_validators;
  Engine engine(engine_config, Rng::derive(config.seed, 0));

  std::map<ArticleId, Truth> truth_of;
  SimulatedAnalysts analysts(truth_of, config.analyzer_accuracy, config.rating_noise, analyst_rng);
  SimulatedValidators validators(truth_of, validator_rng);
  ClassifierRatingProvider machine;

  // --- Population
  std::vector<ParticipantSpec> specs;
  std::map<std::string, std::vector<ParticipantId>> cohorts;
  std::vector<ParticipantId> reporters;
  std::set<ParticipantId> malicious;
  const std::uint32_t n_reporters = config.honest_reporters + config.malicious_reporters;
  for (std::uint32_t i = 0; i < n_reporters; ++i) {
    ParticipantSpec s;
    s.id = numbered("reporter", i, width_for(n_reporters));
    s.roles = {Role::Reporter};
    const bool bad = i >= config.honest_reporters;
    cohorts[bad ? "malicious_reporters" : "honest_reporters"].push_back(s.id);
    if (bad) malicious.insert(s.id);
    reporters.push_back(s.id);
    specs.push_back(std::move(s));
  }
  for (std::uint32_t i = 0; i < config.journalists; ++i) {
    ParticipantSpec s;
    s.id = numbered("journalist", i, width_for(config.journalists));
    s.roles = {Role::AnalyzerJournalist};
    const bool colludes = i >= config.journalists - config.colluding_journalists;
    if (colludes) analysts.set_behavior(s.id, Behavior::Colluding);
    cohorts[colludes ? "colluding_journalists" : "honest_journalists"].push_back(s.id);
    specs.push_back(std::move(s));
  }
  const auto n_areas = static_cast<std::uint32_t>(config.areas.size());
  const auto n_domains = static_cast<std::uint32_t>(config.domains.size());
  for (std::uint32_t i = 0; i < config.local_analyzers; ++i) {
    ParticipantSpec s;
    s.id = numbered("local", i, width_for(config.local_analyzers));
    s.roles = {Role::AnalyzerLocal};
    s.area_tags = {config.areas[i % n_areas]};
    s.domain_tags = {config.domains[(i + i / n_areas) % n_domains]};
    const bool colludes = i >= config.local_analyzers - config.colluding_locals;
    if (colludes) analysts.set_behavior(s.id, Behavior::Colluding);
    cohorts[colludes ? "colluding_locals" : "honest_locals"].push_back(s.id);
    specs.push_back(std::move(s));
  }
  for (std::uint32_t i = 0; i < config.dl_analyzers; ++i) {
    ParticipantSpec s;
    s.id = numbered("dl", i, width_for(config.dl_analyzers));
    s.roles = {Role::AnalyzerDL};
    cohorts["dl_analyzers"].push_back(s.id);
    specs.push_back(std::move(s));
  }
  std::uint32_t v_index = 0;
  for (const auto& cohort : config.validator_cohorts) {
    for (std::uint32_t k = 0; k < cohort.count; ++k, ++v_index) {
      ParticipantSpec s;
      s.id = numbered("validator", v_index, 3);
      s.roles = {Role::Validator};
      const std::uint32_t follows = config.validator_interests == 0 ? n_domains : config.validator_interests;
      for (std::uint32_t d = 0; d < follows; ++d) s.domain_tags.insert(config.domains[(v_index + d) % n_domains]);
      validators.set_cohort(s.id, cohort);
      cohorts["validators:" + cohort.label].push_back(s.id);
      specs.push_back(std::move(s));
    }
  }

  Tick tick = 0;
  engine.register_participants(specs, tick);

  const ProviderLookup lookup = [&](const Participant& p) -> RatingProvider* {
    if (p.has_role(Role::AnalyzerDL)) return machine.has_model() ? &machine : nullptr;
    return &analysts;
  };

  ScenarioResult result;
  auto submit_one = [&]() -> ArticleId {
    const auto& reporter = reporters[static_cast<std::size_t>(population_rng.below(reporters.size()))];
    const bool bad = malicious.count(reporter) != 0;
    const Truth truth = bad && population_rng.bernoulli(config.p_fake) ? Truth::Fake : Truth::Authentic;
    const double lambda = bad ? config.malicious_lambda
                              : config.honest_lambda_min +
                                    (config.honest_lambda_max - config.honest_lambda_min) * population_rng.uniform();
    ArticleTags tags;
    tags.area.insert(config.areas[static_cast<std::size_t>(population_rng.below(n_areas))]);
    tags.domain.insert(config.domains[static_cast<std::size_t>(population_rng.below(n_domains))]);
    auto doc = generate_document(config.corpus, truth, corpus_rng);
    const auto& a = engine.submit(reporter, std::move(doc.title), std::move(doc.body), std::move(tags), lambda, tick);
    truth_of[a.id] = truth;
    result.reporter_of[a.id] = reporter;
    return a.id;
  };

  auto decide = [&](const ArticleId& id, const std::optional<PanelSpec>& panel) {
    if (engine.run_analysis(id, lookup, tick, panel) == AnalysisGate::ProceedToValidation) {
      engine.run_validation(id, validators, tick);
      engine.decide_publication(id, tick);
    }
  };

  std::vector<ArticleId> resolved_order;
  std::map<ArticleId, std::pair<ArticleState, Tick>> decisions;
  auto resolve_one = [&](const ArticleId& id) {
    const auto report = engine.resolve(id, truth_of.at(id), tick);
    decisions[id] = {report.decided_state, tick};
    resolved_order.push_back(id);
  };

  std::shared_ptr<const TrainedModel> current_model;
  std::uint32_t trainings = 0;
  double last_loss = 0.0;
  auto has_both_classes = [&]() {
    bool fake = false, authentic = false;
    for (const auto& id : resolved_order) (truth_of.at(id) == Truth::Fake ? fake : authentic) = true;
    return fake && authentic;
  };
  // Skipped while the resolved history holds a single class; articles then
  // go to the panel without the machine analyzer.
  auto retrain = [&]() {
    if (!has_both_classes()) return;
    std::vector<LabeledDocument> docs;
    for (const auto& id : resolved_order) {
      const auto& a = engine.article(id);
      docs.push_back({*a.truth, a.title, a.body});
    }
    ClassifierConfig cc = config.classifier;
    cc.seed = Rng::derive(config.seed, 100 + trainings);
    current_model = std::make_shared<const TrainedModel>(train(docs, cc));
    last_loss = current_model->final_loss;
    machine.set_model(current_model);
    ++trainings;
  };

  // --- Bootstrap: no machine analyzer yet, ground truth applied at once.
  PanelSpec bootstrap_panel = config.panel;
  bootstrap_panel.n_dl = 0;
  if (bootstrap_panel.total() == 0) bootstrap_panel.n_journalist = 1;
  const bool needs_model = config.dl_analyzers > 0 && config.panel.n_dl > 0;
  std::uint32_t bootstrap_count = 0;
  // Extended past the configured size only if the batch lacks a class.
  const std::uint32_t bootstrap_cap = std::max<std::uint32_t>(config.bootstrap_articles * 4, 200);
  while (bootstrap_count < config.bootstrap_articles ||
         (needs_model && !has_both_classes() && bootstrap_count < bootstrap_cap)) {
    ++tick;
    const auto id = submit_one();
    decide(id, bootstrap_panel);
    resolve_one(id);
    ++bootstrap_count;
  }
  if (needs_model) retrain();

  // --- Main run
  std::deque<Pending> pending;
  std::vector<ArticleId> measured;
  std::uint32_t since_retrain = 0;
  auto flush_due = [&](bool all) {
    while (!pending.empty() && (all || pending.front().due <= tick)) {
      if (all) tick = std::max(tick, pending.front().due);
      resolve_one(pending.front().id);
      pending.pop_front();
      if (needs_model && ++since_retrain >= config.retrain_interval) {
        retrain();
        since_retrain = 0;
      }
    }
  };
  for (std::uint32_t i = 0; i < config.article_count; ++i) {
    ++tick;
    flush_due(false);
    const auto id = submit_one();
    decide(id, current_model || !needs_model ? std::nullopt : std::optional<PanelSpec>(bootstrap_panel));
    measured.push_back(id);
    pending.push_back({tick + config.resolution_delay, id});
  }
  flush_due(true);

  // --- Metrics
  MetricsReport& m = result.metrics;
  m.seed = config.seed;
  m.article_count = config.article_count;
  m.bootstrap_articles = bootstrap_count;
  std::uint32_t fake_published = 0, authentic_rejected = 0;
  for (const auto& id : measured) {
    const auto& a = engine.article(id);
    const auto [state, resolved_at] = decisions.at(id);
    const Truth truth = truth_of.at(id);
    ArticleSummary s;
    s.article = id;
    s.reporter = result.reporter_of.at(id);
    s.malicious_reporter = malicious.count(s.reporter) != 0;
    s.truth = truth;
    s.decision = state;
    s.score_a = a.score_a.value_or(0.0);
    s.score_total = a.score_total;
    s.resolved = resolved_at;
    m.articles.push_back(std::move(s));

    if (truth == Truth::Fake) ++m.fake_articles; else ++m.authentic_articles;
    switch (state) {
      case ArticleState::Published:
        ++m.published;
        if (truth == Truth::Fake) ++fake_published;
        break;
      case ArticleState::RejectedAtAnalysis:
        ++m.rejected_at_analysis;
        if (truth == Truth::Authentic) ++authentic_rejected;
        break;
      case ArticleState::RejectedFake:
        ++m.rejected_fake;
        if (truth == Truth::Authentic) ++authentic_rejected;
        break;
      default:
        throw ProtocolError(ErrorCode::InvalidState, id + " resolved from a non-terminal state");
    }
    if (a.state == ArticleState::Resolved) ++m.resolved;
  }
  // Submission ticks are recovered from the Submit transactions.
  for (const auto& tx : engine.ledger().query(TxFilter{TxKind::Submit, std::nullopt, std::nullopt})) {
    for (auto& s : m.articles) {
      if (tx.article_id && *tx.article_id == s.article) s.submitted = tx.timestamp;
    }
  }
  m.fake_published_rate = m.fake_articles ? static_cast<double>(fake_published) / m.fake_articles : 0.0;
  m.authentic_rejected_rate =
      m.authentic_articles ? static_cast<double>(authentic_rejected) / m.authentic_articles : 0.0;

  for (const auto& [name, ids] : cohorts) {
    if (ids.empty()) continue;
    double sum = 0.0;
    for (const auto& id : ids) sum += engine.registry().at(id).credibility;
    m.mean_final_credibility[name] = sum / static_cast<double>(ids.size());
  }

  if (current_model && config.holdout_articles > 0) {
    const auto holdout = generate_corpus(config.corpus, config.holdout_articles, 0.5, holdout_rng);
    m.classifier_heldout_accuracy = accuracy(*current_model, holdout);
  }
  m.classifier_training_loss = last_loss;
  m.classifier_trainings = trainings;

  const auto report = engine.ledger().verify_chain();
  if (!report.ok) throw ProtocolError(ErrorCode::InvalidState, "ledger failed verification: " + report.reason);

  const Ledger& ledger = engine.ledger();
  m.ledger_blocks = ledger.blocks().size();
  m.ledger_transactions = ledger.next_tx_id();
  result.tip_hash = ledger.tip_hash();
  m.ledger_tip_hash = to_hex(result.tip_hash);
  result.ledger_jsonl = ledger.export_jsonl();
  std::ostringstream csv;
  const auto points = credibility_trajectories(ledger);
  write_trajectories_csv(points, csv);
  result.trajectories_csv = csv.str();
  return result;
}

std::string MetricsReport::to_json() const {
  auto r = [](double v) { return round_real(v); };
  ojson j = ojson::object();
  j["seed"] = seed;
  j["article_count"] = article_count;
  j["bootstrap_articles"] = bootstrap_articles;
  j["fake_articles"] = fake_articles;
  j["authentic_articles"] = authentic_articles;
  j["fake_published_rate"] = r(fake_published_rate);
  j["authentic_rejected_rate"] = r(authentic_rejected_rate);
  j["gate_counts"] = {{"published", published},
                      {"rejected_at_analysis", rejected_at_analysis},
                      {"rejected_fake", rejected_fake},
                      {"resolved", resolved}};
  ojson cred = ojson::object();
  for (const auto& [name, value] : mean_final_credibility) cred[name] = r(value);
  j["mean_final_credibility"] = std::move(cred);
  j["classifier"] = {{"heldout_accuracy", r(classifier_heldout_accuracy)},
                     {"final_training_loss", r(classifier_training_loss)},
                     {"trainings", classifier_trainings}};
  j["ledger"] = {{"blocks", ledger_blocks}, {"transactions", ledger_transactions}, {"tip_hash", ledger_tip_hash}};
  ojson rows = ojson::array();
  for (const auto& a : articles) {
    ojson row = ojson::object();
    row["article"] = a.article;
    row["reporter"] = a.reporter;
    row["malicious_reporter"] = a.malicious_reporter;
    row["truth"] = std::string(to_string(a.truth));
    row["decision"] = std::string(to_string(a.decision));
    row["score_a"] = r(a.score_a);
    row["score_total"] = a.score_total ? ojson(r(*a.score_total)) : ojson(nullptr);
    row["submitted"] = a.submitted;
    row["resolved"] = a.resolved;
    rows.push_back(std::move(row));
  }
  j["articles"] = std::move(rows);
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Output

namespace {

void write_atomically(const std::filesystem::path& target, const std::string& content) {
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ProtocolError(ErrorCode::IoError, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw ProtocolError(ErrorCode::IoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw ProtocolError(ErrorCode::IoError, "cannot rename to " + target.string() + ": " + ec.message());
}

}  // namespace

void write_outputs(const ScenarioResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ProtocolError(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  write_atomically(dir / "metrics.json", result.metrics.to_json());
  write_atomically(dir / "trajectories.csv", result.trajectories_csv);
  write_atomically(dir / "ledger.jsonl", result.ledger_jsonl);
}

std::size_t count_identity_leaks(const Ledger& ledger,
                                 const std::map<ArticleId, ParticipantId>& reporter_of) {
  // An article's pre-publication range ends at its PublicationDecision, or
  // just after a closing AnalyzerGate.
  std::set<ArticleId> closed;
  std::size_t leaks = 0;
  for (const auto& block : ledger.blocks()) {
    for (const auto& tx : block.transactions) {
      if (!tx.article_id) continue;
      const auto& id = *tx.article_id;
      if (closed.count(id)) continue;
      if (tx.kind() == TxKind::PublicationDecision || tx.kind() == TxKind::Resolution) {
        closed.insert(id);
        continue;
      }
      const auto it = reporter_of.find(id);
      if (it != reporter_of.end()) {
        const std::string needle = "\"" + it->second + "\"";
        if (transaction_to_json(tx).find(needle) != std::string::npos) ++leaks;
      }
      if (tx.kind() == TxKind::AnalyzerGate && !std::get<AnalyzerGatePayload>(tx.payload).proceed) {
        closed.insert(id);
      }
    }
  }
  return leaks;
}

}  // namespace newsgate
