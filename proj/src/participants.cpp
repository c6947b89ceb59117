#include "newsgate/participants.hpp"

#include "newsgate/error.hpp"
#include "newsgate/format.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace newsgate {

namespace {

constexpr std::string_view kRoleNames[] = {"reporter", "journalist", "local", "dl", "validator"};

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? text.npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::set<std::string> normalize_tags(const std::set<std::string>& tags) {
  std::set<std::string> out;
  for (const auto& t : tags) {
    auto n = normalize_tag(t);
    if (!n.empty()) out.insert(std::move(n));
  }
  return out;
}

void require_theta(double theta) {
  if (!std::isfinite(theta) || theta <= 0.0) {
    throw ProtocolError(ErrorCode::NonPositiveTheta, "theta must be positive");
  }
}

Transaction credibility_tx(const ParticipantId& id, const std::optional<ArticleId>& article,
                           Tick tick, double before, double after) {
  Transaction tx;
  tx.article_id = article;
  tx.actor = id;
  tx.timestamp = tick;
  tx.payload = CredibilityUpdatePayload{before, after};
  return tx;
}

}  // namespace

std::string_view to_string(Role role) { return kRoleNames[static_cast<std::size_t>(role)]; }

std::optional<Role> role_from_string(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kRoleNames); ++i) {
    if (kRoleNames[i] == name) return static_cast<Role>(i);
  }
  return std::nullopt;
}

std::string normalize_tag(std::string_view tag) {
  while (!tag.empty() && std::isspace(static_cast<unsigned char>(tag.front()))) tag.remove_prefix(1);
  while (!tag.empty() && std::isspace(static_cast<unsigned char>(tag.back()))) tag.remove_suffix(1);
  std::string out(tag);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

Digest commitment_digest(std::string_view reporter_id, const Digest& nonce) {
  ByteWriter w;
  w.str(reporter_id);
  w.bytes(nonce);
  return sha256(w.data());
}

PseudonymCommitment make_commitment(std::string_view reporter_id, Rng& rng) {
  PseudonymCommitment c;
  c.nonce = rng.bytes32();
  c.commitment = commitment_digest(reporter_id, c.nonce);
  return c;
}

bool commitment_matches(const Digest& commitment, std::string_view reporter_id,
                        const Digest& nonce) {
  return commitment_digest(reporter_id, nonce) == commitment;
}

double reporter_credibility_step(double credibility, double theta, std::uint64_t fake_count,
                                 std::uint64_t genuine_count, double growth_rate) {
  require_theta(theta);
  double next;
  if (fake_count >= 1) {
    const double ratio =
        static_cast<double>(fake_count) / static_cast<double>(std::max<std::uint64_t>(genuine_count, 1));
    next = credibility / (credibility + theta * ratio);
  } else {
    next = std::min(1.0, credibility + growth_rate * (1.0 - credibility));
  }
  return std::clamp(next, 0.0, 1.0);
}

double analyzer_credibility_value(const ConfusionCounts& confusion,
                                  std::span<const double> agreement_history) {
  if (confusion.total() == 0 || agreement_history.empty()) {
    throw ProtocolError(ErrorCode::NoHistory, "analyzer has no resolved history");
  }
  const double accuracy = static_cast<double>(confusion.true_positive + confusion.true_negative) /
                          static_cast<double>(confusion.total());
  double sum = 0.0;
  for (double a : agreement_history) sum += a;
  const double agreement = sum / static_cast<double>(agreement_history.size());
  return std::clamp(accuracy * agreement, 0.0, 1.0);
}

const Participant& Registry::register_participant(ParticipantSpec spec, Tick tick, TxBatch& emit) {
  if (spec.roles.empty()) throw ProtocolError(ErrorCode::InvalidRoles, "no roles given");
  if (spec.id.empty()) {
    do {
      char buf[32];
      std::snprintf(buf, sizeof buf, "p-%06llu", static_cast<unsigned long long>(next_auto_id_++));
      spec.id = buf;
    } while (index_.count(spec.id) != 0);
  } else if (index_.count(spec.id) != 0) {
    throw ProtocolError(ErrorCode::DuplicateId, spec.id);
  }

  Participant p;
  p.id = spec.id;
  p.roles = spec.roles;
  p.area_tags = normalize_tags(spec.area_tags);
  p.domain_tags = normalize_tags(spec.domain_tags);

  RegisterPayload payload;
  for (Role r : p.roles) payload.roles.emplace_back(to_string(r));
  payload.area_tags.assign(p.area_tags.begin(), p.area_tags.end());
  payload.domain_tags.assign(p.domain_tags.begin(), p.domain_tags.end());
  payload.credibility = p.credibility;

  Transaction tx;
  tx.actor = p.id;
  tx.timestamp = tick;
  tx.payload = std::move(payload);
  emit.push_back(std::move(tx));

  index_.emplace(p.id, participants_.size());
  participants_.push_back(std::move(p));
  return participants_.back();
}

const Participant* Registry::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &participants_[it->second];
}

const Participant& Registry::at(std::string_view id) const {
  if (const auto* p = find(id)) return *p;
  throw ProtocolError(ErrorCode::UnknownParticipant, std::string(id));
}

Participant& Registry::mutable_at(std::string_view id) {
  return const_cast<Participant&>(at(id));
}

std::vector<ParticipantId> Registry::ids_with_role(Role role) const {
  std::vector<ParticipantId> out;
  for (const auto& p : participants_) {
    if (p.has_role(role)) out.push_back(p.id);
  }
  return out;
}

double Registry::update_reporter_credibility(std::string_view reporter, double theta, Tick tick,
                                             const std::optional<ArticleId>& article,
                                             TxBatch& emit) {
  Participant& p = mutable_at(reporter);
  if (!p.has_role(Role::Reporter)) throw ProtocolError(ErrorCode::NotAReporter, p.id);
  const double before = p.credibility;
  p.credibility =
      reporter_credibility_step(before, theta, p.fake_count, p.genuine_count, growth_rate_);
  emit.push_back(credibility_tx(p.id, article, tick, before, p.credibility));
  return p.credibility;
}

double Registry::update_analyzer_credibility(std::string_view analyzer, Tick tick,
                                             const std::optional<ArticleId>& article,
                                             TxBatch& emit) {
  Participant& p = mutable_at(analyzer);
  const double next = analyzer_credibility_value(p.confusion, p.agreement_history);
  const double before = p.credibility;
  p.credibility = next;
  emit.push_back(credibility_tx(p.id, article, tick, before, next));
  return next;
}

ResolutionOutcome Registry::record_resolution_outcome(const ResolutionInput& input,
                                                      TxBatch& emit) {
  if (resolved_.count(input.article) != 0) {
    throw ProtocolError(ErrorCode::AlreadyResolved, input.article);
  }
  const Participant& reporter = at(input.reporter);
  if (!reporter.has_role(Role::Reporter)) throw ProtocolError(ErrorCode::NotAReporter, reporter.id);
  require_theta(input.theta);
  for (const auto& v : input.panel) {
    at(v.analyzer);
    if (!std::isfinite(v.lambda) || v.lambda < 0.0 || v.lambda > kMaxRating) {
      throw ProtocolError(ErrorCode::InvalidRating, "panel rating outside [0,5]");
    }
  }
  const bool has_votes = input.tally && input.tally->eta > 0;
  if (input.tally && input.tally->eta_b > input.tally->eta) {
    throw ProtocolError(ErrorCode::InvalidRating, "more believers than validators");
  }

  const bool fake = input.truth == Truth::Fake;
  Participant& rep = mutable_at(input.reporter);
  (fake ? rep.fake_count : rep.genuine_count) += 1;

  std::vector<ParticipantId> analyzers;
  for (const auto& v : input.panel) {
    if (std::find(analyzers.begin(), analyzers.end(), v.analyzer) != analyzers.end()) continue;
    analyzers.push_back(v.analyzer);
    Participant& a = mutable_at(v.analyzer);
    const bool says_real = v.lambda >= kVerdictThreshold;
    if (says_real) {
      (fake ? a.confusion.false_positive : a.confusion.true_positive) += 1;
    } else {
      (fake ? a.confusion.true_negative : a.confusion.false_negative) += 1;
    }
    if (has_votes) {
      const auto& tally = *input.tally;
      const auto it = tally.per_analyzer_agreement.find(v.analyzer);
      const std::uint64_t agreeing = it != tally.per_analyzer_agreement.end()
                                         ? std::min(it->second, tally.eta)
                                         : (says_real ? tally.eta_b : tally.eta - tally.eta_b);
      a.agreement_history.push_back(static_cast<double>(agreeing) /
                                    static_cast<double>(tally.eta));
    }
  }
  resolved_.insert(input.article);

  ResolutionOutcome outcome;
  const std::optional<ArticleId> article = input.article;
  {
    const double before = rep.credibility;
    const double after =
        update_reporter_credibility(input.reporter, input.theta, input.tick, article, emit);
    outcome.changes.push_back({input.reporter, before, after});
  }
  for (const auto& id : analyzers) {
    const Participant& a = at(id);
    if (a.agreement_history.empty() || a.confusion.total() == 0) continue;
    const double before = a.credibility;
    const double after = update_analyzer_credibility(id, input.tick, article, emit);
    outcome.changes.push_back({id, before, after});
  }
  return outcome;
}

std::vector<ParticipantSpec> parse_roster(std::istream& in) {
  std::vector<ParticipantSpec> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 4) {
      throw ProtocolError(ErrorCode::ParseError,
                          "roster line " + std::to_string(line_no) + ": expected 4 tab-separated fields");
    }
    ParticipantSpec spec;
    spec.id = fields[0];
    if (spec.id.empty()) {
      throw ProtocolError(ErrorCode::ParseError, "roster line " + std::to_string(line_no) + ": empty id");
    }
    for (const auto& name : split(fields[1], ',')) {
      const auto role = role_from_string(normalize_tag(name));
      if (!role) {
        throw ProtocolError(ErrorCode::ParseError,
                            "roster line " + std::to_string(line_no) + ": unknown role '" + name + "'");
      }
      spec.roles.insert(*role);
    }
    for (const auto& t : split(fields[2], ',')) {
      if (!normalize_tag(t).empty()) spec.area_tags.insert(normalize_tag(t));
    }
    for (const auto& t : split(fields[3], ',')) {
      if (!normalize_tag(t).empty()) spec.domain_tags.insert(normalize_tag(t));
    }
    out.push_back(std::move(spec));
  }
  return out;
}

std::vector<TrajectoryPoint> credibility_trajectories(const Ledger& ledger) {
  std::vector<TrajectoryPoint> out;
  for (const auto& block : ledger.blocks()) {
    for (const auto& tx : block.transactions) {
      if (!tx.actor) continue;
      if (const auto* reg = std::get_if<RegisterPayload>(&tx.payload)) {
        out.push_back({tx.timestamp, *tx.actor, reg->credibility});
      } else if (const auto* upd = std::get_if<CredibilityUpdatePayload>(&tx.payload)) {
        out.push_back({tx.timestamp, *tx.actor, upd->new_credibility});
      }
    }
  }
  return out;
}

void write_trajectories_csv(std::span<const TrajectoryPoint> points, std::ostream& out) {
  out << "tick,participant,credibility\n";
  for (const auto& p : points) {
    out << p.tick << ',' << p.participant << ',' << format_real(p.credibility) << '\n';
  }
}

}  // namespace newsgate
