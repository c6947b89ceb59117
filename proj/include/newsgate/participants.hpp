#pragma once

#include "newsgate/digest.hpp"
#include "newsgate/ledger.hpp"
#include "newsgate/random.hpp"
#include "newsgate/scoring.hpp"
#include "newsgate/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace newsgate {

inline constexpr double kInitialCredibility = 0.5;
inline constexpr double kDefaultGrowthRate = 0.1;
/// λ at or above this is a "real" verdict; below it, "fake".
inline constexpr double kVerdictThreshold = 2.5;

enum class Role : std::uint8_t { Reporter, AnalyzerJournalist, AnalyzerLocal, AnalyzerDL, Validator };

std::string_view to_string(Role role);
std::optional<Role> role_from_string(std::string_view name);

/// Analyzer verdicts against ground truth; "positive" means a real verdict.
struct ConfusionCounts {
  std::uint64_t true_positive = 0;
  std::uint64_t true_negative = 0;
  std::uint64_t false_positive = 0;
  std::uint64_t false_negative = 0;

  std::uint64_t total() const {
    return true_positive + true_negative + false_positive + false_negative;
  }
  bool operator==(const ConfusionCounts&) const = default;
};

struct Participant {
  ParticipantId id;
  std::set<Role> roles;
  std::set<std::string> area_tags;
  std::set<std::string> domain_tags;
  double credibility = kInitialCredibility;
  std::uint64_t fake_count = 0;     // resolved-fake publications (reporter)
  std::uint64_t genuine_count = 0;  // resolved-authentic publications (reporter)
  ConfusionCounts confusion;
  std::vector<double> agreement_history;  // per-article η_a/η

  bool has_role(Role r) const { return roles.count(r) != 0; }
  bool is_analyzer() const {
    return has_role(Role::AnalyzerJournalist) || has_role(Role::AnalyzerLocal) ||
           has_role(Role::AnalyzerDL);
  }
};

struct ParticipantSpec {
  ParticipantId id;  // empty: the registry assigns one
  std::set<Role> roles;
  std::set<std::string> area_tags;
  std::set<std::string> domain_tags;
};

/// Lowercased, surrounding whitespace trimmed.
std::string normalize_tag(std::string_view tag);

// --- Pseudonymous submission -------------------------------------------------

struct PseudonymCommitment {
  Digest commitment{};
  Digest nonce{};
};

/// SHA-256 over (length-prefixed id, nonce).
Digest commitment_digest(std::string_view reporter_id, const Digest& nonce);
PseudonymCommitment make_commitment(std::string_view reporter_id, Rng& rng);
bool commitment_matches(const Digest& commitment, std::string_view reporter_id,
                        const Digest& nonce);

// --- Credibility rules ------------------------------------------------------

/// Reporter update. With at least one fake publication:
///   δ ← δ / (δ + θ · F / max(G, 1))
/// Otherwise bounded growth δ ← δ + γ(1 − δ). Result clamped to [0,1].
double reporter_credibility_step(double credibility, double theta, std::uint64_t fake_count,
                                 std::uint64_t genuine_count,
                                 double growth_rate = kDefaultGrowthRate);

/// Analyzer credibility: accuracy × mean(agreement history).
/// Throws NoHistory if either factor is undefined.
double analyzer_credibility_value(const ConfusionCounts& confusion,
                                  std::span<const double> agreement_history);

struct PanelVerdict {
  ParticipantId analyzer;
  double lambda = 0.0;
};

struct ResolutionInput {
  ArticleId article;
  ParticipantId reporter;
  Truth truth = Truth::Fake;
  std::vector<PanelVerdict> panel;
  std::optional<ValidationTally> tally;  // absent when rejected before validation
  double theta = 1.0;
  Tick tick = 0;
};

struct CredibilityChange {
  ParticipantId id;
  double before = 0.0;
  double after = 0.0;
};

struct ResolutionOutcome {
  std::vector<CredibilityChange> changes;
};

/// Participant store and owner of all credibility state. Mutated only by the
/// lifecycle engine; every state change appends a transaction to the caller's
/// batch.
class Registry {
 public:
  explicit Registry(double growth_rate = kDefaultGrowthRate) : growth_rate_(growth_rate) {}

  /// Throws InvalidRoles (no roles) or DuplicateId.
  const Participant& register_participant(ParticipantSpec spec, Tick tick, TxBatch& emit);

  const Participant* find(std::string_view id) const;
  /// Throws UnknownParticipant.
  const Participant& at(std::string_view id) const;

  /// Registration order.
  const std::vector<Participant>& participants() const { return participants_; }
  std::vector<ParticipantId> ids_with_role(Role role) const;

  /// Throws NotAReporter, NonPositiveTheta.
  double update_reporter_credibility(std::string_view reporter, double theta, Tick tick,
                                     const std::optional<ArticleId>& article, TxBatch& emit);

  /// Throws NoHistory.
  double update_analyzer_credibility(std::string_view analyzer, Tick tick,
                                     const std::optional<ArticleId>& article, TxBatch& emit);

  /// Applies the ground truth of one article: reporter and analyzer counters,
  /// agreement history, then the credibility updates. All checks happen before
  /// any state changes. Throws AlreadyResolved, NotAReporter,
  /// UnknownParticipant, NonPositiveTheta, InvalidRating.
  ResolutionOutcome record_resolution_outcome(const ResolutionInput& input, TxBatch& emit);

  bool is_resolved(std::string_view article) const { return resolved_.count(std::string(article)) != 0; }

 private:
  Participant& mutable_at(std::string_view id);

  double growth_rate_;
  std::vector<Participant> participants_;
  std::unordered_map<std::string, std::size_t> index_;
  std::set<ArticleId> resolved_;
  std::uint64_t next_auto_id_ = 0;
};

/// Roster file: one participant per line, tab-separated
///   id <TAB> roles <TAB> area_tags <TAB> domain_tags
/// with comma-separated lists. Blank lines and lines starting with '#' are
/// skipped. Throws ParseError.
std::vector<ParticipantSpec> parse_roster(std::istream& in);

struct TrajectoryPoint {
  Tick tick = 0;
  ParticipantId participant;
  double credibility = 0.0;
};

/// Credibility over time, read back from Register and CredibilityUpdate
/// transactions in ledger order.
std::vector<TrajectoryPoint> credibility_trajectories(const Ledger& ledger);

/// CSV with header `tick,participant,credibility`; reals use 12 significant digits.
void write_trajectories_csv(std::span<const TrajectoryPoint> points, std::ostream& out);

}  // namespace newsgate
