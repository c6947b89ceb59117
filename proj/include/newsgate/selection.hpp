#pragma once

#include "newsgate/ledger.hpp"
#include "newsgate/participants.hpp"
#include "newsgate/random.hpp"
#include "newsgate/scoring.hpp"

#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace newsgate {

/// Panel composition per article.
struct PanelSpec {
  std::uint32_t n_dl = 1;
  std::uint32_t n_journalist = 2;
  std::uint32_t n_local = 2;

  std::uint32_t total() const { return n_dl + n_journalist + n_local; }
  /// Throws InvalidPanelSpec when the panel would be empty.
  void validate() const;
};

struct ArticleTags {
  std::set<std::string> area;
  std::set<std::string> domain;
};

/// True when any of the participant's area or domain tags equals any of the
/// article's tags (after normalization).
bool tags_intersect(const Participant& participant, const ArticleTags& tags);

/// Picks n_dl machine analyzers, then n_journalist journalists, then up to
/// n_local tag-matched local analyzers; local slots that cannot be filled go
/// to further journalists. Each group is sampled without replacement by a
/// seeded shuffle over registration order. `excluded` (the article's reporter)
/// never appears. Throws InsufficientMachineAnalyzers, InsufficientJournalists.
std::vector<ParticipantId> select_panel(const ArticleTags& tags, const Registry& roster,
                                        const PanelSpec& spec, Rng& rng,
                                        std::string_view excluded = {});

/// What a panelist or validator gets to see. Carries no reporter identity.
struct ArticleView {
  ArticleId id;
  std::string_view title;
  std::string_view body;
  const ArticleTags* tags = nullptr;
};

class RatingProvider {
 public:
  virtual ~RatingProvider() = default;
  /// λ in [0,5].
  virtual double rate(const Participant& analyzer, const ArticleView& article) = 0;
};

/// Returns the provider for a panelist, or nullptr if there is none.
using ProviderLookup = std::function<RatingProvider*(const Participant&)>;

/// One RatingRecord per panelist with the panelist's current credibility
/// snapshotted, and one AnalyzerRating transaction each. A missing provider,
/// a throwing provider, or a rating outside [0,5] raises ProviderFailure
/// naming the panelist.
std::vector<RatingRecord> panel_ratings(std::span<const ParticipantId> panel,
                                        const Registry& roster, const ArticleView& article,
                                        const ProviderLookup& providers, Tick tick,
                                        TxBatch& emit);

}  // namespace newsgate
