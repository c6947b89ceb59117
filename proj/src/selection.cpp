#include "newsgate/selection.hpp"

#include "newsgate/error.hpp"

#include <algorithm>
#include <cmath>

namespace newsgate {

void PanelSpec::validate() const {
  if (total() == 0) throw ProtocolError(ErrorCode::InvalidPanelSpec, "panel must have at least one analyzer");
}

bool tags_intersect(const Participant& participant, const ArticleTags& tags) {
  auto hit = [&](const std::set<std::string>& mine) {
    for (const auto& t : mine) {
      if (tags.area.count(t) || tags.domain.count(t)) return true;
    }
    return false;
  };
  return hit(participant.area_tags) || hit(participant.domain_tags);
}

namespace {

bool contains(const std::vector<ParticipantId>& ids, const ParticipantId& id) {
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

ArticleTags normalized(const ArticleTags& tags) {
  ArticleTags out;
  for (const auto& t : tags.area) out.area.insert(normalize_tag(t));
  for (const auto& t : tags.domain) out.domain.insert(normalize_tag(t));
  return out;
}

}  // namespace

std::vector<ParticipantId> select_panel(const ArticleTags& raw_tags, const Registry& roster,
                                        const PanelSpec& spec, Rng& rng,
                                        std::string_view excluded) {
  spec.validate();
  const ArticleTags tags = normalized(raw_tags);
  std::vector<ParticipantId> panel;

  auto candidates = [&](Role role, bool need_tag_match) {
    std::vector<ParticipantId> out;
    for (const auto& p : roster.participants()) {
      if (!p.has_role(role) || p.id == excluded || contains(panel, p.id)) continue;
      if (need_tag_match && !tags_intersect(p, tags)) continue;
      out.push_back(p.id);
    }
    return out;
  };

  auto machines = candidates(Role::AnalyzerDL, false);
  if (machines.size() < spec.n_dl) {
    throw ProtocolError(ErrorCode::InsufficientMachineAnalyzers,
                        "need " + std::to_string(spec.n_dl) + ", have " + std::to_string(machines.size()));
  }
  rng.shuffle(machines);
  panel.insert(panel.end(), machines.begin(), machines.begin() + spec.n_dl);

  auto journalists = candidates(Role::AnalyzerJournalist, false);
  if (journalists.size() < spec.n_journalist) {
    throw ProtocolError(ErrorCode::InsufficientJournalists,
                        "need " + std::to_string(spec.n_journalist) + ", have " +
                            std::to_string(journalists.size()));
  }
  rng.shuffle(journalists);
  panel.insert(panel.end(), journalists.begin(), journalists.begin() + spec.n_journalist);
  std::vector<ParticipantId> reserve(journalists.begin() + spec.n_journalist, journalists.end());

  auto locals = candidates(Role::AnalyzerLocal, true);
  rng.shuffle(locals);
  const std::size_t taken = std::min<std::size_t>(locals.size(), spec.n_local);
  panel.insert(panel.end(), locals.begin(), locals.begin() + static_cast<std::ptrdiff_t>(taken));

  std::size_t missing = spec.n_local - taken;
  for (const auto& id : reserve) {
    if (missing == 0) break;
    if (contains(panel, id)) continue;
    panel.push_back(id);
    --missing;
  }
  if (missing != 0) {
    throw ProtocolError(ErrorCode::InsufficientJournalists,
                        "cannot backfill " + std::to_string(missing) + " local slot(s)");
  }
  return panel;
}

std::vector<RatingRecord> panel_ratings(std::span<const ParticipantId> panel,
                                        const Registry& roster, const ArticleView& article,
                                        const ProviderLookup& providers, Tick tick,
                                        TxBatch& emit) {
  std::vector<RatingRecord> records;
  TxBatch txs;
  for (const auto& id : panel) {
    const Participant& analyzer = roster.at(id);
    RatingProvider* provider = providers ? providers(analyzer) : nullptr;
    if (provider == nullptr) throw ProtocolError(ErrorCode::ProviderFailure, id + ": no rating provider");
    double lambda = 0.0;
    try {
      lambda = provider->rate(analyzer, article);
    } catch (const std::exception& e) {
      throw ProtocolError(ErrorCode::ProviderFailure, id + ": " + e.what());
    }
    if (!std::isfinite(lambda) || lambda < 0.0 || lambda > kMaxRating) {
      throw ProtocolError(ErrorCode::ProviderFailure, id + ": rating outside [0,5]");
    }
    records.push_back(RatingRecord{id, lambda, analyzer.credibility, article.id});

    Transaction tx;
    tx.article_id = article.id;
    tx.actor = id;
    tx.timestamp = tick;
    tx.payload = AnalyzerRatingPayload{lambda, analyzer.credibility};
    txs.push_back(std::move(tx));
  }
  emit.insert(emit.end(), txs.begin(), txs.end());
  return records;
}

}  // namespace newsgate
