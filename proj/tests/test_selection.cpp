#include "newsgate/error.hpp"
#include "newsgate/selection.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace newsgate;

namespace {

struct Roster {
  Registry registry;
  TxBatch sink;

  void add(const std::string& id, Role role, std::set<std::string> area = {}, std::set<std::string> domain = {}) {
    registry.register_participant({id, {role}, std::move(area), std::move(domain)}, 0, sink);
  }
};

ArticleTags tagged(std::set<std::string> area, std::set<std::string> domain = {}) {
  return {std::move(area), std::move(domain)};
}

Roster standard_roster() {
  Roster r;
  r.add("dl", Role::AnalyzerDL);
  for (int i = 0; i < 6; ++i) r.add("j" + std::to_string(i), Role::AnalyzerJournalist);
  r.add("lx1", Role::AnalyzerLocal, {"x"});
  r.add("lx2", Role::AnalyzerLocal, {"x"});
  r.add("lx3", Role::AnalyzerLocal, {"x"});
  r.add("ly1", Role::AnalyzerLocal, {"y"});
  r.add("rep", Role::Reporter);
  return r;
}

class Fixed : public RatingProvider {
 public:
  explicit Fixed(double v) : v_(v) {}
  double rate(const Participant&, const ArticleView&) override { return v_; }

 private:
  double v_;
};

class Throwing : public RatingProvider {
 public:
  double rate(const Participant&, const ArticleView&) override { throw std::runtime_error("offline"); }
};

}  // namespace

TEST(SelectPanel, ForcedWhenPoolEqualsDemand) {
  Roster r;
  r.add("dl", Role::AnalyzerDL);
  r.add("j1", Role::AnalyzerJournalist);
  r.add("j2", Role::AnalyzerJournalist);
  Rng rng(1);
  const auto panel = select_panel({}, r.registry, {1, 2, 0}, rng);
  EXPECT_EQ(std::set<ParticipantId>(panel.begin(), panel.end()), (std::set<ParticipantId>{"dl", "j1", "j2"}));
}

TEST(SelectPanel, LocalsComeFromTagMatches) {
  const auto r = standard_roster();
  const std::set<std::set<ParticipantId>> admissible{{"lx1", "lx2"}, {"lx1", "lx3"}, {"lx2", "lx3"}};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const auto panel = select_panel(tagged({"x"}), r.registry, {1, 2, 2}, rng);
    ASSERT_EQ(panel.size(), 5u);
    const std::set<ParticipantId> locals(panel.begin() + 3, panel.end());
    ASSERT_TRUE(admissible.count(locals)) << "seed " << seed;
  }
}

TEST(SelectPanel, BackfillMatchesSameSeedRecomputation) {
  const auto r = standard_roster();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const auto panel = select_panel(tagged({"y"}), r.registry, {1, 2, 3}, rng);

    // Recompute: shuffle each pool with the same draws and take in order.
    Rng ref(seed);
    std::vector<ParticipantId> machines{"dl"};
    ref.shuffle(machines);
    std::vector<ParticipantId> journalists{"j0", "j1", "j2", "j3", "j4", "j5"};
    ref.shuffle(journalists);
    std::vector<ParticipantId> locals{"ly1"};
    ref.shuffle(locals);
    const std::vector<ParticipantId> expected{"dl", journalists[0], journalists[1], "ly1", journalists[2],
                                              journalists[3]};
    ASSERT_EQ(panel, expected) << "seed " << seed;
  }
}

TEST(SelectPanel, Errors) {
  Roster r;
  r.add("j1", Role::AnalyzerJournalist);
  Rng rng(0);
  try {
    select_panel({}, r.registry, {1, 1, 0}, rng);
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientMachineAnalyzers);
  }
  try {
    select_panel({}, r.registry, {0, 2, 0}, rng);
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientJournalists);
  }
  try {
    select_panel({}, r.registry, {0, 1, 1}, rng);  // nothing left to backfill with
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientJournalists);
  }
  try {
    select_panel({}, r.registry, {0, 0, 0}, rng);
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidPanelSpec);
  }
}

TEST(SelectPanelProperties, NoDuplicatesAndReporterExcluded) {
  Roster r;
  r.add("dl", Role::AnalyzerDL);
  // The reporter also holds analyzer roles and must still never be picked.
  r.registry.register_participant({"rep", {Role::Reporter, Role::AnalyzerJournalist, Role::AnalyzerLocal}, {"x"}, {}},
                                  0, r.sink);
  for (int i = 0; i < 5; ++i) r.add("j" + std::to_string(i), Role::AnalyzerJournalist);
  for (int i = 0; i < 4; ++i) r.add("l" + std::to_string(i), Role::AnalyzerLocal, {i % 2 ? "x" : "z"});
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    const auto panel = select_panel(tagged({"x"}), r.registry, {1, 2, 3}, rng, "rep");
    const std::set<ParticipantId> unique(panel.begin(), panel.end());
    ASSERT_EQ(unique.size(), panel.size());
    ASSERT_FALSE(unique.count("rep"));
  }
}

TEST(SelectPanelProperties, Deterministic) {
  const auto r = standard_roster();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng a(seed), b(seed);
    ASSERT_EQ(select_panel(tagged({"x"}), r.registry, {1, 2, 2}, a),
              select_panel(tagged({"x"}), r.registry, {1, 2, 2}, b));
  }
}

TEST(SelectPanelProperties, JournalistSelectionIsUniform) {
  const auto r = standard_roster();
  const int trials = 10000;
  std::map<ParticipantId, int> hits;
  for (int t = 0; t < trials; ++t) {
    Rng rng(Rng::derive(99, t));
    const auto panel = select_panel(tagged({"x"}), r.registry, {1, 2, 2}, rng);
    ++hits[panel[1]];
    ++hits[panel[2]];
  }
  const double p = 2.0 / 6.0;
  const double mean = trials * p;
  const double sd = std::sqrt(trials * p * (1 - p));
  for (int i = 0; i < 6; ++i) {
    const auto id = "j" + std::to_string(i);
    EXPECT_LT(std::fabs(hits[id] - mean), 5 * sd) << id << " " << hits[id];
  }
}

TEST(PanelRatings, OneRecordAndTransactionPerPanelist) {
  auto r = standard_roster();
  Fixed five(5.0), zero(0.0);
  const ProviderLookup lookup = [&](const Participant& p) -> RatingProvider* {
    return p.has_role(Role::AnalyzerDL) ? static_cast<RatingProvider*>(&zero) : &five;
  };
  const std::vector<ParticipantId> panel{"dl", "j0", "j1", "lx1", "lx2"};
  const ArticleTags tags = tagged({"x"});
  const ArticleView view{"art-1", "t", "b", &tags};
  TxBatch batch;
  const auto records = panel_ratings(panel, r.registry, view, lookup, 3, batch);
  ASSERT_EQ(records.size(), 5u);
  ASSERT_EQ(batch.size(), 5u);
  EXPECT_EQ(records[0].lambda, 0.0);
  EXPECT_EQ(records[1].lambda, 5.0);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(records[i].credibility_snapshot, 0.5);
    EXPECT_EQ(*batch[i].actor, panel[i]);
    EXPECT_EQ(batch[i].kind(), TxKind::AnalyzerRating);
    EXPECT_EQ(*batch[i].article_id, "art-1");
  }
}

TEST(PanelRatings, ProviderFailuresNameThePanelist) {
  auto r = standard_roster();
  Throwing broken;
  Fixed bad(7.0);
  const ArticleTags tags;
  const ArticleView view{"a", "", "", &tags};
  const std::vector<ParticipantId> panel{"j3"};
  for (const ProviderLookup& lookup :
       {ProviderLookup([](const Participant&) -> RatingProvider* { return nullptr; }),
        ProviderLookup([&](const Participant&) -> RatingProvider* { return &broken; }),
        ProviderLookup([&](const Participant&) -> RatingProvider* { return &bad; })}) {
    TxBatch batch;
    try {
      panel_ratings(panel, r.registry, view, lookup, 0, batch);
      FAIL();
    } catch (const ProtocolError& e) {
      EXPECT_EQ(e.code(), ErrorCode::ProviderFailure);
      EXPECT_NE(std::string(e.what()).find("j3"), std::string::npos);
    }
  }
}
