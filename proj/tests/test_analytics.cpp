#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "fractackle/analytics.hpp"
#include "fractackle/harness.hpp"

using namespace fractackle;
using Catch::Matchers::WithinAbs;

namespace {

PlayerWindowCredit credit(PlayKey key, int window, std::int32_t id, double w, int frames) {
  PlayerWindowCredit c;
  c.key = key;
  c.windowIndex = window;
  c.defenderId = id;
  c.wPlayer = w;
  c.framesInvolved = frames;
  return c;
}

std::unordered_map<std::int32_t, PlayerMeta> roster() {
  std::unordered_map<std::int32_t, PlayerMeta> players;
  players[1] = PlayerMeta{1, "Lineman One", "DT"};
  players[2] = PlayerMeta{2, "Backer Two", "ILB"};
  players[3] = PlayerMeta{3, "Corner Three", "CB"};
  return players;
}

}  // namespace

TEST_CASE("aggregate folds plays, windows and box scores") {
  PlayKey p1{1, 1}, p2{1, 2}, p3{1, 3};
  std::vector<PlayCredits> plays = {
      {p1, {1, 2}, {credit(p1, 1, 1, 0.2, 3), credit(p1, 2, 1, 0.1, 2), credit(p1, 2, 2, 0.1, 2)}},
      {p2, {1, 2}, {credit(p2, 1, 2, 0.3, 4)}},
      {p3, {2, 3}, {}},
  };
  std::vector<BoxScore> box = {
      {p1, 1, 1, 0, 0, 0},
      {p2, 2, 0, 1, 0, 1},
      {PlayKey{9, 9}, 1, 1, 0, 0, 0},  // outside the filtered set: ignored
  };

  auto aggregates = aggregate(plays, box, roster());
  REQUIRE(aggregates.size() == 3);

  // Sorted by totalFT descending: player 2 (0.4), player 1 (0.3), player 3.
  CHECK(aggregates[0].defenderId == 2);
  CHECK_THAT(aggregates[0].totalFT, WithinAbs(0.4, 1e-12));
  CHECK(aggregates[0].plays == 3);
  CHECK(aggregates[0].windows == 2);
  CHECK_THAT(aggregates[0].avgFT, WithinAbs(0.4 / 3.0, 1e-12));
  CHECK(aggregates[0].assists == 1);
  CHECK(aggregates[0].missedTackles == 1);
  CHECK_THAT(aggregates[0].combined_tackles(), WithinAbs(0.5, 1e-12));

  CHECK(aggregates[1].defenderId == 1);
  CHECK_THAT(aggregates[1].totalFT, WithinAbs(0.3, 1e-12));
  CHECK(aggregates[1].plays == 1);
  CHECK(aggregates[1].windows == 2);
  CHECK(aggregates[1].tackles == 1);

  CHECK(aggregates[2].defenderId == 3);
  CHECK(aggregates[2].totalFT == 0.0);
  CHECK(aggregates[2].plays == 1);
  CHECK(aggregates[2].windows == 0);

  // Brute-force re-summation oracle.
  double grand = 0.0;
  for (const PlayCredits& pc : plays) {
    for (const PlayerWindowCredit& c : pc.credits) grand += c.wPlayer;
  }
  double total = 0.0;
  for (const PlayerAggregate& a : aggregates) total += a.totalFT;
  CHECK_THAT(total, WithinAbs(grand, 1e-9));

  for (const PlayerAggregate& a : aggregates) {
    CHECK(a.totalFT >= 0.0);
    CHECK_THAT(a.avgFT * static_cast<double>(a.plays), WithinAbs(a.totalFT, 1e-9));
  }
}

TEST_CASE("aggregate join integrity is fatal") {
  PlayKey p1{1, 1};
  SECTION("credit for a defender off the play's defense") {
    std::vector<PlayCredits> plays = {{p1, {1}, {credit(p1, 1, 2, 0.2, 1)}}};
    CHECK_THROWS_AS(aggregate(plays, {}, roster()), DataError);
  }
  SECTION("defender unknown to players.csv") {
    std::vector<PlayCredits> plays = {{p1, {77}, {credit(p1, 1, 77, 0.2, 1)}}};
    CHECK_THROWS_AS(aggregate(plays, {}, roster()), DataError);
  }
}

TEST_CASE("single play single defender aggregate") {
  PlayKey p{2, 5};
  std::vector<PlayCredits> plays = {{p, {1}, {credit(p, 1, 1, 0.3, 2)}}};
  auto aggregates = aggregate(plays, {}, roster());
  REQUIRE(aggregates.size() == 1);
  CHECK_THAT(aggregates[0].totalFT, WithinAbs(0.3, 1e-12));
  CHECK_THAT(aggregates[0].avgFT, WithinAbs(0.3, 1e-12));
}

TEST_CASE("window summaries") {
  SECTION("derived mean over {3, 7, 10} frames") {
    std::vector<std::vector<ContactWindow>> perPlay(1);
    for (int frames : {3, 7, 10}) {
      ContactWindow w;
      w.frameCount = frames;
      w.perFrameDefenders.assign(static_cast<std::size_t>(frames), {1});
      perPlay[0].push_back(w);
    }
    WindowSummary s = window_summaries(perPlay);
    CHECK(s.totalWindows == 3);
    CHECK_THAT(s.meanDurationSeconds, WithinAbs(2.0 / 3.0, 1e-9));
    CHECK(s.windowsPerPlay.at(3) == 1);
    CHECK(s.defendersPerWindow.at(1) == 3);
  }
  SECTION("one ten-frame window lasts a second") {
    std::vector<std::vector<ContactWindow>> perPlay(1);
    ContactWindow w;
    w.frameCount = 10;
    w.perFrameDefenders.assign(10, {1, 2});
    perPlay[0].push_back(w);
    WindowSummary s = window_summaries(perPlay);
    CHECK_THAT(s.meanDurationSeconds, WithinAbs(1.0, 1e-12));
    CHECK(s.defendersPerWindow.at(2) == 1);
  }
}

TEST_CASE("pearson correlation golden") {
  std::vector<double> xs{1, 2, 3, 4, 5};
  std::vector<double> ys{2, 4, 5, 4, 5};
  CorrelationReport r = correlate(xs, ys, "golden");
  CHECK_THAT(r.r, WithinAbs(0.7745966692414834, 1e-9));
  CHECK(r.n == 5);
  CHECK(r.ciLow < r.r);
  CHECK(r.ciHigh > r.r);
  CHECK(r.ciLow >= -1.0);
  CHECK(r.ciHigh <= 1.0);
}

TEST_CASE("perfect correlation degenerates cleanly") {
  std::vector<double> xs{1, 2, 3, 4, 5};
  CorrelationReport r = correlate(xs, xs);
  CHECK(r.r == 1.0);
  CHECK(r.ciLow == 1.0);
  CHECK(r.ciHigh == 1.0);
}

TEST_CASE("correlation errors") {
  std::vector<double> flat{2, 2, 2, 2};
  std::vector<double> ys{1, 2, 3, 4};
  CHECK_THROWS_AS(correlate(flat, ys), DataError);
  CHECK_THROWS_AS(correlate(ys, flat), DataError);
  std::vector<double> three{1, 2, 3};
  CHECK_THROWS_AS(correlate(three, three), DataError);
  std::vector<double> mismatched{1, 2, 3, 4, 5};
  CHECK_THROWS_AS(correlate(mismatched, ys), DataError);
}

TEST_CASE("fisher interval at n=403 and r=0") {
  // Orthogonal sin/cos design: r vanishes, so the half-width is the analytic
  // tanh(1.96 / sqrt(400)).
  const std::size_t n = 403;
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    xs[i] = std::cos(a);
    ys[i] = std::sin(a);
  }
  CorrelationReport r = correlate(xs, ys);
  CHECK_THAT(r.r, WithinAbs(0.0, 1e-10));
  CHECK_THAT(r.ciHigh, WithinAbs(std::tanh(1.96 / 20.0), 1e-6));
  CHECK_THAT(r.ciLow, WithinAbs(-std::tanh(1.96 / 20.0), 1e-6));
  CHECK_THAT(r.ciHigh, WithinAbs(0.0977, 1e-3));
}

TEST_CASE("correlation is invariant to positive affine transforms") {
  Rng rng(12);
  std::vector<double> xs, ys;
  for (int i = 0; i < 50; ++i) {
    xs.push_back(rng.uniform(0.0, 10.0));
    ys.push_back(0.7 * xs.back() + rng.uniform(-2.0, 2.0));
  }
  double base = correlate(xs, ys).r;
  std::vector<double> xs2 = xs, ys2 = ys;
  for (double& v : xs2) v = 3.5 * v + 11.0;
  for (double& v : ys2) v = 0.25 * v - 4.0;
  CHECK_THAT(correlate(xs2, ys).r, WithinAbs(base, 1e-9));
  CHECK_THAT(correlate(xs, ys2).r, WithinAbs(base, 1e-9));
  CHECK_THAT(correlate(xs2, ys2).r, WithinAbs(base, 1e-9));
}

namespace {

PlayerAggregate make_agg(std::int32_t id, const char* pos, double totalFT, std::int64_t tackles,
                         std::int64_t assists) {
  PlayerAggregate a;
  a.defenderId = id;
  a.displayName = "P" + std::to_string(id);
  a.position = pos;
  a.plays = 10;
  a.totalFT = totalFT;
  a.avgFT = totalFT / 10.0;
  a.tackles = tackles;
  a.assists = assists;
  return a;
}

}  // namespace

TEST_CASE("position groups") {
  CHECK(position_group("CB") == PositionGroup::DefensiveBacks);
  CHECK(position_group("FS") == PositionGroup::DefensiveBacks);
  CHECK(position_group("SS") == PositionGroup::DefensiveBacks);
  CHECK(position_group("DB") == PositionGroup::DefensiveBacks);
  CHECK(position_group("DT") == PositionGroup::DefensiveLine);
  CHECK(position_group("DE") == PositionGroup::DefensiveLine);
  CHECK(position_group("NT") == PositionGroup::DefensiveLine);
  CHECK(position_group("ILB") == PositionGroup::Linebackers);
  CHECK(position_group("OLB") == PositionGroup::Linebackers);
  CHECK(position_group("MLB") == PositionGroup::Linebackers);
  CHECK(position_group("LB") == PositionGroup::Linebackers);
  CHECK(position_group("RB") == PositionGroup::Other);
}

TEST_CASE("stability on identical periods is perfect in every group") {
  std::vector<PlayerAggregate> period;
  const char* positions[] = {"CB", "FS", "SS", "DB", "DT", "DE", "NT", "DT",
                             "ILB", "OLB", "MLB", "LB"};
  Rng rng(9);
  for (int i = 0; i < 12; ++i) {
    period.push_back(make_agg(i + 1, positions[i], rng.uniform(1.0, 20.0),
                              rng.uniform_int(0, 10), rng.uniform_int(0, 6)));
  }
  StabilityReport rep = stability(period, period);
  REQUIRE(rep.fractional.size() == 4);
  REQUIRE(rep.combined.size() == 4);
  for (const CorrelationReport& r : rep.fractional) CHECK_THAT(r.r, WithinAbs(1.0, 1e-9));
  for (const CorrelationReport& r : rep.combined) CHECK_THAT(r.r, WithinAbs(1.0, 1e-9));
  CHECK(rep.fractional[0].label == "fractionalTackles/overall");
}

TEST_CASE("stability zero-fills players absent from one period") {
  std::vector<PlayerAggregate> a, b;
  const char* positions[] = {"CB", "FS", "SS", "DB", "CB"};
  for (int i = 0; i < 5; ++i) {
    a.push_back(make_agg(i + 1, positions[i], 2.0 + i, 2, 0));
    if (i < 4) b.push_back(make_agg(i + 1, positions[i], 1.0 + i, 1, 2));
  }
  StabilityReport rep = stability(a, b);
  REQUIRE(rep.rows.size() == 5);
  const StabilityRow& last = rep.rows.back();
  CHECK(last.defenderId == 5);
  CHECK_THAT(last.ftA, WithinAbs(6.0, 1e-12));
  CHECK(last.ftB == 0.0);
  CHECK(last.ctB == 0.0);
}

TEST_CASE("stability residualization removes group means per period") {
  std::vector<PlayerAggregate> a, b;
  double ftsA[] = {1.0, 2.0, 3.0, 4.0};
  double ftsB[] = {2.0, 3.0, 5.0, 6.0};
  for (int i = 0; i < 4; ++i) {
    a.push_back(make_agg(i + 1, "DT", ftsA[i], 1, 0));
    b.push_back(make_agg(i + 1, "DE", ftsB[i], 1, 0));
  }
  // Same ids must keep one group; use DT for both periods.
  for (auto& agg : b) agg.position = "DT";
  StabilityReport rep = stability(a, b);
  double meanA = (1.0 + 2.0 + 3.0 + 4.0) / 4.0;
  double meanB = (2.0 + 3.0 + 5.0 + 6.0) / 4.0;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    CHECK_THAT(rep.rows[i].ftResidualA, WithinAbs(ftsA[i] - meanA, 1e-12));
    CHECK_THAT(rep.rows[i].ftResidualB, WithinAbs(ftsB[i] - meanB, 1e-12));
  }
  // Residualizing does not change the within-group correlation.
  std::vector<double> xs(ftsA, ftsA + 4), ys(ftsB, ftsB + 4);
  CHECK_THAT(rep.fractional[2].r, WithinAbs(correlate(xs, ys).r, 1e-12));
}

TEST_CASE("leaderboard order ignores uniform positive rescaling") {
  PlayKey p1{1, 1}, p2{1, 2};
  std::vector<PlayCredits> plays = {
      {p1, {1, 2, 3}, {credit(p1, 1, 1, 0.25, 2), credit(p1, 1, 2, 0.5, 2)}},
      {p2, {1, 2, 3}, {credit(p2, 1, 3, 0.4, 1), credit(p2, 2, 1, 0.3, 1)}},
  };
  auto base = aggregate(plays, {}, roster());
  for (PlayCredits& pc : plays) {
    for (PlayerWindowCredit& c : pc.credits) c.wPlayer *= 7.5;
  }
  auto scaled = aggregate(plays, {}, roster());
  REQUIRE(base.size() == scaled.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(base[i].defenderId == scaled[i].defenderId);
  }
}
