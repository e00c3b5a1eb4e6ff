#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "fractackle/harness.hpp"
#include "fractackle/ingest.hpp"
#include "test_support.hpp"

using namespace fractackle;
using testsupport::TempDir;
using testsupport::write_file;

namespace {

// A realized synthetic play converted back to raw (pre-standardization) form.
RawPlay raw_synthetic_play(std::uint64_t seed = 7) {
  Rng rng(seed);
  SyntheticPlaySpec spec = random_play_spec(rng, 1, 1);
  return testsupport::to_raw(realize(spec));
}

RawPlay flip_all(RawPlay play) {
  for (TrackingFrame& f : play.frames) f = flip_left_frame(f);
  return play;
}

PlayMeta synthetic_meta() {
  PlayMeta meta;
  meta.key = PlayKey{1, 1};
  meta.week = 1;
  meta.ballCarrierId = 101;
  meta.possessionTeam = "OFF";
  meta.defensiveTeam = "DEF";
  return meta;
}

}  // namespace

TEST_CASE("left flip matches the worked tracking row") {
  TrackingFrame f;
  f.playDirection = PlayDirection::Left;
  f.x = 93.30;
  f.y = 29.84;
  f.s = 5.29;
  f.dir = 287.75;
  f.o = 265.57;
  TrackingFrame g = flip_left_frame(f);
  CHECK(g.playDirection == PlayDirection::Right);
  CHECK_THAT(g.x, Catch::Matchers::WithinAbs(26.70, 1e-9));
  CHECK_THAT(g.y, Catch::Matchers::WithinAbs(160.0 / 3.0 - 29.84, 1e-9));
  CHECK_THAT(g.dir, Catch::Matchers::WithinAbs(107.75, 1e-9));
  CHECK_THAT(g.o, Catch::Matchers::WithinAbs(85.57, 1e-9));
  CHECK(g.s == f.s);
  CHECK(g.dis == f.dis);
}

TEST_CASE("left flip is an involution and preserves distances") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    TrackingFrame a;
    a.playDirection = PlayDirection::Left;
    a.x = rng.uniform(0.0, kFieldLength);
    a.y = rng.uniform(0.0, kFieldWidth);
    a.dir = rng.uniform(0.0, 360.0);
    a.o = rng.uniform(0.0, 360.0);
    TrackingFrame b;
    b.playDirection = PlayDirection::Left;
    b.x = rng.uniform(0.0, kFieldLength);
    b.y = rng.uniform(0.0, kFieldWidth);

    TrackingFrame a2 = flip_left_frame(flip_left_frame(a));
    CHECK_THAT(a2.x, Catch::Matchers::WithinAbs(a.x, 1e-9));
    CHECK_THAT(a2.y, Catch::Matchers::WithinAbs(a.y, 1e-9));
    double dirDelta = std::fmod(std::abs(a2.dir - a.dir), 360.0);
    CHECK((dirDelta < 1e-9 || std::abs(dirDelta - 360.0) < 1e-9));
    CHECK(a2.playDirection == PlayDirection::Left);

    double before = std::hypot(a.x - b.x, a.y - b.y);
    TrackingFrame fa = flip_left_frame(a);
    TrackingFrame fb = flip_left_frame(b);
    double after = std::hypot(fa.x - fb.x, fa.y - fb.y);
    CHECK_THAT(after, Catch::Matchers::WithinAbs(before, 1e-9));
  }
}

TEST_CASE("standardize leaves rightward plays untouched") {
  RawPlay raw = raw_synthetic_play();
  PlayMeta meta = synthetic_meta();
  std::vector<Reject> rejects;
  auto play = standardize(raw, meta, StandardizeOptions{}, rejects);
  REQUIRE(play.has_value());
  CHECK(rejects.empty());
  REQUIRE(play->frames.size() == raw.frames.size());
  // Same multiset of rows; standardize only reorders.
  for (const TrackingFrame& f : play->frames) {
    CHECK(f.playDirection == PlayDirection::Right);
  }
  CHECK(play->snapFrame == 1);
  CHECK(play->snapFrame <= play->endFrame);
}

TEST_CASE("standardize flips leftward plays and restores carrier monotonicity") {
  RawPlay right = raw_synthetic_play(23);
  // Force a strictly forward-running carrier so monotonicity is meaningful.
  Rng rng(23);
  SyntheticPlaySpec spec;
  spec.T = 30;
  spec.carrierVelocity = {{0, 2.0}, {29, 6.0}};
  DefenderScript d{201, "ILB", {{5, 8.0}, {10, 1.0}, {15, 8.0}}};
  spec.defenders = {d};
  plan(spec);
  right = testsupport::to_raw(realize(spec));

  RawPlay left = flip_all(right);
  // Carrier x is nonincreasing in the flipped play.
  std::vector<double> xs;
  for (const TrackingFrame& f : left.frames) {
    if (f.nflId == 101) xs.push_back(f.x);
  }
  for (std::size_t i = 1; i < xs.size(); ++i) CHECK(xs[i] <= xs[i - 1] + 1e-12);

  PlayMeta meta = synthetic_meta();
  std::vector<Reject> rejects;
  auto play = standardize(left, meta, StandardizeOptions{}, rejects);
  REQUIRE(play.has_value());
  std::vector<double> xsStd;
  for (const TrackingFrame& f : play->frames) {
    if (f.nflId == 101) xsStd.push_back(f.x);
  }
  for (std::size_t i = 1; i < xsStd.size(); ++i) CHECK(xsStd[i] >= xsStd[i - 1] - 1e-12);
  for (const TrackingFrame& f : play->frames) CHECK(f.playDirection == PlayDirection::Right);
}

TEST_CASE("standardize rejects structural violations") {
  PlayMeta meta = synthetic_meta();
  StandardizeOptions opts;

  SECTION("mixed playDirection") {
    RawPlay raw = raw_synthetic_play();
    raw.frames.back().playDirection = PlayDirection::Left;
    std::vector<Reject> rejects;
    CHECK_FALSE(standardize(raw, meta, opts, rejects).has_value());
    REQUIRE(rejects.size() == 1);
    CHECK(rejects[0].reason.find("mixed playDirection") != std::string::npos);
    CHECK(rejects[0].playKey == "1:1");
  }

  SECTION("missing ball_snap") {
    RawPlay raw = raw_synthetic_play();
    for (TrackingFrame& f : raw.frames) {
      if (f.event == "ball_snap") f.event.clear();
    }
    std::vector<Reject> rejects;
    CHECK_FALSE(standardize(raw, meta, opts, rejects).has_value());
    REQUIRE(rejects.size() == 1);
    CHECK(rejects[0].reason.find("ball_snap") != std::string::npos);
  }

  SECTION("missing end-of-play event") {
    RawPlay raw = raw_synthetic_play();
    for (TrackingFrame& f : raw.frames) {
      if (f.event == "tackle") f.event.clear();
    }
    std::vector<Reject> rejects;
    CHECK_FALSE(standardize(raw, meta, opts, rejects).has_value());
    REQUIRE(rejects.size() == 1);
    CHECK(rejects[0].reason.find("end-of-play") != std::string::npos);
  }

  SECTION("frame with fewer than 22 player records") {
    RawPlay raw = raw_synthetic_play();
    // Drop one defender row at the second frame.
    for (std::size_t i = 0; i < raw.frames.size(); ++i) {
      if (raw.frames[i].frameId == 2 && raw.frames[i].nflId == 240) {
        raw.frames.erase(raw.frames.begin() + static_cast<std::ptrdiff_t>(i));
        break;
      }
    }
    std::vector<Reject> rejects;
    CHECK_FALSE(standardize(raw, meta, opts, rejects).has_value());
    REQUIRE(rejects.size() == 1);
    CHECK(rejects[0].reason.find("expected 22") != std::string::npos);
  }

  SECTION("ball-carrier missing mid-play") {
    RawPlay raw = raw_synthetic_play();
    // Re-badge the carrier as an unused player at one mid frame: still 22
    // records, but the carrier is gone.
    for (TrackingFrame& f : raw.frames) {
      if (f.frameId == 3 && f.nflId == meta.ballCarrierId) {
        f.nflId = 9999;
        f.club = meta.possessionTeam;
        break;
      }
    }
    std::vector<Reject> rejects;
    CHECK_FALSE(standardize(raw, meta, opts, rejects).has_value());
    REQUIRE(rejects.size() == 1);
    CHECK(rejects[0].reason.find("ball-carrier missing") != std::string::npos);
  }
}

TEST_CASE("rush derivation from events and explicit designator") {
  PlayMeta meta = synthetic_meta();
  StandardizeOptions opts;
  std::vector<Reject> rejects;

  SECTION("handoff before any pass event marks a rush") {
    RawPlay raw = raw_synthetic_play();
    auto play = standardize(raw, meta, opts, rejects);
    REQUIRE(play.has_value());
    CHECK(play->meta.isRush);
  }

  SECTION("pass event first marks a pass play") {
    RawPlay raw = raw_synthetic_play();
    for (TrackingFrame& f : raw.frames) {
      if (f.event == "handoff") f.event = "pass_forward";
    }
    auto play = standardize(raw, meta, opts, rejects);
    REQUIRE(play.has_value());
    CHECK_FALSE(play->meta.isRush);
  }

  SECTION("no handoff and no pass marks a non-rush") {
    RawPlay raw = raw_synthetic_play();
    for (TrackingFrame& f : raw.frames) {
      if (f.event == "handoff") f.event.clear();
    }
    auto play = standardize(raw, meta, opts, rejects);
    REQUIRE(play.has_value());
    CHECK_FALSE(play->meta.isRush);
  }

  SECTION("explicit designator overrides the event derivation") {
    RawPlay raw = raw_synthetic_play();
    meta.explicitRush = false;
    auto play = standardize(raw, meta, opts, rejects);
    REQUIRE(play.has_value());
    CHECK_FALSE(play->meta.isRush);  // handoff present, metadata says no

    meta.explicitRush = true;
    for (TrackingFrame& f : raw.frames) {
      if (f.event == "handoff") f.event = "pass_forward";
    }
    play = standardize(raw, meta, opts, rejects);
    REQUIRE(play.has_value());
    CHECK(play->meta.isRush);
  }
}

TEST_CASE("filter_rb_runs keeps RB rushes only") {
  std::unordered_map<std::int32_t, PlayerMeta> players;
  players[101] = PlayerMeta{101, "Back One", "RB"};
  players[151] = PlayerMeta{151, "Back Two", "RB"};
  players[161] = PlayerMeta{161, "Scrambler", "QB"};

  StandardizeOptions opts;
  std::vector<Reject> rejects;
  std::vector<StandardizedPlay> plays;

  auto add_play = [&](std::int32_t playId, std::int32_t carrierId, bool stripHandoff,
                      bool makePass) {
    Rng rng(static_cast<std::uint64_t>(playId));
    SyntheticPlaySpec spec = random_play_spec(rng, 1, playId);
    spec.ballCarrierId = carrierId;
    StandardizedPlay realized = realize(spec);
    RawPlay raw = testsupport::to_raw(realized);
    for (TrackingFrame& f : raw.frames) {
      if (stripHandoff && f.event == "handoff") f.event.clear();
      if (makePass && f.event == "handoff") f.event = "pass_forward";
    }
    PlayMeta meta = synthetic_meta();
    meta.key = raw.key;
    meta.ballCarrierId = carrierId;
    auto play = standardize(raw, meta, opts, rejects);
    REQUIRE(play.has_value());
    plays.push_back(std::move(*play));
  };

  add_play(1, 101, false, false);  // RB rush
  add_play(2, 151, false, false);  // RB rush
  add_play(3, 161, true, false);   // QB scramble: no handoff
  add_play(4, 101, false, true);   // RB pass target

  auto kept = filter_rb_runs(std::move(plays), players, rejects);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].meta.key.playId == 1);
  CHECK(kept[1].meta.key.playId == 2);
  CHECK(rejects.empty());

  SECTION("empty when nothing is a rush") {
    std::vector<StandardizedPlay> none;
    auto out = filter_rb_runs(std::move(none), players, rejects);
    CHECK(out.empty());
  }
}

namespace {

const char* kGames = "gameId,week\n1,1\n";
const char* kPlayers =
    "nflId,displayName,position\n101,Back One,RB\n201,Stopper,ILB\n";
const char* kTackles = "gameId,playId,nflId,tackle,assist,forcedFumble\n1,1,201,1,0,0\n";
const char* kTrackingHeader =
    "gameId,playId,nflId,frameId,club,playDirection,x,y,s,a,dis,o,dir,event\n";

void write_base(const TempDir& dir, const std::string& tracking,
                const std::string& plays = "gameId,playId,ballCarrierId,possessionTeam,"
                                           "defensiveTeam\n1,1,101,OFF,DEF\n") {
  write_file(dir.path() / "games.csv", kGames);
  write_file(dir.path() / "players.csv", kPlayers);
  write_file(dir.path() / "plays.csv", plays);
  write_file(dir.path() / "tackles.csv", kTackles);
  write_file(dir.path() / "tracking_week_1.csv", tracking);
}

}  // namespace

TEST_CASE("load_dataset happy path and counts") {
  TempDir dir;
  std::string tracking = kTrackingHeader;
  tracking += "1,1,101,1,OFF,right,50.0,25.0,5.0,0.1,0.5,90.0,90.0,ball_snap\n";
  tracking += "1,1,201,1,DEF,right,55.0,25.0,2.0,0.1,0.2,270.0,270.0,ball_snap\n";
  tracking += "1,1,,1,football,right,50.0,25.0,5.0,0.1,0.5,NA,NA,ball_snap\n";
  write_base(dir, tracking);

  Dataset ds = load_dataset(dir.path(), {1});
  CHECK(ds.games.size() == 1);
  CHECK(ds.plays.size() == 1);
  CHECK(ds.players.size() == 2);
  CHECK(ds.boxscores.size() == 1);
  REQUIRE(ds.rawPlays.size() == 1);
  CHECK(ds.rawPlays[0].frames.size() == 3);
  CHECK(ds.rejects.empty());
  const FileCounts& counts = ds.counts.at("tracking_week_1.csv");
  CHECK(counts.total == 3);
  CHECK(counts.accepted == 3);
  CHECK(counts.rejected == 0);
  // Ball row parsed with the sentinel id.
  bool sawBall = false;
  for (const TrackingFrame& f : ds.rawPlays[0].frames) {
    if (f.nflId == kBallId) sawBall = true;
  }
  CHECK(sawBall);
}

TEST_CASE("load_dataset rejects malformed and duplicate rows") {
  TempDir dir;
  std::string tracking = kTrackingHeader;
  tracking += "1,1,101,1,OFF,right,50.0,25.0,5.0,0.1,0.5,90.0,90.0,\n";
  tracking += "1,1,101,2,OFF,right,bogus,25.0,5.0,0.1,0.5,90.0,90.0,\n";   // malformed x
  tracking += "1,1,101,3,OFF,right,50.0,25.0,5.0,0.1,0.5,90.0,90.0,\n";
  tracking += "1,1,101,3,OFF,right,51.0,25.0,5.0,0.1,0.5,90.0,90.0,\n";    // duplicate key
  tracking += "1,1,101,4,OFF,sideways,50.0,25.0,5.0,0.1,0.5,90.0,90.0,\n"; // bad direction
  tracking += "1,1,101,5,OFF,right,150.0,25.0,5.0,0.1,0.5,90.0,90.0,\n";   // out of bounds
  tracking += "1,1,101,6,OFF,right,50.0,25.0,-1.0,0.1,0.5,90.0,90.0,\n";   // negative speed
  write_base(dir, tracking);

  Dataset ds = load_dataset(dir.path(), {1});
  const FileCounts& counts = ds.counts.at("tracking_week_1.csv");
  CHECK(counts.total == 7);
  CHECK(counts.accepted == 2);
  CHECK(counts.rejected == 5);
  CHECK(counts.accepted + counts.rejected == counts.total);
  REQUIRE(ds.rejects.size() == 5);
  CHECK(ds.rejects[0].file.find("tracking_week_1.csv") != std::string::npos);
  CHECK(ds.rejects[0].line == 3);
  CHECK(ds.rejects[0].reason.find("'x'") != std::string::npos);
  CHECK(ds.rejects[1].reason.find("duplicate key") != std::string::npos);
}

TEST_CASE("load_dataset three-play fixture with one malformed cell") {
  TempDir dir;
  std::string plays =
      "gameId,playId,ballCarrierId,possessionTeam,defensiveTeam\n"
      "1,1,101,OFF,DEF\n1,2,101,OFF,DEF\n1,3,101,OFF,DEF\n";
  std::string tracking = kTrackingHeader;
  for (int play = 1; play <= 2; ++play) {
    for (int fid = 1; fid <= 2; ++fid) {
      tracking += "1," + std::to_string(play) + ",101," + std::to_string(fid) +
                  ",OFF,right,50.0,25.0,5.0,0.1,0.5,90.0,90.0,\n";
    }
  }
  tracking += "1,3,101,1,OFF,right,not_a_number,25.0,5.0,0.1,0.5,90.0,90.0,\n";
  write_base(dir, tracking, plays);

  Dataset ds = load_dataset(dir.path(), {1});
  CHECK(ds.plays.size() == 3);
  std::size_t framesLoaded = 0;
  for (const RawPlay& p : ds.rawPlays) framesLoaded += p.frames.size();
  CHECK(framesLoaded == 4);  // two accepted plays' worth
  REQUIRE(ds.rejects.size() == 1);
  CHECK(ds.rejects[0].line == 6);
}

TEST_CASE("load_dataset empty tracking file yields no frames and no rejects") {
  TempDir dir;
  write_base(dir, kTrackingHeader);
  Dataset ds = load_dataset(dir.path(), {1});
  CHECK(ds.rawPlays.empty());
  CHECK(ds.rejects.empty());
  CHECK(ds.counts.at("tracking_week_1.csv").total == 0);
}

TEST_CASE("load_dataset fatal errors") {
  SECTION("missing file") {
    TempDir dir;
    write_file(dir.path() / "games.csv", kGames);
    CHECK_THROWS_AS(load_dataset(dir.path(), {1}), DataError);
  }
  SECTION("missing required column") {
    TempDir dir;
    write_base(dir, kTrackingHeader);
    write_file(dir.path() / "plays.csv", "gameId,playId\n1,1\n");  // missing columns
    CHECK_THROWS_AS(load_dataset(dir.path(), {1}), DataError);
  }
  SECTION("week out of range") {
    TempDir dir;
    write_base(dir, kTrackingHeader);
    CHECK_THROWS_AS(load_dataset(dir.path(), {12}), DataError);
  }
}

TEST_CASE("load_dataset rejects bad play metadata rows") {
  TempDir dir;
  std::string plays =
      "gameId,playId,ballCarrierId,possessionTeam,defensiveTeam\n"
      "1,1,101,OFF,DEF\n"
      "1,2,101,OFF,OFF\n"    // possession == defense
      "2,3,101,OFF,DEF\n"    // unknown gameId
      "1,1,101,OFF,DEF\n";   // duplicate key
  write_base(dir, kTrackingHeader, plays);
  Dataset ds = load_dataset(dir.path(), {1});
  CHECK(ds.plays.size() == 1);
  CHECK(ds.counts.at("plays.csv").rejected == 3);
}

TEST_CASE("orphan tracking play is logged, never silently dropped") {
  StandardizeOptions opts;
  Dataset ds;
  ds.rawPlays.push_back(RawPlay{PlayKey{9, 9}, {}});
  std::vector<Reject> rejects;
  auto plays = standardize_all(ds, opts, rejects);
  CHECK(plays.empty());
  REQUIRE(rejects.size() == 1);
  CHECK(rejects[0].reason.find("metadata missing") != std::string::npos);
  CHECK(rejects[0].playKey == "9:9");
}
