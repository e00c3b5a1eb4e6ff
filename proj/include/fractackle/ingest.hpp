#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fractackle/csv.hpp"
#include "fractackle/types.hpp"

namespace fractackle {

struct FileCounts {
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;
  std::int64_t total = 0;  // data rows, header excluded
};

struct GameMeta {
  std::int64_t gameId = 0;
  int week = 0;
};

struct Dataset {
  std::map<std::int64_t, GameMeta> games;
  std::vector<PlayMeta> plays;                       // sorted by key
  std::unordered_map<std::int32_t, PlayerMeta> players;
  std::vector<BoxScore> boxscores;
  std::vector<RawPlay> rawPlays;                     // sorted by key
  std::vector<Reject> rejects;
  std::map<std::string, FileCounts> counts;          // per input file

  const PlayMeta* find_play(const PlayKey& key) const {
    auto it = std::lower_bound(plays.begin(), plays.end(), key,
                               [](const PlayMeta& p, const PlayKey& k) { return p.key < k; });
    if (it == plays.end() || !(it->key == key)) return nullptr;
    return &*it;
  }
};

// End-of-play event labels; the first occurrence at/after the snap closes the
// ball-carrier sequence. Configurable because the source data is not uniform.
struct StandardizeOptions {
  std::set<std::string, std::less<>> endEvents = {
      "tackle", "out_of_bounds", "touchdown", "fumble", "qb_slide", "safety"};
};

namespace detail {

inline bool is_pass_event(std::string_view event) {
  return event.rfind("pass", 0) == 0;  // pass_forward, pass_arrived, ...
}

inline double wrap_degrees(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  return r;
}

}  // namespace detail

// The left-branch coordinate/angle flip. Applying it twice is an involution
// up to the 360-degree wrap.
inline TrackingFrame flip_left_frame(TrackingFrame f) {
  f.x = kFieldLength - f.x;
  f.y = kFieldWidth - f.y;
  f.dir = detail::wrap_degrees(f.dir + 180.0);
  f.o = detail::wrap_degrees(f.o + 180.0);
  f.playDirection = f.playDirection == PlayDirection::Left ? PlayDirection::Right
                                                           : PlayDirection::Left;
  return f;
}

namespace detail {

struct RowContext {
  const std::string& file;
  std::int64_t line;
  std::vector<Reject>& rejects;
  FileCounts& counts;

  void reject(std::string reason) {
    rejects.push_back(Reject{file, line, "", std::move(reason)});
    ++counts.rejected;
  }
};

inline bool field_double(RowContext& ctx, std::string_view cell, const char* col, double& out) {
  if (!parse_double(cell, out)) {
    ctx.reject(std::string("malformed numeric cell '") + col + "'");
    return false;
  }
  return true;
}

}  // namespace detail

inline void load_games(const std::string& path, Dataset& ds) {
  CsvReader csv = CsvReader::open(path);
  const std::size_t cGame = csv.column("gameId");
  const std::size_t cWeek = csv.column("week");
  FileCounts& counts = ds.counts["games.csv"];
  std::vector<std::string_view> row;
  while (csv.next(row)) {
    ++counts.total;
    detail::RowContext ctx{path, csv.line(), ds.rejects, counts};
    GameMeta g;
    std::int64_t week = 0;
    if (!parse_i64(row[cGame], g.gameId)) { ctx.reject("malformed numeric cell 'gameId'"); continue; }
    if (!parse_i64(row[cWeek], week) || week < 1 || week > 9) {
      ctx.reject("malformed 'week' (expected 1-9)");
      continue;
    }
    g.week = static_cast<int>(week);
    if (!ds.games.emplace(g.gameId, g).second) { ctx.reject("duplicate key gameId"); continue; }
    ++counts.accepted;
  }
}

inline void load_players(const std::string& path, Dataset& ds) {
  CsvReader csv = CsvReader::open(path);
  const std::size_t cId = csv.column("nflId");
  const std::size_t cName = csv.column("displayName");
  const std::size_t cPos = csv.column("position");
  FileCounts& counts = ds.counts["players.csv"];
  std::vector<std::string_view> row;
  while (csv.next(row)) {
    ++counts.total;
    detail::RowContext ctx{path, csv.line(), ds.rejects, counts};
    PlayerMeta p;
    if (!parse_i32(row[cId], p.nflId)) { ctx.reject("malformed numeric cell 'nflId'"); continue; }
    p.displayName = std::string(row[cName]);
    p.position = std::string(row[cPos]);
    if (!ds.players.emplace(p.nflId, p).second) { ctx.reject("duplicate key nflId"); continue; }
    ++counts.accepted;
  }
}

inline void load_plays(const std::string& path, Dataset& ds) {
  CsvReader csv = CsvReader::open(path);
  const std::size_t cGame = csv.column("gameId");
  const std::size_t cPlay = csv.column("playId");
  const std::size_t cCarrier = csv.column("ballCarrierId");
  const std::size_t cPoss = csv.column("possessionTeam");
  const std::size_t cDef = csv.column("defensiveTeam");
  std::optional<std::size_t> cRush;
  if (csv.has_column("isRush")) cRush = csv.column("isRush");
  std::optional<std::size_t> cDesc;
  if (csv.has_column("playDescription")) cDesc = csv.column("playDescription");
  else if (csv.has_column("description")) cDesc = csv.column("description");

  FileCounts& counts = ds.counts["plays.csv"];
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::string_view> row;
  while (csv.next(row)) {
    ++counts.total;
    detail::RowContext ctx{path, csv.line(), ds.rejects, counts};
    PlayMeta p;
    if (!parse_i64(row[cGame], p.key.gameId)) { ctx.reject("malformed numeric cell 'gameId'"); continue; }
    if (!parse_i32(row[cPlay], p.key.playId)) { ctx.reject("malformed numeric cell 'playId'"); continue; }
    if (!parse_i32(row[cCarrier], p.ballCarrierId)) { ctx.reject("malformed numeric cell 'ballCarrierId'"); continue; }
    p.possessionTeam = std::string(row[cPoss]);
    p.defensiveTeam = std::string(row[cDef]);
    if (p.possessionTeam.empty() || p.defensiveTeam.empty()) { ctx.reject("empty team code"); continue; }
    if (p.possessionTeam == p.defensiveTeam) { ctx.reject("possessionTeam equals defensiveTeam"); continue; }
    if (cRush) {
      bool v = false;
      if (!std::string_view(row[*cRush]).empty()) {
        if (!parse_bool(row[*cRush], v)) { ctx.reject("malformed 'isRush'"); continue; }
        p.explicitRush = v;
      }
    }
    if (cDesc) p.description = std::string(row[*cDesc]);
    auto game = ds.games.find(p.key.gameId);
    if (game == ds.games.end()) { ctx.reject("gameId not present in games.csv"); continue; }
    p.week = game->second.week;
    std::uint64_t dedup = (static_cast<std::uint64_t>(p.key.gameId) << 16) ^
                          static_cast<std::uint32_t>(p.key.playId);
    if (!seen.insert(dedup).second) { ctx.reject("duplicate key (gameId, playId)"); continue; }
    ds.plays.push_back(std::move(p));
    ++counts.accepted;
  }
  std::sort(ds.plays.begin(), ds.plays.end(),
            [](const PlayMeta& a, const PlayMeta& b) { return a.key < b.key; });
}

inline void load_tackles(const std::string& path, Dataset& ds) {
  CsvReader csv = CsvReader::open(path);
  const std::size_t cGame = csv.column("gameId");
  const std::size_t cPlay = csv.column("playId");
  const std::size_t cId = csv.column("nflId");
  const std::size_t cTackle = csv.column("tackle");
  const std::size_t cAssist = csv.column("assist");
  const std::size_t cFF = csv.column("forcedFumble");
  std::optional<std::size_t> cMissed;
  if (csv.has_column("pff_missedTackle")) cMissed = csv.column("pff_missedTackle");
  else if (csv.has_column("missedTackle")) cMissed = csv.column("missedTackle");

  FileCounts& counts = ds.counts["tackles.csv"];
  std::unordered_set<std::string> seen;
  std::vector<std::string_view> row;
  while (csv.next(row)) {
    ++counts.total;
    detail::RowContext ctx{path, csv.line(), ds.rejects, counts};
    BoxScore b;
    if (!parse_i64(row[cGame], b.key.gameId)) { ctx.reject("malformed numeric cell 'gameId'"); continue; }
    if (!parse_i32(row[cPlay], b.key.playId)) { ctx.reject("malformed numeric cell 'playId'"); continue; }
    if (!parse_i32(row[cId], b.nflId)) { ctx.reject("malformed numeric cell 'nflId'"); continue; }
    if (!parse_binary(row[cTackle], b.tackle)) { ctx.reject("non-binary 'tackle'"); continue; }
    if (!parse_binary(row[cAssist], b.assist)) { ctx.reject("non-binary 'assist'"); continue; }
    if (!parse_binary(row[cFF], b.forcedFumble)) { ctx.reject("non-binary 'forcedFumble'"); continue; }
    if (cMissed && !std::string_view(row[*cMissed]).empty()) {
      if (!parse_binary(row[*cMissed], b.missedTackle)) { ctx.reject("non-binary missed-tackle cell"); continue; }
    }
    std::string dedup = to_string(b.key) + ":" + std::to_string(b.nflId);
    if (!seen.insert(dedup).second) { ctx.reject("duplicate key (gameId, playId, nflId)"); continue; }
    ds.boxscores.push_back(b);
    ++counts.accepted;
  }
}

inline void load_tracking(const std::string& path, const std::string& shortName, Dataset& ds) {
  CsvReader csv = CsvReader::open(path);
  const std::size_t cGame = csv.column("gameId");
  const std::size_t cPlay = csv.column("playId");
  const std::size_t cId = csv.column("nflId");
  const std::size_t cFrame = csv.column("frameId");
  const std::size_t cClub = csv.column("club");
  const std::size_t cDir0 = csv.column("playDirection");
  const std::size_t cX = csv.column("x");
  const std::size_t cY = csv.column("y");
  const std::size_t cS = csv.column("s");
  const std::size_t cA = csv.column("a");
  const std::size_t cDis = csv.column("dis");
  const std::size_t cO = csv.column("o");
  const std::size_t cDir = csv.column("dir");
  const std::size_t cEvent = csv.column("event");

  FileCounts& counts = ds.counts[shortName];
  // Duplicate (gameId, playId, nflId, frameId) detection.
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(1 << 20);
  std::vector<std::string_view> row;
  std::vector<TrackingFrame>* current = nullptr;
  PlayKey currentKey{-1, -1};
  std::unordered_map<std::uint64_t, std::size_t> playIndex;

  auto play_slot = [&](const PlayKey& key) -> std::vector<TrackingFrame>& {
    std::uint64_t h = (static_cast<std::uint64_t>(key.gameId) << 16) ^
                      static_cast<std::uint32_t>(key.playId);
    auto [it, inserted] = playIndex.emplace(h, ds.rawPlays.size());
    if (inserted) ds.rawPlays.push_back(RawPlay{key, {}});
    return ds.rawPlays[it->second].frames;
  };

  while (csv.next(row)) {
    ++counts.total;
    detail::RowContext ctx{path, csv.line(), ds.rejects, counts};
    TrackingFrame f;
    if (!parse_i64(row[cGame], f.gameId)) { ctx.reject("malformed numeric cell 'gameId'"); continue; }
    if (!parse_i32(row[cPlay], f.playId)) { ctx.reject("malformed numeric cell 'playId'"); continue; }
    if (row[cId].empty() || row[cId] == "NA") {
      f.nflId = kBallId;
    } else if (!parse_i32(row[cId], f.nflId) || f.nflId == kBallId) {
      ctx.reject("malformed numeric cell 'nflId'");
      continue;
    }
    if (!parse_i32(row[cFrame], f.frameId) || f.frameId <= 0) {
      ctx.reject("malformed 'frameId' (expected positive integer)");
      continue;
    }
    f.club = std::string(row[cClub]);
    if (row[cDir0] == "left") f.playDirection = PlayDirection::Left;
    else if (row[cDir0] == "right") f.playDirection = PlayDirection::Right;
    else { ctx.reject("malformed 'playDirection'"); continue; }
    if (!detail::field_double(ctx, row[cX], "x", f.x)) continue;
    if (!detail::field_double(ctx, row[cY], "y", f.y)) continue;
    if (!detail::field_double(ctx, row[cS], "s", f.s)) continue;
    if (!detail::field_double(ctx, row[cA], "a", f.a)) continue;
    if (!detail::field_double(ctx, row[cDis], "dis", f.dis)) continue;
    // The ball record ships without orientation/direction.
    bool ballAngles = f.nflId == kBallId && (row[cO].empty() || row[cO] == "NA") &&
                      (row[cDir].empty() || row[cDir] == "NA");
    if (ballAngles) {
      f.o = 0.0;
      f.dir = 0.0;
    } else {
      if (!detail::field_double(ctx, row[cO], "o", f.o)) continue;
      if (!detail::field_double(ctx, row[cDir], "dir", f.dir)) continue;
    }
    if (f.x < 0.0 || f.x > kFieldLength) { ctx.reject("x outside field bounds"); continue; }
    if (f.y < 0.0 || f.y > kFieldWidth) { ctx.reject("y outside field bounds"); continue; }
    if (f.s < 0.0) { ctx.reject("negative speed"); continue; }
    if (f.a < 0.0) { ctx.reject("negative acceleration"); continue; }
    if (f.dis < 0.0) { ctx.reject("negative dis"); continue; }
    if (f.o < 0.0 || f.o > 360.0) { ctx.reject("orientation outside [0, 360]"); continue; }
    if (f.dir < 0.0 || f.dir > 360.0) { ctx.reject("direction outside [0, 360]"); continue; }
    // The provider occasionally rounds angles to exactly 360.
    if (f.o == 360.0) f.o = 0.0;
    if (f.dir == 360.0) f.dir = 0.0;
    f.event = std::string(row[cEvent]);
    if (f.event == "NA" || f.event == "None") f.event.clear();

    std::uint64_t dedup = (static_cast<std::uint64_t>(f.gameId) * 1000003ULL) ^
                          (static_cast<std::uint64_t>(static_cast<std::uint32_t>(f.playId)) << 32) ^
                          (static_cast<std::uint64_t>(static_cast<std::uint32_t>(f.nflId)) << 16) ^
                          static_cast<std::uint32_t>(f.frameId);
    if (!seen.insert(dedup).second) {
      // Hash sets can collide; confirm by scanning the play before rejecting.
      PlayKey key = f.play_key();
      std::vector<TrackingFrame>& slot = play_slot(key);
      bool dup = std::any_of(slot.begin(), slot.end(), [&](const TrackingFrame& g) {
        return g.nflId == f.nflId && g.frameId == f.frameId;
      });
      if (dup) { ctx.reject("duplicate key (gameId, playId, nflId, frameId)"); continue; }
    }
    PlayKey key = f.play_key();
    if (current == nullptr || !(key == currentKey)) {
      current = &play_slot(key);
      currentKey = key;
    }
    current->push_back(std::move(f));
    ++counts.accepted;
  }
}

// Parses and validates the five input file families. Unparseable rows are
// collected in ds.rejects with line numbers; structural problems (missing
// file, missing required column) throw DataError.
inline Dataset load_dataset(const std::filesystem::path& rootDir, const std::set<int>& weeks) {
  namespace fs = std::filesystem;
  for (int w : weeks) {
    if (w < 1 || w > 9) throw DataError("week out of range 1-9: " + std::to_string(w));
  }
  auto require = [&](const std::string& name) -> std::string {
    fs::path p = rootDir / name;
    if (!fs::exists(p)) throw DataError("missing input file: " + p.string());
    return p.string();
  };

  Dataset ds;
  load_games(require("games.csv"), ds);
  load_players(require("players.csv"), ds);
  load_plays(require("plays.csv"), ds);
  load_tackles(require("tackles.csv"), ds);
  for (int w : weeks) {
    std::string name = "tracking_week_" + std::to_string(w) + ".csv";
    load_tracking(require(name), name, ds);
  }
  std::sort(ds.rawPlays.begin(), ds.rawPlays.end(),
            [](const RawPlay& a, const RawPlay& b) { return a.key < b.key; });
  return ds;
}

// Standardizes one play so the offense moves toward positive x, resolves the
// snap/end span and validates per-frame structure. Returns nullopt and logs a
// play-level reject on violation.
inline std::optional<StandardizedPlay> standardize(const RawPlay& raw, const PlayMeta& meta,
                                                   const StandardizeOptions& opts,
                                                   std::vector<Reject>& rejects) {
  auto reject = [&](std::string reason) -> std::optional<StandardizedPlay> {
    rejects.push_back(Reject{"standardize", -1, to_string(raw.key), std::move(reason)});
    return std::nullopt;
  };
  if (raw.frames.empty()) return reject("play has no tracking frames");

  const PlayDirection dir0 = raw.frames.front().playDirection;
  for (const TrackingFrame& f : raw.frames) {
    if (f.playDirection != dir0) return reject("mixed playDirection within play");
  }

  StandardizedPlay play;
  play.meta = meta;
  play.frames = raw.frames;
  if (dir0 == PlayDirection::Left) {
    for (TrackingFrame& f : play.frames) f = flip_left_frame(f);
  }
  std::sort(play.frames.begin(), play.frames.end(),
            [](const TrackingFrame& a, const TrackingFrame& b) {
              if (a.frameId != b.frameId) return a.frameId < b.frameId;
              return a.nflId < b.nflId;  // ball (id 0) first
            });

  // Group per frameId.
  for (std::size_t i = 0; i < play.frames.size();) {
    std::int32_t fid = play.frames[i].frameId;
    std::size_t j = i;
    while (j < play.frames.size() && play.frames[j].frameId == fid) ++j;
    play.frameIds.push_back(fid);
    play.frameSpans.emplace_back(i, j);
    i = j;
  }

  // Snap = the frame whose event is ball_snap; end = first frame at/after the
  // snap carrying an end-of-play event.
  std::optional<std::int32_t> snap, end;
  for (std::size_t k = 0; k < play.frameIds.size(); ++k) {
    auto [b, e] = play.frameSpans[k];
    for (std::size_t i = b; i < e; ++i) {
      const std::string& ev = play.frames[i].event;
      if (ev.empty()) continue;
      if (!snap && ev == "ball_snap") snap = play.frameIds[k];
      if (snap && !end && opts.endEvents.count(ev)) end = play.frameIds[k];
    }
    if (snap && end) break;
  }
  if (!snap) return reject("no ball_snap event");
  if (!end) return reject("no end-of-play event at/after snap");
  play.snapFrame = *snap;
  play.endFrame = *end;

  // Exactly 22 player records per frame; the ball record is optional.
  for (std::size_t k = 0; k < play.frameIds.size(); ++k) {
    auto [b, e] = play.frameSpans[k];
    std::size_t players = 0;
    for (std::size_t i = b; i < e; ++i) {
      if (play.frames[i].nflId != kBallId) ++players;
    }
    if (players != 22) {
      return reject("frame " + std::to_string(play.frameIds[k]) + " has " +
                    std::to_string(players) + " player records, expected 22");
    }
  }

  // Ball-carrier must be present, on offense, at every frame in [snap, end].
  for (std::int32_t fid = play.snapFrame; fid <= play.endFrame; ++fid) {
    std::size_t k = play.frame_index(fid);
    if (k == StandardizedPlay::npos) {
      return reject("frame gap at frameId " + std::to_string(fid));
    }
    auto [b, e] = play.frameSpans[k];
    bool found = false;
    for (std::size_t i = b; i < e; ++i) {
      if (play.frames[i].nflId == meta.ballCarrierId) {
        if (play.frames[i].club != meta.possessionTeam) {
          return reject("ball-carrier not on possession team");
        }
        found = true;
        break;
      }
    }
    if (!found) return reject("ball-carrier missing at frameId " + std::to_string(fid));
  }

  // Rush designation: explicit metadata wins; otherwise a handoff event before
  // any pass event marks a rush.
  if (meta.explicitRush) {
    play.meta.isRush = *meta.explicitRush;
  } else {
    bool rush = false;
    for (const TrackingFrame& f : play.frames) {
      if (f.event.empty()) continue;
      if (detail::is_pass_event(f.event)) { rush = false; break; }
      if (f.event == "handoff") { rush = true; break; }
    }
    play.meta.isRush = rush;
  }
  return play;
}

// Standardizes every raw play that has metadata; plays whose tracking lacks a
// plays.csv row are logged as rejects.
inline std::vector<StandardizedPlay> standardize_all(const Dataset& ds,
                                                     const StandardizeOptions& opts,
                                                     std::vector<Reject>& rejects) {
  std::vector<StandardizedPlay> out;
  out.reserve(ds.rawPlays.size());
  for (const RawPlay& raw : ds.rawPlays) {
    const PlayMeta* meta = ds.find_play(raw.key);
    if (meta == nullptr) {
      rejects.push_back(Reject{"standardize", -1, to_string(raw.key),
                               "tracking present but play metadata missing"});
      continue;
    }
    if (auto play = standardize(raw, *meta, opts, rejects)) {
      out.push_back(std::move(*play));
    }
  }
  return out;
}

// Retains plays where isRush holds and the ball-carrier's listed position is
// RB. Plays whose carrier is missing from players.csv are rejected.
inline std::vector<StandardizedPlay> filter_rb_runs(std::vector<StandardizedPlay> plays,
                                                    const std::unordered_map<std::int32_t, PlayerMeta>& players,
                                                    std::vector<Reject>& rejects) {
  std::vector<StandardizedPlay> out;
  out.reserve(plays.size());
  for (StandardizedPlay& play : plays) {
    if (!play.meta.isRush) continue;
    auto it = players.find(play.meta.ballCarrierId);
    if (it == players.end()) {
      rejects.push_back(Reject{"filter_rb_runs", -1, to_string(play.meta.key),
                               "ball-carrier missing from players.csv"});
      continue;
    }
    if (it->second.position != "RB") continue;
    out.push_back(std::move(play));
  }
  return out;
}

}  // namespace fractackle
