#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fractackle/io.hpp"
#include "fractackle/types.hpp"

namespace fractackle {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Independent reference oracle
//
// Re-derives contact windows, window values and per-player credits from a
// standardized play by direct frame-by-frame enumeration. Shares no logic
// with kinematics/windows/valuation/attribution; equivalence tests against
// the main pipeline rely on that independence.
// ---------------------------------------------------------------------------

namespace oracle {

struct OracleWindow {
  std::int32_t startFrame = 0;
  std::int32_t endFrame = 0;
  int frameCount = 0;
  std::vector<std::vector<std::int32_t>> perFrameDefenders;
  double w = 0.0;
  std::map<std::int32_t, double> credits;         // defender -> fractional tackles
  std::map<std::int32_t, int> framesInvolved;
};

struct OracleResult {
  std::vector<OracleWindow> windows;
  std::map<std::int32_t, double> playTotals;      // defender -> sum over windows
};

inline OracleResult oracle_credits(const StandardizedPlay& play, double D,
                                   double epsilon = 1e-6) {
  OracleResult result;

  // Carrier velocity toward the end zone and defender positions, frame by
  // frame over [snap, end].
  struct FrameView {
    std::int32_t frameId;
    double v;
    std::vector<std::int32_t> defendersWithin;
  };
  std::vector<FrameView> seq;
  for (std::int32_t fid = play.snapFrame; fid <= play.endFrame; ++fid) {
    double cx = 0.0, cy = 0.0, cs = 0.0, cdir = 0.0;
    bool haveCarrier = false;
    for (const TrackingFrame& f : play.frames) {
      if (f.frameId == fid && f.nflId == play.meta.ballCarrierId) {
        cx = f.x;
        cy = f.y;
        cs = f.s;
        cdir = f.dir;
        haveCarrier = true;
        break;
      }
    }
    if (!haveCarrier) throw std::runtime_error("oracle: carrier missing");
    FrameView view;
    view.frameId = fid;
    view.v = cs * std::sin(cdir * std::numbers::pi / 180.0);
    for (const TrackingFrame& f : play.frames) {
      if (f.frameId != fid || f.nflId == kBallId) continue;
      if (f.club != play.meta.defensiveTeam) continue;
      double dx = f.x - cx;
      double dy = f.y - cy;
      if (std::sqrt(dx * dx + dy * dy) <= D) view.defendersWithin.push_back(f.nflId);
    }
    std::sort(view.defendersWithin.begin(), view.defendersWithin.end());
    seq.push_back(std::move(view));
  }

  const std::size_t T = seq.size();
  std::size_t t = 0;
  while (t < T) {
    if (seq[t].defendersWithin.empty()) {
      ++t;
      continue;
    }
    std::size_t first = t;
    std::size_t last = t;
    while (last + 1 < T && !seq[last + 1].defendersWithin.empty()) ++last;
    t = last + 2;  // a window never touches the next one

    OracleWindow win;
    win.startFrame = seq[first].frameId;
    win.endFrame = seq[last].frameId;
    win.frameCount = static_cast<int>(last - first + 1);
    for (std::size_t i = first; i <= last; ++i) {
      win.perFrameDefenders.push_back(seq[i].defendersWithin);
    }

    // Landmarks, straight from the definitions: peak through the window's
    // end, post-window max (absent when the window closes the play).
    double vStart = seq[first].v;
    double vEnd = seq[last].v;
    double vPre = -std::numeric_limits<double>::infinity();
    std::size_t argPre = 0;
    for (std::size_t i = 0; i <= last; ++i) {
      if (seq[i].v > vPre) {
        vPre = seq[i].v;
        argPre = i;
      }
    }
    bool peakInside = argPre >= first;
    bool hasPost = last + 1 < T;
    double vPost = -std::numeric_limits<double>::infinity();
    for (std::size_t i = last + 1; i < T; ++i) vPost = std::max(vPost, seq[i].v);

    // Value: drop across the window relative to the peak, zero when the
    // peak is degenerate or fully recovered afterwards; negative forward
    // velocities count as zero and the result stays within [0, 1].
    double w;
    if (vPre <= epsilon) {
      w = 0.0;
    } else if (hasPost && std::max(vPost, 0.0) >= vPre) {
      w = 0.0;
    } else {
      double start = peakInside ? std::max(vPre, 0.0) : std::max(vStart, 0.0);
      double end = std::max(vEnd, 0.0);
      if (hasPost && end <= std::max(vPost, 0.0) && std::max(vPost, 0.0) < vPre) {
        end = std::max(vPost, 0.0);
      }
      w = (start - end) / vPre;
      if (w < 0.0) w = 0.0;
      if (w > 1.0) w = 1.0;
    }
    win.w = w;

    // Equal split across frames, then across defenders present per frame.
    double perFrame = w / static_cast<double>(win.frameCount);
    for (const std::vector<std::int32_t>& present : win.perFrameDefenders) {
      double share = perFrame / static_cast<double>(present.size());
      for (std::int32_t id : present) {
        win.credits[id] += share;
        win.framesInvolved[id] += 1;
      }
    }
    for (const auto& [id, credit] : win.credits) result.playTotals[id] += credit;
    result.windows.push_back(std::move(win));
  }
  return result;
}

}  // namespace oracle

// ---------------------------------------------------------------------------
// Synthetic play generation
// ---------------------------------------------------------------------------

// Piecewise-linear script point; frame is a 0-based track index.
struct Waypoint {
  int frame = 0;
  double value = 0.0;
};

// Distances at/above this mark mean "not near the ball-carrier".
inline constexpr double kFarDistance = 16.0;

struct DefenderScript {
  std::int32_t nflId = 0;
  std::string position = "ILB";
  std::vector<Waypoint> distance;  // yards from the carrier per frame
};

struct PlannedWindow {
  int startIndex = 0;  // 0-based track indices, inclusive
  int endIndex = 0;
  std::vector<std::vector<std::int32_t>> perFrameDefenders;
  double vStart = 0.0, vEnd = 0.0, vPre = 0.0;
  double vPost = -std::numeric_limits<double>::infinity();
  bool prePeakInside = false;
};

struct SyntheticPlaySpec {
  std::uint64_t seed = 0;
  std::int64_t gameId = 1;
  std::int32_t playId = 1;
  int week = 1;
  std::string possessionTeam = "OFF";
  std::string defensiveTeam = "DEF";
  std::int32_t ballCarrierId = 101;
  int T = 0;  // frames from snap through the end event, inclusive
  std::vector<Waypoint> carrierVelocity;
  std::vector<DefenderScript> defenders;
  double thresholdD = 1.5;

  // Filled by plan():
  std::vector<double> velocity;                 // sampled, size T
  std::vector<std::vector<double>> distances;   // [defender][frame]
  std::vector<PlannedWindow> plannedWindows;
};

namespace detail {

inline std::vector<double> sample_waypoints(const std::vector<Waypoint>& pts, int T,
                                            double fallback) {
  std::vector<double> out(static_cast<std::size_t>(T), fallback);
  if (pts.empty()) return out;
  for (int t = 0; t < T; ++t) {
    if (t <= pts.front().frame) {
      out[static_cast<std::size_t>(t)] = pts.front().value;
      continue;
    }
    if (t >= pts.back().frame) {
      out[static_cast<std::size_t>(t)] = pts.back().value;
      continue;
    }
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      if (t >= pts[i].frame && t <= pts[i + 1].frame) {
        double span = static_cast<double>(pts[i + 1].frame - pts[i].frame);
        double f = span > 0.0 ? static_cast<double>(t - pts[i].frame) / span : 0.0;
        out[static_cast<std::size_t>(t)] = pts[i].value + f * (pts[i + 1].value - pts[i].value);
        break;
      }
    }
  }
  return out;
}

}  // namespace detail

// Samples the scripts and derives the expected windows and landmarks. Throws
// GenerationError when the spec violates its own preconditions (speed cap,
// field bounds, threshold-straddling distances).
inline void plan(SyntheticPlaySpec& spec) {
  if (spec.T < 2) throw GenerationError("spec needs at least 2 frames");
  if (spec.defenders.size() > 11) throw GenerationError("at most 11 scripted defenders");
  spec.velocity = detail::sample_waypoints(spec.carrierVelocity, spec.T, 0.0);
  for (double v : spec.velocity) {
    if (std::abs(v) > 12.0) throw GenerationError("carrier speed above 12 yd/s");
  }
  // Realized carrier x must stay inside the field.
  double x = 25.0;
  for (int t = 1; t < spec.T; ++t) {
    x += spec.velocity[static_cast<std::size_t>(t)] / kFrameRateHz;
    if (x < 0.5 || x > kFieldLength - 0.5) {
      throw GenerationError("carrier path leaves the field at frame " + std::to_string(t));
    }
  }

  spec.distances.clear();
  for (const DefenderScript& d : spec.defenders) {
    std::vector<double> dist = detail::sample_waypoints(d.distance, spec.T, kFarDistance);
    for (double& v : dist) {
      if (!std::isfinite(v)) v = kFarDistance;
      if (v < 0.0) throw GenerationError("negative defender distance");
      if (v < kFarDistance && std::abs(v - spec.thresholdD) < 1e-3) {
        throw GenerationError("defender distance sits on the threshold boundary");
      }
    }
    spec.distances.push_back(std::move(dist));
  }

  // Expected windows from the sampled scripts.
  spec.plannedWindows.clear();
  int t = 0;
  while (t < spec.T) {
    std::vector<std::int32_t> present;
    for (std::size_t k = 0; k < spec.defenders.size(); ++k) {
      if (spec.distances[k][static_cast<std::size_t>(t)] <= spec.thresholdD) {
        present.push_back(spec.defenders[k].nflId);
      }
    }
    if (present.empty()) {
      ++t;
      continue;
    }
    PlannedWindow win;
    win.startIndex = t;
    while (t < spec.T) {
      std::vector<std::int32_t> ids;
      for (std::size_t k = 0; k < spec.defenders.size(); ++k) {
        if (spec.distances[k][static_cast<std::size_t>(t)] <= spec.thresholdD) {
          ids.push_back(spec.defenders[k].nflId);
        }
      }
      if (ids.empty()) break;
      std::sort(ids.begin(), ids.end());
      win.perFrameDefenders.push_back(std::move(ids));
      ++t;
    }
    win.endIndex = t - 1;
    win.vStart = spec.velocity[static_cast<std::size_t>(win.startIndex)];
    win.vEnd = spec.velocity[static_cast<std::size_t>(win.endIndex)];
    double preMax = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= win.startIndex; ++i) preMax = std::max(preMax, spec.velocity[static_cast<std::size_t>(i)]);
    double inMax = -std::numeric_limits<double>::infinity();
    for (int i = win.startIndex; i <= win.endIndex; ++i) inMax = std::max(inMax, spec.velocity[static_cast<std::size_t>(i)]);
    win.prePeakInside = inMax > preMax;
    win.vPre = std::max(preMax, inMax);
    win.vPost = -std::numeric_limits<double>::infinity();
    for (int i = win.endIndex + 1; i < spec.T; ++i) win.vPost = std::max(win.vPost, spec.velocity[static_cast<std::size_t>(i)]);
    spec.plannedWindows.push_back(std::move(win));
  }
}

// Builds the standardized play realizing a planned spec: 22 players plus the
// ball at every frame, snap/handoff/first_contact/tackle events, carrier
// moving along +x at the scripted velocity, scripted defenders placed at
// their exact scripted distances. Asserts the realization reproduces the
// planned windows before returning.
inline StandardizedPlay realize(const SyntheticPlaySpec& spec) {
  if (spec.velocity.empty()) throw GenerationError("spec not planned; call plan() first");

  const double carrierY = kFieldWidth / 2.0;
  StandardizedPlay play;
  play.meta.key = PlayKey{spec.gameId, spec.playId};
  play.meta.week = spec.week;
  play.meta.ballCarrierId = spec.ballCarrierId;
  play.meta.possessionTeam = spec.possessionTeam;
  play.meta.defensiveTeam = spec.defensiveTeam;
  play.meta.isRush = true;
  play.meta.explicitRush = true;
  play.meta.description = "synthetic play";
  play.snapFrame = 1;
  play.endFrame = spec.T;

  // Events by frame index; earlier assignments win on collision.
  std::map<int, std::string> events;
  events[0] = "ball_snap";
  events[spec.T - 1] = "tackle";
  if (spec.T >= 3) events.emplace(1, "handoff");
  if (!spec.plannedWindows.empty()) {
    events.emplace(spec.plannedWindows.front().startIndex, "first_contact");
  }

  std::vector<std::int32_t> offense;  // teammates
  for (int i = 0; i < 10; ++i) offense.push_back(102 + i);
  std::vector<std::int32_t> parked;   // unscripted defenders fill the 11
  for (std::size_t i = spec.defenders.size(); i < 11; ++i) {
    parked.push_back(static_cast<std::int32_t>(230 + i));
  }

  double x = 25.0;
  double prevX = x;
  double prevV = spec.velocity[0];
  std::vector<double> prevDefX(spec.defenders.size() + parked.size(), 0.0);
  for (int t = 0; t < spec.T; ++t) {
    const double v = spec.velocity[static_cast<std::size_t>(t)];
    if (t > 0) x += v / kFrameRateHz;
    const std::int32_t frameId = t + 1;
    std::string event;
    if (auto it = events.find(t); it != events.end()) event = it->second;

    auto push = [&](std::int32_t id, const std::string& club, double px, double py, double ps,
                    double pa, double pdis, double po, double pdir) {
      TrackingFrame f;
      f.gameId = spec.gameId;
      f.playId = spec.playId;
      f.nflId = id;
      f.frameId = frameId;
      f.club = club;
      f.playDirection = PlayDirection::Right;
      f.x = px;
      f.y = py;
      f.s = ps;
      f.a = pa;
      f.dis = pdis;
      f.o = po;
      f.dir = pdir;
      f.event = event;
      play.frames.push_back(std::move(f));
    };

    // Ball-carrier: dir 90 means straight toward the target end zone.
    push(spec.ballCarrierId, spec.possessionTeam, x, carrierY, std::abs(v),
         t > 0 ? std::abs(v - prevV) * kFrameRateHz : 0.0, t > 0 ? std::abs(x - prevX) : 0.0, 90.0,
         v >= 0.0 ? 90.0 : 270.0);
    // Ball record rides with the carrier.
    push(kBallId, "football", x, carrierY, std::abs(v), 0.0, t > 0 ? std::abs(x - prevX) : 0.0,
         0.0, 0.0);
    // Teammates hold still behind the play.
    for (std::size_t i = 0; i < offense.size(); ++i) {
      push(offense[i], spec.possessionTeam, 1.0 + 0.8 * static_cast<double>(i), 1.5, 0.0, 0.0,
           0.0, 0.0, 0.0);
    }
    // Scripted defenders sit at their exact scripted distance, alternating
    // sides; far frames park them 18 yards off.
    for (std::size_t k = 0; k < spec.defenders.size(); ++k) {
      double d = spec.distances[k][static_cast<std::size_t>(t)];
      double offset = d >= kFarDistance ? 18.0 : d;
      double py = carrierY + (k % 2 == 0 ? offset : -offset);
      double px = x;
      double moved = t > 0 ? std::abs(px - prevDefX[k]) : 0.0;
      push(spec.defenders[k].nflId, spec.defensiveTeam, px, py, moved * kFrameRateHz, 0.0, moved,
           0.0, 0.0);
      prevDefX[k] = px;
    }
    for (std::size_t k = 0; k < parked.size(); ++k) {
      push(parked[k], spec.defensiveTeam, 100.0 + 0.5 * static_cast<double>(k), 48.0, 0.0, 0.0,
           0.0, 0.0, 0.0);
    }
    prevX = x;
    prevV = v;
  }

  std::sort(play.frames.begin(), play.frames.end(),
            [](const TrackingFrame& a, const TrackingFrame& b) {
              if (a.frameId != b.frameId) return a.frameId < b.frameId;
              return a.nflId < b.nflId;
            });
  for (std::size_t i = 0; i < play.frames.size();) {
    std::int32_t fid = play.frames[i].frameId;
    std::size_t j = i;
    while (j < play.frames.size() && play.frames[j].frameId == fid) ++j;
    play.frameIds.push_back(fid);
    play.frameSpans.emplace_back(i, j);
    i = j;
  }

  // Realization check: the emitted geometry must reproduce the planned
  // windows under the configured threshold.
  oracle::OracleResult realized = oracle::oracle_credits(play, spec.thresholdD);
  if (realized.windows.size() != spec.plannedWindows.size()) {
    throw GenerationError("realized window count diverged from plan");
  }
  for (std::size_t j = 0; j < realized.windows.size(); ++j) {
    const oracle::OracleWindow& got = realized.windows[j];
    const PlannedWindow& want = spec.plannedWindows[j];
    if (got.startFrame != want.startIndex + 1 || got.endFrame != want.endIndex + 1 ||
        got.perFrameDefenders != want.perFrameDefenders) {
      throw GenerationError("realized window " + std::to_string(j + 1) + " diverged from plan");
    }
  }
  return play;
}

// ---------------------------------------------------------------------------
// Canonical fixtures
// ---------------------------------------------------------------------------

// The worked-example contact window in isolation: landmarks 5.01/4.72/5.16,
// two defenders (37, 51) overlapping for two of four frames.
inline SyntheticPlaySpec window2_spec() {
  SyntheticPlaySpec spec;
  spec.T = 10;
  spec.carrierVelocity = {{0, 3.0}, {1, 5.16}, {2, 5.10}, {3, 5.01}, {4, 4.90},
                          {5, 4.80}, {6, 4.72}, {7, 4.00}, {8, 3.50}, {9, 3.00}};
  DefenderScript hooker{37, "FS", {{2, 8.0}, {3, 1.2}, {4, 1.0}, {5, 1.1}, {6, 8.0}}};
  DefenderScript lng{51, "ILB", {{3, 8.0}, {4, 1.3}, {5, 1.3}, {6, 1.2}, {7, 8.0}}};
  spec.defenders = {hooker, lng};
  plan(spec);
  return spec;
}

// Full Barkley-style three-window play matching the worked example's credit
// table: window (1) fully recovered, window (2) as above, window (3) a
// 13-frame stop shared by four defenders.
inline SyntheticPlaySpec table2_spec() {
  SyntheticPlaySpec spec;
  spec.T = 26;
  spec.carrierVelocity = {
      {0, 0.5},  {1, 0.8},  {2, 1.0},  {3, 1.5},  {4, 3.0},  {5, 5.16}, {6, 5.10},
      {7, 5.01}, {8, 4.90}, {9, 4.80}, {10, 4.72}, {11, 4.60}, {12, 4.55}, {13, 4.50},
      {14, 4.20}, {15, 4.00}, {16, 3.70}, {17, 3.40}, {18, 3.10}, {19, 2.80}, {20, 2.50},
      {21, 2.20}, {22, 1.90}, {23, 1.60}, {24, 1.20}, {25, 0.76416}};
  DefenderScript dupree{48, "OLB", {{1, 8.0}, {2, 1.0}, {3, 1.0}, {4, 8.0}}};
  DefenderScript hooker{37, "FS", {{6, 8.0}, {7, 1.2}, {8, 1.0}, {9, 1.1}, {10, 8.0}}};
  DefenderScript lng{51, "ILB", {{7, 8.0}, {8, 1.3}, {9, 1.3}, {10, 1.2}, {11, 8.0}}};
  // Window (3), indices 13..25: Autry solo, Simmons solo x2, a three-way
  // frame, then nine Amadi/Cunningham halves through the tackle.
  DefenderScript autry{96, "DE", {{12, 8.0}, {13, 1.0}, {14, 8.0}}};
  DefenderScript simmons{98, "DT", {{13, 8.0}, {14, 1.1}, {15, 1.1}, {16, 1.2}, {17, 8.0}}};
  DefenderScript amadi{29, "FS", {{15, 8.0}, {16, 1.3}, {17, 1.2}, {25, 1.2}}};
  DefenderScript cunningham{41, "ILB", {{15, 8.0}, {16, 1.4}, {17, 1.3}, {25, 1.2}}};
  spec.defenders = {dupree, hooker, lng, autry, simmons, amadi, cunningham};
  plan(spec);
  return spec;
}

// ---------------------------------------------------------------------------
// Randomized specs (portable RNG: raw mt19937_64 draws only)
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next_u64() {
    // splitmix64: deterministic across platforms, good enough for fixtures.
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::uint64_t state_;
};

// A random play exercising the full case space: wandering velocity, one to
// four defenders with zero to three approach dips each. Draws that land a
// sampled distance on the threshold boundary are redrawn.
inline SyntheticPlaySpec random_play_spec(Rng& rng, std::int64_t gameId, std::int32_t playId,
                                          int week = 1, double D = 1.5) {
  const char* positions[] = {"DE", "DT", "NT", "ILB", "OLB", "MLB", "CB", "FS", "SS", "DB"};
  for (int attempt = 0; attempt < 64; ++attempt) {
    SyntheticPlaySpec spec;
    spec.seed = rng.next_u64();
    spec.gameId = gameId;
    spec.playId = playId;
    spec.week = week;
    spec.thresholdD = D;
    spec.T = rng.uniform_int(20, 80);

    int t = 0;
    while (t < spec.T) {
      double v = rng.uniform(-2.0, 9.0);
      spec.carrierVelocity.push_back(Waypoint{t, v});
      t += rng.uniform_int(6, 14);
    }
    spec.carrierVelocity.push_back(Waypoint{spec.T - 1, rng.uniform(-1.0, 6.0)});

    int defenderCount = rng.uniform_int(1, 4);
    for (int k = 0; k < defenderCount; ++k) {
      DefenderScript d;
      d.nflId = static_cast<std::int32_t>(201 + k);
      d.position = positions[static_cast<std::size_t>(rng.uniform_int(0, 9))];
      int dips = rng.uniform_int(0, 3);
      int at = rng.uniform_int(3, std::max(3, spec.T / 3));
      for (int i = 0; i < dips && at < spec.T - 2; ++i) {
        int approach = rng.uniform_int(2, 5);
        int hold = rng.uniform_int(1, 6);
        int retreat = rng.uniform_int(2, 5);
        double depth = rng.uniform(0.2, 3.0);
        if (std::abs(depth - D) < 5e-2) depth += 0.1;
        d.distance.push_back(Waypoint{at, kFarDistance});
        at += approach;
        d.distance.push_back(Waypoint{std::min(at, spec.T - 1), depth});
        at += hold;
        d.distance.push_back(Waypoint{std::min(at, spec.T - 1), depth});
        at += retreat;
        d.distance.push_back(Waypoint{std::min(at, spec.T - 1), kFarDistance});
        at += rng.uniform_int(2, 10);
      }
      spec.defenders.push_back(std::move(d));
    }

    try {
      plan(spec);
    } catch (const GenerationError&) {
      continue;
    }
    return spec;
  }
  throw GenerationError("could not draw a realizable random play spec");
}

// ---------------------------------------------------------------------------
// Dataset emission
// ---------------------------------------------------------------------------

// Writes a loadable five-file dataset plus a ground-truth sidecar whose
// windows, values and credits come from the reference oracle, not the main
// pipeline. Deterministic: identical specs produce byte-identical files.
inline nlohmann::json write_synthetic_dataset(const std::filesystem::path& outDir,
                                              std::vector<SyntheticPlaySpec>& specs) {
  namespace fs = std::filesystem;
  fs::create_directories(outDir);

  std::map<std::int64_t, int> games;                 // gameId -> week
  std::map<std::int32_t, PlayerMeta> players;
  std::map<int, std::string> trackingByWeek;
  std::string playsCsv =
      "gameId,playId,ballCarrierId,possessionTeam,defensiveTeam,isRush,playDescription\n";
  std::string tacklesCsv = "gameId,playId,nflId,tackle,assist,forcedFumble,pff_missedTackle\n";
  const std::string trackingHeader =
      "gameId,playId,nflId,frameId,club,playDirection,x,y,s,a,dis,o,dir,event\n";

  nlohmann::json sidecar;
  sidecar["plays"] = nlohmann::json::array();

  const char* offensePositions[] = {"QB", "WR", "T", "G", "C", "TE", "WR", "G", "T", "FB"};
  const char* parkedPositions[] = {"CB", "SS", "FS", "CB", "DB", "OLB", "MLB", "DE", "DT", "NT", "ILB"};

  for (SyntheticPlaySpec& spec : specs) {
    if (spec.velocity.empty()) plan(spec);
    StandardizedPlay play = realize(spec);
    auto [it, inserted] = games.emplace(spec.gameId, spec.week);
    if (!inserted && it->second != spec.week) {
      throw GenerationError("one gameId mapped to two weeks");
    }

    players.emplace(spec.ballCarrierId,
                    PlayerMeta{spec.ballCarrierId, "Carrier " + std::to_string(spec.ballCarrierId), "RB"});
    for (int i = 0; i < 10; ++i) {
      std::int32_t id = 102 + i;
      players.emplace(id, PlayerMeta{id, "Blocker " + std::to_string(id),
                                     offensePositions[static_cast<std::size_t>(i)]});
    }
    for (std::size_t k = 0; k < spec.defenders.size(); ++k) {
      const DefenderScript& d = spec.defenders[k];
      players.emplace(d.nflId, PlayerMeta{d.nflId, "Defender " + std::to_string(d.nflId), d.position});
    }
    for (std::size_t i = spec.defenders.size(); i < 11; ++i) {
      std::int32_t id = static_cast<std::int32_t>(230 + i);
      players.emplace(id, PlayerMeta{id, "Defender " + std::to_string(id),
                                     parkedPositions[i]});
    }

    playsCsv += std::to_string(spec.gameId) + "," + std::to_string(spec.playId) + "," +
                std::to_string(spec.ballCarrierId) + "," + spec.possessionTeam + "," +
                spec.defensiveTeam + ",1,\"synthetic play\"\n";

    std::string& tracking = trackingByWeek[spec.week];
    if (tracking.empty()) tracking = trackingHeader;
    for (const TrackingFrame& f : play.frames) {
      tracking += std::to_string(f.gameId) + "," + std::to_string(f.playId) + ",";
      if (f.nflId != kBallId) tracking += std::to_string(f.nflId);
      tracking += "," + std::to_string(f.frameId) + "," + f.club + ",right," + fmt_exact(f.x) +
                  "," + fmt_exact(f.y) + "," + fmt_exact(f.s) + "," + fmt_exact(f.a) + "," +
                  fmt_exact(f.dis);
      if (f.nflId == kBallId) {
        tracking += ",NA,NA,";
      } else {
        tracking += "," + fmt_exact(f.o) + "," + fmt_exact(f.dir) + ",";
      }
      tracking += f.event + "\n";
    }

    // Ground truth from the oracle.
    oracle::OracleResult truth = oracle::oracle_credits(play, spec.thresholdD);
    nlohmann::json jp;
    jp["gameId"] = spec.gameId;
    jp["playId"] = spec.playId;
    jp["week"] = spec.week;
    jp["windows"] = nlohmann::json::array();
    for (std::size_t j = 0; j < truth.windows.size(); ++j) {
      const oracle::OracleWindow& w = truth.windows[j];
      nlohmann::json jw;
      jw["index"] = j + 1;
      jw["startFrame"] = w.startFrame;
      jw["endFrame"] = w.endFrame;
      jw["T"] = w.frameCount;
      jw["w"] = w.w;
      jw["credits"] = nlohmann::json::array();
      for (const auto& [id, credit] : w.credits) {
        jw["credits"].push_back({{"nflId", id},
                                 {"wPlayer", credit},
                                 {"framesInvolved", w.framesInvolved.at(id)}});
      }
      jp["windows"].push_back(std::move(jw));
    }
    jp["totals"] = nlohmann::json::object();
    for (const auto& [id, total] : truth.playTotals) {
      jp["totals"][std::to_string(id)] = total;
    }
    sidecar["plays"].push_back(std::move(jp));

    // Box score: the nearest scripted defender at the final frame tackles;
    // a second defender in contact assists.
    std::vector<std::pair<double, std::int32_t>> last;
    for (std::size_t k = 0; k < spec.defenders.size(); ++k) {
      last.emplace_back(spec.distances[k][static_cast<std::size_t>(spec.T - 1)],
                        spec.defenders[k].nflId);
    }
    std::sort(last.begin(), last.end());
    if (!last.empty()) {
      tacklesCsv += std::to_string(spec.gameId) + "," + std::to_string(spec.playId) + "," +
                    std::to_string(last[0].second) + ",1,0,0,0\n";
      if (last.size() > 1 && last[1].first <= spec.thresholdD) {
        tacklesCsv += std::to_string(spec.gameId) + "," + std::to_string(spec.playId) + "," +
                      std::to_string(last[1].second) + ",0,1,0,0\n";
      }
    }
  }

  std::string gamesCsv = "gameId,week\n";
  for (const auto& [gameId, week] : games) {
    gamesCsv += std::to_string(gameId) + "," + std::to_string(week) + "\n";
  }
  std::string playersCsv = "nflId,displayName,position\n";
  for (const auto& [id, meta] : players) {
    playersCsv += std::to_string(id) + "," + meta.displayName + "," + meta.position + "\n";
  }

  atomic_write_file(outDir / "games.csv", gamesCsv);
  atomic_write_file(outDir / "players.csv", playersCsv);
  atomic_write_file(outDir / "plays.csv", playsCsv);
  atomic_write_file(outDir / "tackles.csv", tacklesCsv);
  std::set<int> weeks;
  for (const auto& [week, csv] : trackingByWeek) {
    atomic_write_file(outDir / ("tracking_week_" + std::to_string(week) + ".csv"), csv);
    weeks.insert(week);
  }
  sidecar["weeks"] = weeks;
  sidecar["D"] = specs.empty() ? 1.5 : specs.front().thresholdD;
  atomic_write_file(outDir / "sidecar.json", sidecar.dump(2) + "\n");
  return sidecar;
}

}  // namespace fractackle
