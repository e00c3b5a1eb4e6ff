#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fractackle/kinematics.hpp"
#include "fractackle/types.hpp"

namespace fractackle {

struct CalibrationConfig {
  double percentile = 0.95;          // fraction in (0, 1)
  std::optional<double> overrideD;   // yards; bypasses calibration
};

// Maximal consecutive frame span with at least one defender within D of the
// ball-carrier, plus the four velocity landmarks consumed by valuation.
struct ContactWindow {
  PlayKey key;
  int index = 0;                       // j, 1-based in frame order
  std::int32_t startFrame = 0;         // frameIds, inclusive
  std::int32_t endFrame = 0;
  int frameCount = 0;                  // T
  std::vector<std::vector<std::int32_t>> perFrameDefenders;  // sorted ids, nonempty
  double vStart = 0.0;
  double vEnd = 0.0;
  double vPre = 0.0;
  double vPost = -std::numeric_limits<double>::infinity();  // -inf: window ends the play
  bool prePeakInsideWindow = false;
};

// Defender positions aligned with a ball-carrier track: positions[t][k] is
// roster[k]'s location at track frame t.
struct DefenderFrames {
  struct Pos {
    double x = 0.0;
    double y = 0.0;
  };
  std::vector<std::int32_t> roster;            // sorted defender ids
  std::vector<std::vector<Pos>> positions;     // [track frame][roster index]
};

// Collects the 11 defensiveTeam players per track frame. The ball record is
// never a defender. Throws if a rostered defender is missing at some frame.
inline DefenderFrames defender_frames(const StandardizedPlay& play, const BallCarrierTrack& track) {
  DefenderFrames out;
  {
    std::size_t k = play.frame_index(track.snap_frame());
    auto [b, e] = play.frameSpans[k];
    for (std::size_t i = b; i < e; ++i) {
      if (play.frames[i].nflId != kBallId && play.frames[i].club == play.meta.defensiveTeam) {
        out.roster.push_back(play.frames[i].nflId);
      }
    }
    std::sort(out.roster.begin(), out.roster.end());
  }
  out.positions.resize(track.size());
  for (std::size_t t = 0; t < track.size(); ++t) {
    std::size_t k = play.frame_index(track.points[t].frameId);
    auto [b, e] = play.frameSpans[k];
    out.positions[t].resize(out.roster.size());
    std::vector<bool> filled(out.roster.size(), false);
    for (std::size_t i = b; i < e; ++i) {
      const TrackingFrame& f = play.frames[i];
      if (f.nflId == kBallId || f.club != play.meta.defensiveTeam) continue;
      auto it = std::lower_bound(out.roster.begin(), out.roster.end(), f.nflId);
      if (it == out.roster.end() || *it != f.nflId) {
        throw std::runtime_error("defender roster changed mid-play: " + to_string(play.meta.key));
      }
      std::size_t idx = static_cast<std::size_t>(it - out.roster.begin());
      out.positions[t][idx] = DefenderFrames::Pos{f.x, f.y};
      filled[idx] = true;
    }
    for (bool ok : filled) {
      if (!ok) throw std::runtime_error("defender missing at frame: " + to_string(play.meta.key));
    }
  }
  return out;
}

// Maximal runs of consecutive indices with dists[i] <= D, as [first, last]
// inclusive index pairs.
inline std::vector<std::pair<std::size_t, std::size_t>> threshold_runs(std::span<const double> dists,
                                                                       double D) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  std::size_t i = 0;
  while (i < dists.size()) {
    if (!(dists[i] <= D)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < dists.size() && dists[j + 1] <= D) ++j;
    runs.emplace_back(i, j);
    i = j + 1;
  }
  return runs;
}

namespace detail {

inline double dist2d(double ax, double ay, double bx, double by) {
  return std::hypot(ax - bx, ay - by);
}

}  // namespace detail

// Identifies contact windows for one play and fills the velocity landmarks:
//   vStart/vEnd  velocity at the window's first/last frame,
//   vPre         peak velocity through the window's end (equivalently through
//                its start when the running peak is not attained inside),
//   vPost        max velocity strictly after the window (-inf when none),
//   prePeakInsideWindow  whether the running peak is first exceeded inside.
inline std::vector<ContactWindow> detect_windows(const BallCarrierTrack& track,
                                                 const DefenderFrames& defenders, double D) {
  const std::size_t T = track.size();
  std::vector<double> nearest(T, std::numeric_limits<double>::infinity());
  for (std::size_t t = 0; t < T; ++t) {
    const TrackPoint& bc = track.points[t];
    for (const DefenderFrames::Pos& p : defenders.positions[t]) {
      nearest[t] = std::min(nearest[t], detail::dist2d(bc.x, bc.y, p.x, p.y));
    }
  }

  std::vector<ContactWindow> windows;
  for (auto [first, last] : threshold_runs(nearest, D)) {
    ContactWindow w;
    w.key = track.key;
    w.index = static_cast<int>(windows.size()) + 1;
    w.startFrame = track.points[first].frameId;
    w.endFrame = track.points[last].frameId;
    w.frameCount = static_cast<int>(last - first + 1);

    w.perFrameDefenders.reserve(static_cast<std::size_t>(w.frameCount));
    for (std::size_t t = first; t <= last; ++t) {
      std::vector<std::int32_t> ids;
      const TrackPoint& bc = track.points[t];
      for (std::size_t k = 0; k < defenders.roster.size(); ++k) {
        const DefenderFrames::Pos& p = defenders.positions[t][k];
        if (detail::dist2d(bc.x, bc.y, p.x, p.y) <= D) ids.push_back(defenders.roster[k]);
      }
      w.perFrameDefenders.push_back(std::move(ids));
    }

    w.vStart = track.points[first].vToward;
    w.vEnd = track.points[last].vToward;

    double preMax = -std::numeric_limits<double>::infinity();   // through window start
    for (std::size_t t = 0; t <= first; ++t) preMax = std::max(preMax, track.points[t].vToward);
    double inMax = -std::numeric_limits<double>::infinity();    // inside the window
    for (std::size_t t = first; t <= last; ++t) inMax = std::max(inMax, track.points[t].vToward);
    if (inMax > preMax) {
      w.prePeakInsideWindow = true;
      w.vPre = inMax;
    } else {
      w.prePeakInsideWindow = false;
      w.vPre = preMax;
    }

    w.vPost = -std::numeric_limits<double>::infinity();
    for (std::size_t t = last + 1; t < T; ++t) w.vPost = std::max(w.vPost, track.points[t].vToward);

    windows.push_back(std::move(w));
  }
  return windows;
}

struct CalibrationResult {
  double D = 0.0;
  double percentile = 0.95;
  bool overridden = false;
  std::vector<double> firstContactSamples;  // sorted
  std::vector<double> tackleSamples;        // sorted
};

namespace detail {

// Smallest sample value v with count(x <= v)/n >= p, on a sorted vector.
inline double quantile_ge(const std::vector<double>& sorted, double p) {
  std::size_t k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size()) - 1e-9));
  if (k == 0) k = 1;
  return sorted[k - 1];
}

inline double round_up_tenth(double x) {
  return std::ceil(x * 10.0 - 1e-9) / 10.0;
}

// Ball-carrier-to-nearest-defender distance at every frame of the play whose
// event matches label.
inline void event_distances(const StandardizedPlay& play, const BallCarrierTrack& track,
                            const DefenderFrames& defenders, const char* label,
                            std::vector<double>& out) {
  for (std::size_t t = 0; t < track.size(); ++t) {
    std::size_t k = play.frame_index(track.points[t].frameId);
    auto [b, e] = play.frameSpans[k];
    bool match = false;
    for (std::size_t i = b; i < e; ++i) {
      if (play.frames[i].event == label) {
        match = true;
        break;
      }
    }
    if (!match) continue;
    double nearest = std::numeric_limits<double>::infinity();
    for (const DefenderFrames::Pos& p : defenders.positions[t]) {
      nearest = std::min(nearest, dist2d(track.points[t].x, track.points[t].y, p.x, p.y));
    }
    if (std::isfinite(nearest)) out.push_back(nearest);
  }
}

}  // namespace detail

// Calibrates the contact threshold D from first_contact and tackle event
// frames: D is the smallest value covering at least `percentile` of the
// samples in both distributions, rounded up to the nearest 0.1 yard.
inline CalibrationResult calibrate_threshold(std::span<const StandardizedPlay> plays,
                                             const CalibrationConfig& config) {
  if (!(config.percentile > 0.0 && config.percentile < 1.0)) {
    throw DataError("calibration percentile must lie strictly between 0 and 1");
  }
  CalibrationResult result;
  result.percentile = config.percentile;

  std::vector<Reject> scratch;
  for (const StandardizedPlay& play : plays) {
    auto track = build_track(play, scratch);
    if (!track) continue;
    DefenderFrames defenders = defender_frames(play, *track);
    detail::event_distances(play, *track, defenders, "first_contact", result.firstContactSamples);
    detail::event_distances(play, *track, defenders, "tackle", result.tackleSamples);
  }
  std::sort(result.firstContactSamples.begin(), result.firstContactSamples.end());
  std::sort(result.tackleSamples.begin(), result.tackleSamples.end());

  if (config.overrideD) {
    if (!(*config.overrideD > 0.0)) throw DataError("override D must be positive");
    result.D = *config.overrideD;
    result.overridden = true;
    return result;
  }
  if (result.firstContactSamples.empty() || result.tackleSamples.empty()) {
    throw DataError("calibration found no first_contact/tackle event frames and no override D was given");
  }
  double d = std::max(detail::quantile_ge(result.firstContactSamples, config.percentile),
                      detail::quantile_ge(result.tackleSamples, config.percentile));
  result.D = detail::round_up_tenth(d);
  return result;
}

}  // namespace fractackle
