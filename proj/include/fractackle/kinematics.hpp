#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "fractackle/types.hpp"

namespace fractackle {

// Signed velocity component toward the target end zone (+x after
// standardization). dir is measured in degrees clockwise from the +y axis,
// so the x component is s*sin(dir) and the y component is s*cos(dir).
inline double velocity_toward_endzone(double s, double dir) {
  return s * std::sin(dir * std::numbers::pi / 180.0);
}

struct TrackPoint {
  std::int32_t frameId = 0;
  double x = 0.0;
  double y = 0.0;
  double vToward = 0.0;  // yd/s, signed
};

// The ball-carrier's end-zone-directed velocity series over [snap, end].
struct BallCarrierTrack {
  PlayKey key;
  std::vector<TrackPoint> points;  // consecutive frames, no gaps

  std::size_t size() const { return points.size(); }
  std::int32_t snap_frame() const { return points.front().frameId; }
  std::int32_t end_frame() const { return points.back().frameId; }
};

// Builds the carrier track over [snapFrame, endFrame]. The carrier must be
// present at every frame in range; otherwise the play is rejected.
inline std::optional<BallCarrierTrack> build_track(const StandardizedPlay& play,
                                                   std::vector<Reject>& rejects) {
  BallCarrierTrack track;
  track.key = play.meta.key;
  track.points.reserve(static_cast<std::size_t>(play.endFrame - play.snapFrame + 1));
  for (std::int32_t fid = play.snapFrame; fid <= play.endFrame; ++fid) {
    std::size_t k = play.frame_index(fid);
    const TrackingFrame* carrier = nullptr;
    if (k != StandardizedPlay::npos) {
      auto [b, e] = play.frameSpans[k];
      for (std::size_t i = b; i < e; ++i) {
        if (play.frames[i].nflId == play.meta.ballCarrierId) {
          carrier = &play.frames[i];
          break;
        }
      }
    }
    if (carrier == nullptr) {
      rejects.push_back(Reject{"build_track", -1, to_string(play.meta.key),
                               "ball-carrier missing at frameId " + std::to_string(fid)});
      return std::nullopt;
    }
    track.points.push_back(TrackPoint{fid, carrier->x, carrier->y,
                                      velocity_toward_endzone(carrier->s, carrier->dir)});
  }
  return track;
}

// Diagnostic cross-check of the provider velocity against position
// differencing at 10 Hz. Entry t holds (x_t - x_{t-1}) * 10; entry 0 repeats
// entry 1 so the output aligns with the track.
inline std::vector<double> finite_difference_velocity(const BallCarrierTrack& track) {
  std::vector<double> v(track.points.size(), 0.0);
  for (std::size_t t = 1; t < track.points.size(); ++t) {
    v[t] = (track.points[t].x - track.points[t - 1].x) * kFrameRateHz;
  }
  if (v.size() > 1) v[0] = v[1];
  return v;
}

}  // namespace fractackle
