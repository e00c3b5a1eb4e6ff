#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "fractackle/valuation.hpp"
#include "fractackle/windows.hpp"

namespace fractackle {

// One frame's slice of a window value, split across the defenders present.
struct FrameCredit {
  PlayKey key;
  int windowIndex = 0;
  std::int32_t frameId = 0;
  double wFrame = 0.0;  // w / T
  std::vector<std::pair<std::int32_t, double>> defenderShares;  // id -> wFrame / K_t
};

// A defender's fractional-tackle credit within one window.
struct PlayerWindowCredit {
  PlayKey key;
  int windowIndex = 0;
  std::int32_t defenderId = 0;
  double wPlayer = 0.0;
  int framesInvolved = 0;
};

struct AttributionResult {
  std::vector<FrameCredit> frameCredits;
  std::vector<PlayerWindowCredit> playerCredits;  // sorted by defenderId
};

// Divides a window's value equally across its frames, then equally across the
// defenders present per frame. Per-player totals accumulate in frame order so
// results are bit-reproducible regardless of scheduling.
inline AttributionResult attribute(const ContactWindow& window, const WindowValue& value) {
  if (window.frameCount <= 0 ||
      window.perFrameDefenders.size() != static_cast<std::size_t>(window.frameCount)) {
    throw std::logic_error("attribute: window frame bookkeeping is inconsistent");
  }
  const double wFrame = value.w / static_cast<double>(window.frameCount);

  AttributionResult out;
  out.frameCredits.reserve(window.perFrameDefenders.size());
  std::map<std::int32_t, PlayerWindowCredit> perPlayer;

  for (int t = 0; t < window.frameCount; ++t) {
    const std::vector<std::int32_t>& defenders = window.perFrameDefenders[static_cast<std::size_t>(t)];
    if (defenders.empty()) {
      throw std::logic_error("attribute: empty defender set at frame " +
                             std::to_string(window.startFrame + t));
    }
    FrameCredit fc;
    fc.key = window.key;
    fc.windowIndex = window.index;
    fc.frameId = window.startFrame + t;
    fc.wFrame = wFrame;
    const double share = wFrame / static_cast<double>(defenders.size());
    fc.defenderShares.reserve(defenders.size());
    for (std::int32_t id : defenders) {
      fc.defenderShares.emplace_back(id, share);
      PlayerWindowCredit& pc = perPlayer[id];
      pc.key = window.key;
      pc.windowIndex = window.index;
      pc.defenderId = id;
      pc.wPlayer += share;
      pc.framesInvolved += 1;
    }
    out.frameCredits.push_back(std::move(fc));
  }

  out.playerCredits.reserve(perPlayer.size());
  for (auto& [id, pc] : perPlayer) out.playerCredits.push_back(pc);
  return out;
}

}  // namespace fractackle
