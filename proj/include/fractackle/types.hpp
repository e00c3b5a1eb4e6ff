#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fractackle {

// Unrecoverable input problem: missing file, missing required column, broken
// join. Row- and play-level problems are collected as Rejects instead.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Field geometry (yards). The tracking coordinate frame puts the end zones at
// x = 0 and x = 120 and the sidelines at y = 0 and y = 160/3.
inline constexpr double kFieldLength = 120.0;
inline constexpr double kFieldWidth = 160.0 / 3.0;
inline constexpr double kFrameRateHz = 10.0;

// nflId sentinel for the ball record (the real files leave the cell empty).
inline constexpr std::int32_t kBallId = 0;

enum class PlayDirection : std::uint8_t { Left, Right };

struct PlayKey {
  std::int64_t gameId = 0;
  std::int32_t playId = 0;

  friend auto operator<=>(const PlayKey&, const PlayKey&) = default;
};

inline std::string to_string(const PlayKey& k) {
  return std::to_string(k.gameId) + ":" + std::to_string(k.playId);
}

struct PlayKeyHash {
  std::size_t operator()(const PlayKey& k) const noexcept {
    std::size_t h = std::hash<std::int64_t>{}(k.gameId);
    h ^= std::hash<std::int32_t>{}(k.playId) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

// One player (or ball) observation at one frame.
struct TrackingFrame {
  std::int64_t gameId = 0;
  std::int32_t playId = 0;
  std::int32_t nflId = kBallId;  // kBallId = the ball
  std::int32_t frameId = 0;
  std::string club;
  PlayDirection playDirection = PlayDirection::Right;
  double x = 0.0;    // yards, [0, 120]
  double y = 0.0;    // yards, [0, 160/3]
  double s = 0.0;    // speed, yd/s
  double a = 0.0;    // acceleration magnitude, yd/s^2
  double dis = 0.0;  // distance since previous frame, yards
  double o = 0.0;    // orientation, degrees [0, 360)
  double dir = 0.0;  // direction of motion, degrees [0, 360)
  std::string event; // empty = no event on this frame

  PlayKey play_key() const { return PlayKey{gameId, playId}; }
};

struct PlayMeta {
  PlayKey key;
  int week = 0;  // 1-9, joined from games.csv
  std::int32_t ballCarrierId = 0;
  std::string possessionTeam;
  std::string defensiveTeam;
  bool isRush = false;
  std::optional<bool> explicitRush;  // plays.csv isRush column when present
  std::string description;
};

struct PlayerMeta {
  std::int32_t nflId = 0;
  std::string displayName;
  std::string position;  // RB, ILB, OLB, DT, DE, NT, CB, FS, SS, ...
};

struct BoxScore {
  PlayKey key;
  std::int32_t nflId = 0;
  std::uint8_t tackle = 0;
  std::uint8_t assist = 0;
  std::uint8_t forcedFumble = 0;
  std::uint8_t missedTackle = 0;
};

// A rejected row or play. Exactly one of line / playKey is meaningful.
struct Reject {
  std::string file;
  std::int64_t line = -1;     // 1-based physical line, -1 for play-level rejects
  std::string playKey;        // "gameId:playId" for play-level rejects
  std::string reason;
};

// All tracking rows of one (gameId, playId), as parsed, before standardization.
struct RawPlay {
  PlayKey key;
  std::vector<TrackingFrame> frames;
};

// A play with uniform rightward offense direction, resolved snap/end span and
// per-frame record grouping. frames is sorted by (frameId, nflId, ball-first).
struct StandardizedPlay {
  PlayMeta meta;
  std::vector<TrackingFrame> frames;
  std::vector<std::int32_t> frameIds;                    // sorted, unique
  std::vector<std::pair<std::size_t, std::size_t>> frameSpans;  // [begin, end) into frames
  std::int32_t snapFrame = 0;
  std::int32_t endFrame = 0;

  // Index into frameIds/frameSpans, or npos when the frameId is absent.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t frame_index(std::int32_t frameId) const {
    auto it = std::lower_bound(frameIds.begin(), frameIds.end(), frameId);
    if (it == frameIds.end() || *it != frameId) return npos;
    return static_cast<std::size_t>(it - frameIds.begin());
  }
};

}  // namespace fractackle
