#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>

#include "fractackle/types.hpp"
#include "fractackle/windows.hpp"

namespace fractackle {

// Guard against division blow-up on plays whose carrier never moves forward.
inline constexpr double kDefaultPeakEpsilon = 1e-6;  // yd/s

enum class CaseTag : std::uint8_t {
  Plain,            // ratio applied as-is
  PeakInside,       // peak velocity attained inside the window; start replaced
  FullRecovery,     // post-window velocity reaches the peak; zero value
  PartialRecovery,  // post-window velocity between end and peak; end replaced
  DegeneratePeak,   // peak at or below epsilon; zero value
};

inline std::string_view to_string(CaseTag tag) {
  switch (tag) {
    case CaseTag::Plain: return "plain";
    case CaseTag::PeakInside: return "peakInside";
    case CaseTag::FullRecovery: return "fullRecovery";
    case CaseTag::PartialRecovery: return "partialRecovery";
    case CaseTag::DegeneratePeak: return "degeneratePeak";
  }
  return "unknown";
}

struct WindowValue {
  PlayKey key;
  int index = 0;
  double w = 0.0;  // dimensionless, [0, 1]
  CaseTag caseTag = CaseTag::Plain;
};

// Window value from the four landmarks: the drop between the effective start
// and end velocities as a fraction of the peak. Forward velocities below zero
// enter the ratio as zero; the peak itself is left unclamped. Rule order:
//   (a) peak at or below epsilon            -> 0
//   (b) peak inside the window              -> effective start = peak
//   (c) post-window max reaches the peak    -> 0 (full recovery)
//   (d) post-window max in [end, peak)      -> effective end = post-window max
//   (e) w = clamp((start - end) / peak, 0, 1)
// vPost may be -inf when the window ends the play.
inline WindowValue value_landmarks(double vStart, double vEnd, double vPre, double vPost,
                                   bool prePeakInsideWindow,
                                   double epsilon = kDefaultPeakEpsilon) {
  WindowValue out;
  if (vPre <= epsilon) {
    out.w = 0.0;
    out.caseTag = CaseTag::DegeneratePeak;
    return out;
  }
  const double start = std::max(vStart, 0.0);
  const double end = std::max(vEnd, 0.0);
  const double post = std::max(vPost, 0.0);

  if (post >= vPre) {
    out.w = 0.0;
    out.caseTag = CaseTag::FullRecovery;
    return out;
  }
  double a = prePeakInsideWindow ? std::max(vPre, 0.0) : start;
  double b = end;
  bool endReplaced = false;
  if (end <= post && post < vPre) {
    b = post;
    endReplaced = true;
  }
  out.w = std::clamp((a - b) / vPre, 0.0, 1.0);
  out.caseTag = prePeakInsideWindow ? CaseTag::PeakInside
                                    : (endReplaced ? CaseTag::PartialRecovery : CaseTag::Plain);
  return out;
}

// Applies the valuation rules to a detected window. Returns nullopt and logs
// a reject when a landmark is non-finite (the -inf vPost sentinel excepted).
inline std::optional<WindowValue> value_window(const ContactWindow& window,
                                               std::vector<Reject>& rejects,
                                               double epsilon = kDefaultPeakEpsilon) {
  const bool postOk = std::isfinite(window.vPost) ||
                      window.vPost == -std::numeric_limits<double>::infinity();
  if (!std::isfinite(window.vStart) || !std::isfinite(window.vEnd) ||
      !std::isfinite(window.vPre) || !postOk) {
    rejects.push_back(Reject{"value_window", -1, to_string(window.key),
                             "non-finite velocity landmark in window " + std::to_string(window.index)});
    return std::nullopt;
  }
  WindowValue v = value_landmarks(window.vStart, window.vEnd, window.vPre, window.vPost,
                                  window.prePeakInsideWindow, epsilon);
  v.key = window.key;
  v.index = window.index;
  return v;
}

}  // namespace fractackle
