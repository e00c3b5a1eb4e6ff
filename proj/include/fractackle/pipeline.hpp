#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "fractackle/analytics.hpp"
#include "fractackle/attribution.hpp"
#include "fractackle/ingest.hpp"
#include "fractackle/kinematics.hpp"
#include "fractackle/valuation.hpp"
#include "fractackle/windows.hpp"

namespace fractackle {

// Thread cap: FRACTACKLE_THREADS when set, hardware concurrency otherwise.
inline unsigned effective_threads(unsigned requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FRACTACKLE_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Index-addressed parallel map: results land by input index, so the output
// order is independent of scheduling. Exceptions propagate to the caller.
template <typename Out, typename Fn>
std::vector<Out> parallel_map(std::size_t count, unsigned threads, Fn&& fn) {
  std::vector<Out> results(count);
  if (count == 0) return results;
  threads = std::min<unsigned>(std::max(1u, threads), static_cast<unsigned>(count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex errorMutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      while (!failed.load(std::memory_order_relaxed)) {
        std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= count) break;
        try {
          results[i] = fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(errorMutex);
          if (!error) error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return results;
}

// Everything the pipeline derives for one play.
struct PlayResult {
  PlayKey key;
  BallCarrierTrack track;
  std::vector<std::int32_t> defense;  // roster, sorted
  std::vector<ContactWindow> windows;
  std::vector<WindowValue> values;
  std::vector<FrameCredit> frameCredits;
  std::vector<PlayerWindowCredit> credits;
  std::vector<Reject> rejects;
  bool ok = false;
};

struct PipelineConfig {
  CalibrationConfig calibration;
  double epsilonPeak = kDefaultPeakEpsilon;
  unsigned threads = 0;  // 0 = effective_threads()
  StandardizeOptions standardize;
};

struct PipelineOutput {
  CalibrationResult calibration;
  std::vector<StandardizedPlay> plays;   // filtered RB runs, sorted by key
  std::vector<PlayResult> results;       // aligned with plays
  std::vector<Reject> rejects;           // standardization + filtering + valuation
};

// Windows, values and credits for one standardized play at threshold D.
inline PlayResult analyze_play(const StandardizedPlay& play, double D, double epsilonPeak) {
  PlayResult result;
  result.key = play.meta.key;
  auto track = build_track(play, result.rejects);
  if (!track) return result;
  result.track = std::move(*track);
  DefenderFrames defenders = defender_frames(play, result.track);
  result.defense = defenders.roster;
  result.windows = detect_windows(result.track, defenders, D);
  for (const ContactWindow& w : result.windows) {
    auto value = value_window(w, result.rejects, epsilonPeak);
    if (!value) continue;
    AttributionResult credit = attribute(w, *value);
    result.values.push_back(*value);
    result.frameCredits.insert(result.frameCredits.end(), credit.frameCredits.begin(),
                               credit.frameCredits.end());
    result.credits.insert(result.credits.end(), credit.playerCredits.begin(),
                          credit.playerCredits.end());
  }
  result.ok = true;
  return result;
}

// Full pipeline over pre-filtered plays: calibrate (unless overridden), then
// per-play analysis as a deterministic parallel map.
inline PipelineOutput run_pipeline_on(std::vector<StandardizedPlay> plays,
                                      const PipelineConfig& config) {
  PipelineOutput out;
  out.plays = std::move(plays);
  std::sort(out.plays.begin(), out.plays.end(),
            [](const StandardizedPlay& a, const StandardizedPlay& b) { return a.meta.key < b.meta.key; });
  out.calibration = calibrate_threshold(out.plays, config.calibration);
  const double D = out.calibration.D;
  const unsigned threads = effective_threads(config.threads);
  out.results = parallel_map<PlayResult>(out.plays.size(), threads, [&](std::size_t i) {
    return analyze_play(out.plays[i], D, config.epsilonPeak);
  });
  for (const PlayResult& r : out.results) {
    out.rejects.insert(out.rejects.end(), r.rejects.begin(), r.rejects.end());
  }
  return out;
}

// load -> standardize -> RB-run filter -> analyze. Standardization is a
// parallel map over plays; rejects merge in play order.
inline PipelineOutput run_pipeline(const Dataset& dataset, const PipelineConfig& config) {
  struct StdResult {
    std::optional<StandardizedPlay> play;
    std::vector<Reject> rejects;
  };
  const unsigned threads = effective_threads(config.threads);
  std::vector<StdResult> perPlay =
      parallel_map<StdResult>(dataset.rawPlays.size(), threads, [&](std::size_t i) {
        StdResult r;
        const RawPlay& raw = dataset.rawPlays[i];
        const PlayMeta* meta = dataset.find_play(raw.key);
        if (meta == nullptr) {
          r.rejects.push_back(Reject{"standardize", -1, to_string(raw.key),
                                     "tracking present but play metadata missing"});
          return r;
        }
        r.play = standardize(raw, *meta, config.standardize, r.rejects);
        return r;
      });

  std::vector<Reject> rejects;
  std::vector<StandardizedPlay> standardized;
  standardized.reserve(perPlay.size());
  for (StdResult& r : perPlay) {
    rejects.insert(rejects.end(), r.rejects.begin(), r.rejects.end());
    if (r.play) standardized.push_back(std::move(*r.play));
  }
  std::vector<StandardizedPlay> filtered =
      filter_rb_runs(std::move(standardized), dataset.players, rejects);
  PipelineOutput out = run_pipeline_on(std::move(filtered), config);
  out.rejects.insert(out.rejects.begin(), rejects.begin(), rejects.end());
  return out;
}

// Per-play credits in the shape aggregate() consumes.
inline std::vector<PlayCredits> collect_play_credits(const PipelineOutput& out) {
  std::vector<PlayCredits> credits;
  credits.reserve(out.results.size());
  for (const PlayResult& r : out.results) {
    if (!r.ok) continue;
    credits.push_back(PlayCredits{r.key, r.defense, r.credits});
  }
  return credits;
}

}  // namespace fractackle
