#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fractackle/attribution.hpp"
#include "fractackle/types.hpp"
#include "fractackle/windows.hpp"

namespace fractackle {

enum class PositionGroup : std::uint8_t { DefensiveBacks, DefensiveLine, Linebackers, Other };

inline std::string_view to_string(PositionGroup g) {
  switch (g) {
    case PositionGroup::DefensiveBacks: return "defensiveBacks";
    case PositionGroup::DefensiveLine: return "defensiveLine";
    case PositionGroup::Linebackers: return "linebackers";
    case PositionGroup::Other: return "other";
  }
  return "unknown";
}

inline PositionGroup position_group(std::string_view position) {
  if (position == "CB" || position == "FS" || position == "SS" || position == "DB") {
    return PositionGroup::DefensiveBacks;
  }
  if (position == "DT" || position == "DE" || position == "NT") {
    return PositionGroup::DefensiveLine;
  }
  if (position == "ILB" || position == "OLB" || position == "MLB" || position == "LB") {
    return PositionGroup::Linebackers;
  }
  return PositionGroup::Other;
}

// Per-defender totals over a filtered play set.
struct PlayerAggregate {
  std::int32_t defenderId = 0;
  std::string displayName;
  std::string position;
  std::int64_t plays = 0;      // filtered plays with this defender on defense
  std::int64_t windows = 0;    // windows the defender was involved in
  double totalFT = 0.0;
  double avgFT = 0.0;          // totalFT / plays
  std::int64_t tackles = 0;    // over the same plays
  std::int64_t assists = 0;
  std::int64_t forcedFumbles = 0;
  std::int64_t missedTackles = 0;

  double combined_tackles() const {
    return static_cast<double>(tackles) + static_cast<double>(assists) / 2.0;
  }
};

// The defensive roster of one filtered play plus its credits, the unit of
// aggregation.
struct PlayCredits {
  PlayKey key;
  std::vector<std::int32_t> defense;                // 11 defender ids
  std::vector<PlayerWindowCredit> credits;          // all windows of the play
};

// Folds per-play credits and box scores into per-defender aggregates, sorted
// by totalFT descending (ties by defenderId). Accumulation runs in play order
// and the output order is fixed, so results are reproducible.
inline std::vector<PlayerAggregate> aggregate(std::span<const PlayCredits> playCredits,
                                              std::span<const BoxScore> boxscores,
                                              const std::unordered_map<std::int32_t, PlayerMeta>& players) {
  std::map<std::int32_t, PlayerAggregate> acc;
  std::unordered_map<PlayKey, bool, PlayKeyHash> inSet;
  inSet.reserve(playCredits.size() * 2);

  for (const PlayCredits& pc : playCredits) {
    inSet.emplace(pc.key, true);
    for (std::int32_t id : pc.defense) {
      PlayerAggregate& agg = acc[id];
      agg.defenderId = id;
      agg.plays += 1;
    }
    for (const PlayerWindowCredit& credit : pc.credits) {
      auto it = acc.find(credit.defenderId);
      if (it == acc.end()) {
        throw DataError("credit references defender " + std::to_string(credit.defenderId) +
                        " not on the defense of play " + to_string(pc.key));
      }
      it->second.totalFT += credit.wPlayer;
      it->second.windows += 1;
    }
  }

  // Box scores joined over the same filtered plays only.
  for (const BoxScore& b : boxscores) {
    if (!inSet.count(b.key)) continue;
    auto it = acc.find(b.nflId);
    if (it == acc.end()) continue;  // box-score row for a non-defender; ignore
    it->second.tackles += b.tackle;
    it->second.assists += b.assist;
    it->second.forcedFumbles += b.forcedFumble;
    it->second.missedTackles += b.missedTackle;
  }

  std::vector<PlayerAggregate> out;
  out.reserve(acc.size());
  for (auto& [id, agg] : acc) {
    auto meta = players.find(id);
    if (meta == players.end()) {
      throw DataError("credit references unknown defenderId " + std::to_string(id));
    }
    agg.displayName = meta->second.displayName;
    agg.position = meta->second.position;
    agg.avgFT = agg.plays > 0 ? agg.totalFT / static_cast<double>(agg.plays) : 0.0;
    out.push_back(std::move(agg));
  }
  std::sort(out.begin(), out.end(), [](const PlayerAggregate& a, const PlayerAggregate& b) {
    if (a.totalFT != b.totalFT) return a.totalFT > b.totalFT;
    return a.defenderId < b.defenderId;
  });
  return out;
}

struct WindowSummary {
  std::vector<int> durationFrames;                 // T per window
  std::map<int, std::int64_t> windowsPerPlay;      // count -> plays
  std::map<int, std::int64_t> defendersPerWindow;  // distinct defenders -> windows
  double meanDurationSeconds = 0.0;
  std::int64_t totalWindows = 0;
};

inline WindowSummary window_summaries(std::span<const std::vector<ContactWindow>> perPlayWindows) {
  WindowSummary s;
  double durationSum = 0.0;
  for (const std::vector<ContactWindow>& windows : perPlayWindows) {
    if (!windows.empty()) s.windowsPerPlay[static_cast<int>(windows.size())] += 1;
    for (const ContactWindow& w : windows) {
      s.durationFrames.push_back(w.frameCount);
      durationSum += static_cast<double>(w.frameCount) / kFrameRateHz;
      std::vector<std::int32_t> ids;
      for (const auto& frame : w.perFrameDefenders) ids.insert(ids.end(), frame.begin(), frame.end());
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      s.defendersPerWindow[static_cast<int>(ids.size())] += 1;
      s.totalWindows += 1;
    }
  }
  s.meanDurationSeconds = s.totalWindows > 0 ? durationSum / static_cast<double>(s.totalWindows) : 0.0;
  return s;
}

struct CorrelationReport {
  std::string label;
  std::size_t n = 0;
  double r = 0.0;
  double ciLow = 0.0;
  double ciHigh = 0.0;
  bool valid = true;       // false: too few pairs or zero variance
  std::string note;
};

// Pearson correlation with a 95% confidence interval via the Fisher
// transform: z = atanh(r), half-width 1.96/sqrt(n-3).
inline CorrelationReport correlate(std::span<const double> xs, std::span<const double> ys,
                                   std::string label = {}) {
  if (xs.size() != ys.size()) throw DataError("correlate: length mismatch");
  const std::size_t n = xs.size();
  if (n < 4) throw DataError("correlate: need at least 4 pairs, got " + std::to_string(n));

  double meanX = 0.0, meanY = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    meanX += xs[i];
    meanY += ys[i];
  }
  meanX /= static_cast<double>(n);
  meanY /= static_cast<double>(n);

  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - meanX;
    const double dy = ys[i] - meanY;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DataError("correlate: undefined correlation (zero variance)");
  }

  CorrelationReport rep;
  rep.label = std::move(label);
  rep.n = n;
  rep.r = sxy / std::sqrt(sxx * syy);
  // atanh is infinite at |r| = 1; the interval degenerates to (r, r).
  if (rep.r >= 1.0) {
    rep.r = 1.0;
    rep.ciLow = rep.ciHigh = 1.0;
    return rep;
  }
  if (rep.r <= -1.0) {
    rep.r = -1.0;
    rep.ciLow = rep.ciHigh = -1.0;
    return rep;
  }
  const double z = std::atanh(rep.r);
  const double half = 1.96 / std::sqrt(static_cast<double>(n - 3));
  rep.ciLow = std::tanh(z - half);
  rep.ciHigh = std::tanh(z + half);
  return rep;
}

// One player's totals in the two split-half periods, both metrics.
struct StabilityRow {
  std::int32_t defenderId = 0;
  std::string displayName;
  PositionGroup group = PositionGroup::Other;
  double ftA = 0.0, ftB = 0.0;              // total fractional tackles
  double ctA = 0.0, ctB = 0.0;              // combined tackles
  double ftResidualA = 0.0, ftResidualB = 0.0;
  double ctResidualA = 0.0, ctResidualB = 0.0;
};

struct StabilityReport {
  std::vector<StabilityRow> rows;               // sorted by defenderId
  std::vector<CorrelationReport> fractional;    // overall + three groups
  std::vector<CorrelationReport> combined;      // same layout
};

// Split-half stability: correlates period-A vs period-B totals overall, and
// within each position group after removing the group mean per period.
// Players present in only one period enter with 0 in the other.
inline StabilityReport stability(std::span<const PlayerAggregate> periodA,
                                 std::span<const PlayerAggregate> periodB) {
  std::map<std::int32_t, StabilityRow> rows;
  auto fold = [&](const PlayerAggregate& agg, bool isA) {
    StabilityRow& row = rows[agg.defenderId];
    row.defenderId = agg.defenderId;
    row.displayName = agg.displayName;
    row.group = position_group(agg.position);
    (isA ? row.ftA : row.ftB) = agg.totalFT;
    (isA ? row.ctA : row.ctB) = agg.combined_tackles();
  };
  for (const PlayerAggregate& agg : periodA) fold(agg, true);
  for (const PlayerAggregate& agg : periodB) fold(agg, false);

  StabilityReport report;
  report.rows.reserve(rows.size());
  for (auto& [id, row] : rows) report.rows.push_back(std::move(row));

  struct Series {
    std::vector<double> xs, ys;
    std::vector<StabilityRow*> members;
  };
  auto groupSeries = [&](std::optional<PositionGroup> g, bool fractional) {
    Series s;
    for (StabilityRow& row : report.rows) {
      if (g && row.group != *g) continue;
      s.xs.push_back(fractional ? row.ftA : row.ctA);
      s.ys.push_back(fractional ? row.ftB : row.ctB);
      s.members.push_back(&row);
    }
    return s;
  };
  auto residualize = [](Series& s) {
    double meanX = 0.0, meanY = 0.0;
    for (double v : s.xs) meanX += v;
    for (double v : s.ys) meanY += v;
    if (!s.xs.empty()) {
      meanX /= static_cast<double>(s.xs.size());
      meanY /= static_cast<double>(s.ys.size());
    }
    for (double& v : s.xs) v -= meanX;
    for (double& v : s.ys) v -= meanY;
  };

  // A group that cannot be correlated (too few players, zero variance) gets
  // an invalid report rather than aborting the others.
  auto safe_correlate = [](const std::vector<double>& xs, const std::vector<double>& ys,
                           const std::string& label) {
    try {
      return correlate(xs, ys, label);
    } catch (const DataError& e) {
      CorrelationReport rep;
      rep.label = label;
      rep.n = xs.size();
      rep.valid = false;
      rep.note = e.what();
      return rep;
    }
  };

  const PositionGroup groups[] = {PositionGroup::DefensiveBacks, PositionGroup::DefensiveLine,
                                  PositionGroup::Linebackers};
  for (bool fractional : {true, false}) {
    std::vector<CorrelationReport>& out = fractional ? report.fractional : report.combined;
    std::string metric = fractional ? "fractionalTackles" : "combinedTackles";
    {
      Series s = groupSeries(std::nullopt, fractional);
      out.push_back(safe_correlate(s.xs, s.ys, metric + "/overall"));
    }
    for (PositionGroup g : groups) {
      Series s = groupSeries(g, fractional);
      residualize(s);
      for (std::size_t i = 0; i < s.members.size(); ++i) {
        StabilityRow& row = *s.members[i];
        (fractional ? row.ftResidualA : row.ctResidualA) = s.xs[i];
        (fractional ? row.ftResidualB : row.ctResidualB) = s.ys[i];
      }
      out.push_back(safe_correlate(s.xs, s.ys, metric + "/" + std::string(to_string(g))));
    }
  }
  return report;
}

}  // namespace fractackle
