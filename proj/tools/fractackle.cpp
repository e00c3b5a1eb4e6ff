// fractackle: fractional-tackle analytics over 10 Hz football tracking data.
//
// Subcommands: calibrate, windows, credit, leaderboard, validate,
// export-play, synth. Every run writes its primary artifact atomically plus
// a <artifact>.manifest.json with inputs, config hash, row counts and
// timings. Exit codes: 0 success, 1 data error, 2 usage error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fractackle/analytics.hpp"
#include "fractackle/harness.hpp"
#include "fractackle/ingest.hpp"
#include "fractackle/io.hpp"
#include "fractackle/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fractackle;

namespace {

struct RunConfig {
  std::string dataDir;
  std::set<int> weeks = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::optional<double> thresholdD;
  double percentile = 0.95;
  double epsilonPeak = kDefaultPeakEpsilon;
  int minPlays = 0;
  std::string outputFormat = "csv";
  unsigned threads = 0;
};

std::set<int> parse_weeks(const std::string& text) {
  std::set<int> weeks;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    auto dash = part.find('-');
    if (dash == std::string::npos) {
      weeks.insert(std::stoi(part));
    } else {
      int lo = std::stoi(part.substr(0, dash));
      int hi = std::stoi(part.substr(dash + 1));
      for (int w = lo; w <= hi; ++w) weeks.insert(w);
    }
  }
  if (weeks.empty()) throw CLI::ValidationError("--weeks", "no weeks given");
  for (int w : weeks) {
    if (w < 1 || w > 9) throw CLI::ValidationError("--weeks", "weeks must lie in 1-9");
  }
  return weeks;
}

std::string weeks_to_string(const std::set<int>& weeks) {
  std::string out;
  for (int w : weeks) {
    if (!out.empty()) out += ",";
    out += std::to_string(w);
  }
  return out;
}

// Flat key=value configuration file; '#' starts a comment.
void apply_config_file(const std::string& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      std::size_t a = s.find_first_not_of(" \t\r");
      std::size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError("config line " + std::to_string(lineNo) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "dataDir") config.dataDir = value;
    else if (key == "weeks") config.weeks = parse_weeks(value);
    else if (key == "thresholdD") config.thresholdD = std::stod(value);
    else if (key == "percentile") config.percentile = std::stod(value);
    else if (key == "epsilonPeak") config.epsilonPeak = std::stod(value);
    else if (key == "minPlays") config.minPlays = std::stoi(value);
    else if (key == "outputFormat") config.outputFormat = value;
    else if (key == "threads") config.threads = static_cast<unsigned>(std::stoul(value));
    else throw DataError("config line " + std::to_string(lineNo) + ": unknown key '" + key + "'");
  }
  if (config.thresholdD && *config.thresholdD <= 0.0) {
    throw DataError("thresholdD must be positive");
  }
}

std::string config_fingerprint(const RunConfig& config) {
  std::string canon = "dataDir=" + config.dataDir + ";weeks=" + weeks_to_string(config.weeks) +
                      ";thresholdD=" + (config.thresholdD ? fmt6(*config.thresholdD) : "auto") +
                      ";percentile=" + fmt6(config.percentile) +
                      ";epsilonPeak=" + fmt6(config.epsilonPeak) +
                      ";minPlays=" + std::to_string(config.minPlays) +
                      ";outputFormat=" + config.outputFormat;
  return hex64(fnv1a(canon));
}

class Stopwatch {
 public:
  double elapsed_ms() const {
    auto now = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(now - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct LoadedPipeline {
  Dataset dataset;
  PipelineOutput output;
  double loadMs = 0.0;
  double pipelineMs = 0.0;
};

LoadedPipeline load_and_run(const RunConfig& config) {
  if (config.dataDir.empty()) throw DataError("no data directory given (--data or config dataDir)");
  LoadedPipeline lp;
  Stopwatch loadTimer;
  lp.dataset = load_dataset(config.dataDir, config.weeks);
  lp.loadMs = loadTimer.elapsed_ms();

  PipelineConfig pc;
  pc.calibration.percentile = config.percentile;
  pc.calibration.overrideD = config.thresholdD;
  pc.epsilonPeak = config.epsilonPeak;
  pc.threads = config.threads;
  Stopwatch pipeTimer;
  lp.output = run_pipeline(lp.dataset, pc);
  lp.pipelineMs = pipeTimer.elapsed_ms();
  return lp;
}

json manifest_base(const std::string& command, const RunConfig& config) {
  json m;
  m["command"] = command;
  m["configHash"] = config_fingerprint(config);
  m["config"] = {{"dataDir", config.dataDir},
                 {"weeks", config.weeks},
                 {"thresholdD", config.thresholdD ? json(*config.thresholdD) : json(nullptr)},
                 {"percentile", config.percentile},
                 {"epsilonPeak", config.epsilonPeak},
                 {"minPlays", config.minPlays},
                 {"outputFormat", config.outputFormat},
                 {"threads", effective_threads(config.threads)}};
  auto now = std::chrono::system_clock::now().time_since_epoch();
  m["unixTimeMs"] = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  return m;
}

void fill_manifest_counts(json& m, const LoadedPipeline& lp) {
  json counts;
  for (const auto& [file, c] : lp.dataset.counts) {
    counts[file] = {{"total", c.total}, {"accepted", c.accepted}, {"rejected", c.rejected}};
  }
  m["rowCounts"] = counts;
  std::size_t windows = 0;
  for (const PlayResult& r : lp.output.results) windows += r.windows.size();
  m["plays"] = {{"loaded", lp.dataset.rawPlays.size()},
                {"filtered", lp.output.plays.size()},
                {"windows", windows}};
  m["rejects"] = {{"load", lp.dataset.rejects.size()}, {"pipeline", lp.output.rejects.size()}};
  m["timings"] = {{"loadMs", lp.loadMs}, {"pipelineMs", lp.pipelineMs}};
}

void write_manifest(const fs::path& artifact, json m) {
  fs::path path = artifact;
  path += ".manifest.json";
  atomic_write_file(path, m.dump(2) + "\n");
}

void write_rejects(const fs::path& artifact, const Dataset& ds, const PipelineOutput& out) {
  fs::path path = artifact;
  path += ".rejects.jsonl";
  std::string body;
  auto add = [&](const Reject& r) {
    json j;
    j["file"] = r.file;
    if (r.line >= 0) j["line"] = r.line;
    if (!r.playKey.empty()) j["playKey"] = r.playKey;
    j["reason"] = r.reason;
    body += j.dump() + "\n";
  };
  for (const Reject& r : ds.rejects) add(r);
  for (const Reject& r : out.rejects) add(r);
  atomic_write_file(path, body);
}

std::string format_vpost(double v) {
  return std::isfinite(v) ? fmt6(v) : "-inf";
}

// --- subcommand bodies ------------------------------------------------------

int cmd_calibrate(const RunConfig& config, const fs::path& out) {
  LoadedPipeline lp = load_and_run(config);
  const CalibrationResult& cal = lp.output.calibration;

  auto deciles = [](const std::vector<double>& sorted) {
    json arr = json::array();
    if (sorted.empty()) return arr;
    for (int i = 1; i <= 9; ++i) {
      double p = 0.1 * i;
      std::size_t k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size()) - 1e-9));
      if (k == 0) k = 1;
      arr.push_back(sorted[k - 1]);
    }
    return arr;
  };

  json j;
  j["D"] = cal.D;
  j["percentile"] = cal.percentile;
  j["overridden"] = cal.overridden;
  j["sampleCount"] = {{"first_contact", cal.firstContactSamples.size()},
                      {"tackle", cal.tackleSamples.size()}};
  j["deciles"] = {{"first_contact", deciles(cal.firstContactSamples)},
                  {"tackle", deciles(cal.tackleSamples)}};
  atomic_write_file(out, j.dump(2) + "\n");

  json m = manifest_base("calibrate", config);
  fill_manifest_counts(m, lp);
  m["outputs"] = {out.string()};
  write_manifest(out, m);
  write_rejects(out, lp.dataset, lp.output);
  std::cout << "D = " << fmt6(cal.D) << " (" << cal.firstContactSamples.size()
            << " first_contact, " << cal.tackleSamples.size() << " tackle samples)\n";
  return 0;
}

int cmd_windows(const RunConfig& config, const fs::path& out) {
  LoadedPipeline lp = load_and_run(config);
  std::string csv = "gameId,playId,windowIndex,startFrame,endFrame,T,vStart,vEnd,vPre,vPost,w,caseTag\n";
  for (const PlayResult& r : lp.output.results) {
    for (std::size_t j = 0; j < r.windows.size(); ++j) {
      const ContactWindow& w = r.windows[j];
      const WindowValue* v = j < r.values.size() ? &r.values[j] : nullptr;
      csv += std::to_string(w.key.gameId) + "," + std::to_string(w.key.playId) + "," +
             std::to_string(w.index) + "," + std::to_string(w.startFrame) + "," +
             std::to_string(w.endFrame) + "," + std::to_string(w.frameCount) + "," +
             fmt6(w.vStart) + "," + fmt6(w.vEnd) + "," + fmt6(w.vPre) + "," +
             format_vpost(w.vPost) + ",";
      csv += v ? fmt6(v->w) : std::string("rejected");
      csv += ",";
      csv += v ? std::string(to_string(v->caseTag)) : std::string("rejected");
      csv += "\n";
    }
  }
  atomic_write_file(out, csv);

  json m = manifest_base("windows", config);
  fill_manifest_counts(m, lp);
  m["D"] = lp.output.calibration.D;
  m["outputs"] = {out.string()};
  write_manifest(out, m);
  write_rejects(out, lp.dataset, lp.output);
  return 0;
}

int cmd_credit(const RunConfig& config, const fs::path& out) {
  LoadedPipeline lp = load_and_run(config);
  std::string csv = "gameId,playId,windowIndex,nflId,wPlayer,framesInvolved\n";
  for (const PlayResult& r : lp.output.results) {
    for (const PlayerWindowCredit& c : r.credits) {
      csv += std::to_string(c.key.gameId) + "," + std::to_string(c.key.playId) + "," +
             std::to_string(c.windowIndex) + "," + std::to_string(c.defenderId) + "," +
             fmt6(c.wPlayer) + "," + std::to_string(c.framesInvolved) + "\n";
    }
  }
  atomic_write_file(out, csv);

  json m = manifest_base("credit", config);
  fill_manifest_counts(m, lp);
  m["D"] = lp.output.calibration.D;
  m["outputs"] = {out.string()};
  write_manifest(out, m);
  write_rejects(out, lp.dataset, lp.output);
  return 0;
}

json aggregate_to_json(const PlayerAggregate& a) {
  return json{{"nflId", a.defenderId},
              {"displayName", a.displayName},
              {"position", a.position},
              {"plays", a.plays},
              {"windows", a.windows},
              {"totalFT", a.totalFT},
              {"avgFT", a.avgFT},
              {"tackles", a.tackles},
              {"assists", a.assists},
              {"forcedFumbles", a.forcedFumbles},
              {"missedTackles", a.missedTackles},
              {"combinedTackles", a.combined_tackles()}};
}

int cmd_leaderboard(const RunConfig& config, const fs::path& out, long top, int minPlays,
                    const std::string& sortKey) {
  LoadedPipeline lp = load_and_run(config);
  auto aggregates =
      aggregate(collect_play_credits(lp.output), lp.dataset.boxscores, lp.dataset.players);

  std::erase_if(aggregates, [&](const PlayerAggregate& a) { return a.plays < minPlays; });
  if (sortKey == "average") {
    std::stable_sort(aggregates.begin(), aggregates.end(),
                     [](const PlayerAggregate& a, const PlayerAggregate& b) {
                       if (a.avgFT != b.avgFT) return a.avgFT > b.avgFT;
                       return a.defenderId < b.defenderId;
                     });
  }
  if (top >= 0 && static_cast<std::size_t>(top) < aggregates.size()) {
    aggregates.resize(static_cast<std::size_t>(top));
  }

  if (config.outputFormat == "json") {
    json rows = json::array();
    for (const PlayerAggregate& a : aggregates) rows.push_back(aggregate_to_json(a));
    atomic_write_file(out, rows.dump(2) + "\n");
  } else {
    std::string csv =
        "nflId,displayName,position,plays,windows,totalFT,avgFT,tackles,assists,"
        "forcedFumbles,missedTackles,combinedTackles\n";
    for (const PlayerAggregate& a : aggregates) {
      csv += std::to_string(a.defenderId) + "," + a.displayName + "," + a.position + "," +
             std::to_string(a.plays) + "," + std::to_string(a.windows) + "," + fmt6(a.totalFT) +
             "," + fmt6(a.avgFT) + "," + std::to_string(a.tackles) + "," +
             std::to_string(a.assists) + "," + std::to_string(a.forcedFumbles) + "," +
             std::to_string(a.missedTackles) + "," + fmt6(a.combined_tackles()) + "\n";
    }
    atomic_write_file(out, csv);
  }

  json m = manifest_base("leaderboard", config);
  fill_manifest_counts(m, lp);
  m["D"] = lp.output.calibration.D;
  m["flags"] = {{"top", top}, {"minPlays", minPlays}, {"sort", sortKey}};
  m["outputs"] = {out.string()};
  write_manifest(out, m);
  write_rejects(out, lp.dataset, lp.output);
  return 0;
}

json correlation_to_json(const CorrelationReport& r) {
  json j;
  j["label"] = r.label;
  j["n"] = r.n;
  j["valid"] = r.valid;
  if (r.valid) {
    j["r"] = r.r;
    j["ci95"] = {r.ciLow, r.ciHigh};
  } else {
    j["note"] = r.note;
  }
  return j;
}

int cmd_validate(const RunConfig& config, const fs::path& outDir) {
  LoadedPipeline lp = load_and_run(config);
  fs::create_directories(outDir);

  auto aggregates =
      aggregate(collect_play_credits(lp.output), lp.dataset.boxscores, lp.dataset.players);

  // Fig. 6 analogue: totals against combined tackles.
  json correlations = json::array();
  {
    std::vector<double> xs, ys;
    for (const PlayerAggregate& a : aggregates) {
      xs.push_back(a.totalFT);
      ys.push_back(a.combined_tackles());
    }
    try {
      correlations.push_back(correlation_to_json(correlate(xs, ys, "totalFT~combinedTackles")));
    } catch (const DataError& e) {
      correlations.push_back(json{{"label", "totalFT~combinedTackles"}, {"valid", false},
                                  {"note", e.what()}});
    }
    std::string csv = "nflId,displayName,position,positionGroup,totalFT,combinedTackles\n";
    for (const PlayerAggregate& a : aggregates) {
      csv += std::to_string(a.defenderId) + "," + a.displayName + "," + a.position + "," +
             std::string(to_string(position_group(a.position))) + "," + fmt6(a.totalFT) + "," +
             fmt6(a.combined_tackles()) + "\n";
    }
    atomic_write_file(outDir / "overstate_scatter.csv", csv);
  }

  // Split-half stability: weeks 1-4 against weeks 5-9.
  auto periodCredits = [&](bool firstHalf) {
    std::vector<PlayCredits> credits;
    std::vector<BoxScore> box;
    std::set<PlayKey> keys;
    for (std::size_t i = 0; i < lp.output.plays.size(); ++i) {
      int week = lp.output.plays[i].meta.week;
      bool inPeriod = firstHalf ? week <= 4 : week >= 5;
      if (!inPeriod || !lp.output.results[i].ok) continue;
      const PlayResult& r = lp.output.results[i];
      credits.push_back(PlayCredits{r.key, r.defense, r.credits});
      keys.insert(r.key);
    }
    for (const BoxScore& b : lp.dataset.boxscores) {
      if (keys.count(b.key)) box.push_back(b);
    }
    return std::pair(credits, box);
  };
  auto [creditsA, boxA] = periodCredits(true);
  auto [creditsB, boxB] = periodCredits(false);
  json stabilityJson;
  json scatterRows = json::array();
  if (!creditsA.empty() && !creditsB.empty()) {
    auto aggA = aggregate(creditsA, boxA, lp.dataset.players);
    auto aggB = aggregate(creditsB, boxB, lp.dataset.players);
    StabilityReport rep = stability(aggA, aggB);
    json fr = json::array(), cm = json::array();
    for (const CorrelationReport& r : rep.fractional) fr.push_back(correlation_to_json(r));
    for (const CorrelationReport& r : rep.combined) cm.push_back(correlation_to_json(r));
    stabilityJson = {{"fractionalTackles", fr}, {"combinedTackles", cm}};
    std::string csv =
        "nflId,displayName,positionGroup,ftA,ftB,ctA,ctB,ftResidualA,ftResidualB,"
        "ctResidualA,ctResidualB\n";
    for (const StabilityRow& row : rep.rows) {
      csv += std::to_string(row.defenderId) + "," + row.displayName + "," +
             std::string(to_string(row.group)) + "," + fmt6(row.ftA) + "," + fmt6(row.ftB) +
             "," + fmt6(row.ctA) + "," + fmt6(row.ctB) + "," + fmt6(row.ftResidualA) + "," +
             fmt6(row.ftResidualB) + "," + fmt6(row.ctResidualA) + "," + fmt6(row.ctResidualB) +
             "\n";
    }
    atomic_write_file(outDir / "stability_scatter.csv", csv);
  } else {
    stabilityJson = {{"note", "need plays in both week 1-4 and week 5-9 periods"}};
  }

  // Fig. 3 analogue: window summaries.
  std::vector<std::vector<ContactWindow>> perPlay;
  for (const PlayResult& r : lp.output.results) perPlay.push_back(r.windows);
  WindowSummary summary = window_summaries(perPlay);
  json js;
  js["totalWindows"] = summary.totalWindows;
  js["meanDurationSeconds"] = summary.meanDurationSeconds;
  js["windowsPerPlay"] = json::object();
  for (const auto& [k, v] : summary.windowsPerPlay) js["windowsPerPlay"][std::to_string(k)] = v;
  js["defendersPerWindow"] = json::object();
  for (const auto& [k, v] : summary.defendersPerWindow) {
    js["defendersPerWindow"][std::to_string(k)] = v;
  }
  json durations = json::object();
  {
    std::map<int, std::int64_t> hist;
    for (int frames : summary.durationFrames) hist[frames] += 1;
    for (const auto& [frames, count] : hist) durations[std::to_string(frames)] = count;
  }
  js["durationFramesHistogram"] = durations;

  json report;
  report["D"] = lp.output.calibration.D;
  report["correlations"] = correlations;
  report["stability"] = stabilityJson;
  report["windowSummary"] = js;
  atomic_write_file(outDir / "correlations.json", report.dump(2) + "\n");

  json m = manifest_base("validate", config);
  fill_manifest_counts(m, lp);
  m["D"] = lp.output.calibration.D;
  m["outputs"] = {(outDir / "correlations.json").string(),
                  (outDir / "overstate_scatter.csv").string(),
                  (outDir / "stability_scatter.csv").string()};
  write_manifest(outDir / "validate", m);
  write_rejects(outDir / "validate", lp.dataset, lp.output);
  std::cout << "validation artifacts written to " << outDir.string() << "\n";
  return 0;
}

int cmd_export_play(const RunConfig& config, const fs::path& out, std::int64_t gameId,
                    std::int32_t playId, bool withFiniteDiff) {
  LoadedPipeline lp = load_and_run(config);
  const PlayResult* hit = nullptr;
  for (const PlayResult& r : lp.output.results) {
    if (r.key.gameId == gameId && r.key.playId == playId && r.ok) hit = &r;
  }
  if (hit == nullptr) {
    throw DataError("play " + std::to_string(gameId) + ":" + std::to_string(playId) +
                    " not found among filtered RB runs");
  }
  std::vector<double> fd;
  if (withFiniteDiff) fd = finite_difference_velocity(hit->track);
  std::string csv = withFiniteDiff ? "frameId,x,y,vToward,vFiniteDiff\n"
                                   : "frameId,x,y,vToward\n";
  for (std::size_t t = 0; t < hit->track.size(); ++t) {
    const TrackPoint& p = hit->track.points[t];
    csv += std::to_string(p.frameId) + "," + fmt6(p.x) + "," + fmt6(p.y) + "," + fmt6(p.vToward);
    if (withFiniteDiff) csv += "," + fmt6(fd[t]);
    csv += "\n";
  }
  atomic_write_file(out, csv);

  json m = manifest_base("export-play", config);
  fill_manifest_counts(m, lp);
  m["play"] = {{"gameId", gameId}, {"playId", playId}};
  m["outputs"] = {out.string()};
  write_manifest(out, m);
  return 0;
}

int cmd_synth(const fs::path& outDir, std::uint64_t seed, int plays, int weekSpread) {
  Rng rng(seed);
  std::vector<SyntheticPlaySpec> specs;
  for (int i = 0; i < plays; ++i) {
    int week = 1 + (i % weekSpread);
    std::int64_t gameId = 1000 + week;
    specs.push_back(random_play_spec(rng, gameId, i + 1, week));
  }
  write_synthetic_dataset(outDir, specs);

  RunConfig config;
  config.dataDir = outDir.string();
  json m = manifest_base("synth", config);
  m["flags"] = {{"seed", seed}, {"plays", plays}, {"weekSpread", weekSpread}};
  m["outputs"] = {(outDir / "sidecar.json").string()};
  write_manifest(outDir / "synth", m);
  std::cout << "synthetic dataset with " << plays << " plays written to " << outDir.string()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fractional tackles from player tracking data"};
  app.require_subcommand(1);

  std::string configFile;
  std::optional<std::string> dataDir;
  std::optional<std::string> weeksText;
  std::optional<double> thresholdD;
  std::optional<double> percentile;
  std::optional<double> epsilonPeak;
  std::optional<unsigned> threads;
  std::optional<std::string> format;

  app.add_option("--config", configFile, "flat key=value configuration file");
  app.add_option("--data", dataDir, "dataset directory");
  app.add_option("--weeks", weeksText, "weeks to load, e.g. 1-9 or 1,3,5");
  app.add_option("--d", thresholdD, "contact threshold in yards (bypasses calibration)");
  app.add_option("--percentile", percentile, "calibration percentile in (0,1)");
  app.add_option("--epsilon", epsilonPeak, "degenerate-peak guard, yd/s");
  app.add_option("--threads", threads, "worker thread cap (default: FRACTACKLE_THREADS or all cores)");
  app.add_option("--format", format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  std::string outPath = "out";
  auto* calibrate = app.add_subcommand("calibrate", "calibrate the contact distance threshold D");
  calibrate->add_option("--out", outPath, "output JSON path");

  auto* windows = app.add_subcommand("windows", "emit one row per contact window");
  windows->add_option("--out", outPath, "output CSV path");

  auto* credit = app.add_subcommand("credit", "emit per-player per-window fractional tackles");
  credit->add_option("--out", outPath, "output CSV path");

  long top = -1;
  int minPlays = -1;
  std::string sortKey = "total";
  auto* leaderboard = app.add_subcommand("leaderboard", "aggregate per-defender leaderboard");
  leaderboard->add_option("--out", outPath, "output path");
  leaderboard->add_option("--top", top, "keep the top N rows (negative: all)");
  leaderboard->add_option("--min-plays", minPlays, "minimum defensive plays to qualify");
  leaderboard->add_option("--sort", sortKey, "sort key")
      ->check(CLI::IsMember({"total", "average"}));

  std::string outDir = "validate-out";
  auto* validate = app.add_subcommand("validate", "correlation, stability and summary reports");
  validate->add_option("--out-dir", outDir, "output directory");

  std::int64_t gameId = 0;
  std::int32_t playId = 0;
  bool finiteDiff = false;
  auto* exportPlay = app.add_subcommand("export-play", "emit a play's velocity curve for plotting");
  exportPlay->add_option("--game", gameId, "gameId")->required();
  exportPlay->add_option("--play", playId, "playId")->required();
  exportPlay->add_option("--out", outPath, "output CSV path");
  exportPlay->add_flag("--finite-diff", finiteDiff, "append the position-differencing diagnostic");

  std::uint64_t seed = 1;
  int synthPlays = 50;
  int weekSpread = 1;
  std::string synthDir = "synth-out";
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset with ground truth");
  synth->add_option("--seed", seed, "generator seed");
  synth->add_option("--plays", synthPlays, "number of plays");
  synth->add_option("--week-spread", weekSpread, "spread plays over weeks 1..N")
      ->check(CLI::Range(1, 9));
  synth->add_option("--out-dir", synthDir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    // help/version exit with 0; anything else is a usage error.
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig config;
    if (!configFile.empty()) apply_config_file(configFile, config);
    if (dataDir) config.dataDir = *dataDir;
    if (weeksText) config.weeks = parse_weeks(*weeksText);
    if (thresholdD) config.thresholdD = *thresholdD;
    if (percentile) config.percentile = *percentile;
    if (epsilonPeak) config.epsilonPeak = *epsilonPeak;
    if (threads) config.threads = *threads;
    if (format) config.outputFormat = *format;
    if (minPlays >= 0) config.minPlays = minPlays;
    if (config.thresholdD && *config.thresholdD <= 0.0) {
      throw DataError("threshold D must be positive");
    }
    if (!(config.percentile > 0.0 && config.percentile < 1.0)) {
      throw DataError("percentile must lie strictly between 0 and 1");
    }

    if (calibrate->parsed()) return cmd_calibrate(config, outPath);
    if (windows->parsed()) return cmd_windows(config, outPath);
    if (credit->parsed()) return cmd_credit(config, outPath);
    if (leaderboard->parsed()) {
      return cmd_leaderboard(config, outPath, top, std::max(config.minPlays, 0), sortKey);
    }
    if (validate->parsed()) return cmd_validate(config, outDir);
    if (exportPlay->parsed()) return cmd_export_play(config, outPath, gameId, playId, finiteDiff);
    if (synth->parsed()) return cmd_synth(synthDir, seed, synthPlays, weekSpread);
    std::cerr << "no subcommand given\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const GenerationError& e) {
    std::cerr << "generation error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
