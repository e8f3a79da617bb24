#include "cli.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "tabproc/analysis.h"
#include "tabproc/corpus_stats.h"
#include "tabproc/error.h"
#include "tabproc/ingest.h"
#include "tabproc/score_json.h"

namespace tabproc::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kTechDictEnv = "TABPROC_TECH_DICT";

struct FileResult {
  bool ok = true;
  std::vector<std::string> messages;  // printed to stderr in input order
};

struct LoadedScore {
  Score score;
  ParseReport report;
};

bool isScoreInput(const fs::path& p) {
  auto name = p.filename().string();
  auto ext = p.extension().string();
  return ext == ".musicxml" || ext == ".xml" || ext == ".mxl" ||
         (name.size() > 11 && name.ends_with(".score.json"));
}

// Strips .musicxml/.xml/.mxl or .score.json.
std::string stemOf(const fs::path& p) {
  auto name = p.filename().string();
  if (name.ends_with(".score.json")) return name.substr(0, name.size() - 11);
  return p.stem().string();
}

// Files named on the command line are taken as-is; directories contribute
// their score files in sorted order. Missing paths are kept so they fail
// loudly in their own job.
std::vector<fs::path> expandInputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& input : inputs) {
    fs::path p(input);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && isScoreInput(entry.path())) found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  return files;
}

void writeFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

class Runner {
 public:
  Runner(RunConfig config, std::ostream& err) : config_(std::move(config)), err_(err) {}

  void prepare() {
    if (config_.techniqueDictPath) {
      options_.techniques = TechniqueDictionary::load(*config_.techniqueDictPath);
    } else if (const char* env = std::getenv(kTechDictEnv); env && *env) {
      options_.techniques = TechniqueDictionary::load(env);
    }
    options_.mergeTracks = config_.mergeTracks;
    options_.maxFret = config_.maxFret;
    fs::create_directories(config_.outputDir);
  }

  const RunConfig& config() const { return config_; }

  LoadedScore load(const fs::path& path, bool normalize = true) const {
    LoadedScore loaded;
    auto name = path.filename().string();
    if (name.ends_with(".score.json")) {
      std::ifstream in(path, std::ios::binary);
      if (!in) throw Error(path.string() + ": no such file");
      std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      loaded.score = parseScoreJson(text);
    } else {
      auto parsed = readScoreFile(path, options_);
      loaded.score = std::move(parsed.score);
      loaded.report = std::move(parsed.report);
    }
    if (normalize && !loaded.score.voicesMerged) loaded.score = normalizeScore(loaded.score, &loaded.report);
    return loaded;
  }

  void noteReport(const fs::path& path, const ParseReport& report, FileResult& result) const {
    if (config_.logLevel == LogLevel::debug) {
      for (const auto& w : report.warnings) {
        result.messages.push_back(path.string() + ": warning: bar " + std::to_string(w.bar) + ": " + w.message);
      }
    } else if (config_.logLevel == LogLevel::info && !report.warnings.empty()) {
      result.messages.push_back(path.string() + ": " + std::to_string(report.warnings.size()) + " warnings");
    }
  }

  /// Runs job(i) for every file on the worker pool; returns per-file results.
  std::vector<FileResult> forEach(const std::vector<fs::path>& files,
                                  const std::function<void(std::size_t, FileResult&)>& job) const {
    std::vector<FileResult> results(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < files.size(); i = next++) {
        try {
          job(i, results[i]);
        } catch (const std::exception& e) {
          results[i].ok = false;
          results[i].messages.push_back(files[i].string() + ": error: " + e.what());
        }
      }
    };
    int count = std::clamp(config_.workers, 1, static_cast<int>(std::max<std::size_t>(files.size(), 1)));
    std::vector<std::thread> pool;
    for (int t = 1; t < count; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return results;
  }

  int finish(const std::vector<FileResult>& results, const std::string& verb) const {
    int failed = 0;
    for (const auto& r : results) {
      for (const auto& m : r.messages) err_ << m << '\n';
      if (!r.ok) ++failed;
    }
    if (config_.logLevel != LogLevel::quiet) {
      err_ << verb << ": " << (results.size() - static_cast<std::size_t>(failed)) << " of " << results.size()
           << " files succeeded\n";
    }
    if (failed == 0) return kExitOk;
    return failed == static_cast<int>(results.size()) ? kExitFatal : kExitPartial;
  }

 private:
  RunConfig config_;
  std::ostream& err_;
  ParseOptions options_;
};

Json analysisJson(const Score& score, const std::string& source, TokenMode mode) {
  Json j;
  j["source"] = source;
  PitchClassCount counts = countPitchClasses(score);
  j["pitchClassCounts"] = counts.counts;
  if (counts.total() > 0) {
    KeyResult key = detectKey(counts);
    j["key"] = keyName(key);
    j["keyTonic"] = key.tonic;
    j["keyMode"] = key.mode == Mode::major ? "major" : "minor";
    j["keyScore"] = key.score;
  } else {
    j["key"] = nullptr;
  }
  TagAssignment melody = extractMelody(score);
  TagAssignment bass = extractBassline(score);
  Json clusters = Json::array();
  for (std::size_t m = 0; m < score.measures.size(); ++m) {
    const auto& measure = score.measures[m];
    for (std::size_t c = 0; c < measure.clusters.size(); ++c) {
      const auto& cluster = measure.clusters[c];
      Json notes = Json::array();
      for (std::size_t e = 0; e < cluster.events.size(); ++e) {
        const auto& ev = cluster.events[e];
        Json note;
        note["pitch"] = encodePitchToken(ev.pitch, mode);
        note["duration"] = toString(ev.duration);
        note["string"] = ev.string ? Json(*ev.string) : Json(nullptr);
        note["fret"] = ev.fret ? Json(*ev.fret) : Json(nullptr);
        note["melody"] = melody.at({m, c, e}) == VoiceTag::melody;
        note["bassline"] = bass.at({m, c, e}) == VoiceTag::bassline;
        notes.push_back(std::move(note));
      }
      Json jc{{"bar", measure.index}, {"onset", toString(cluster.onset)}, {"notes", std::move(notes)}};
      if (auto chord = recognizeChord(cluster, score.tuning, score.capo)) {
        jc["chord"] = Json{{"quality", std::string(toString(chord->quality))},
                           {"root", chord->root ? Json(std::string(pitchClassName(*chord->root))) : Json("ambiguous")},
                           {"pattern", chord->matchedPattern}};
      } else {
        jc["chord"] = nullptr;
      }
      clusters.push_back(std::move(jc));
    }
  }
  j["clusters"] = std::move(clusters);
  Json events = Json::array();
  for (const auto& ev : detectEvents(score)) {
    Json je{{"bar", ev.bar}, {"onset", toString(ev.onset)}, {"kind", std::string(toString(ev.tag.kind))}};
    if (ev.tag.detail) je["detail"] = *ev.tag.detail;
    events.push_back(std::move(je));
  }
  j["events"] = std::move(events);
  return j;
}

void addCommonOptions(CLI::App& app, RunConfig& config, std::string& mode, std::string& logLevel) {
  app.add_option("inputs", config.inputPaths, "MusicXML files (.musicxml/.xml/.mxl), .score.json files or directories")
      ->required();
  app.add_option("--out", config.outputDir, "Output directory")->default_str(".");
  app.add_option("--mode", mode, "Pitch token order")
      ->check(CLI::IsMember({"pitch-octave", "octave-pitch"}))
      ->default_str("pitch-octave");
  app.add_option("--technique-dict", config.techniqueDictPath,
                 "Technique dictionary JSON (falls back to $TABPROC_TECH_DICT)");
  app.add_flag("--merge-tracks", config.mergeTracks, "Merge every tablature part into one score");
  app.add_option("--max-fret", config.maxFret, "Highest usable fret")->check(CLI::Range(12, 24));
  app.add_option("--workers", config.workers, "Files processed in parallel")->check(CLI::PositiveNumber);
  app.add_option("--log-level", logLevel, "quiet, info or debug")->check(CLI::IsMember({"quiet", "info", "debug"}));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Guitar tablature MusicXML toolkit"};
  app.require_subcommand(1);
  RunConfig config;
  std::string mode = "pitch-octave";
  std::string logLevel = "info";

  auto* parseCmd = app.add_subcommand("parse", "Parse scores into canonical score JSON");
  bool raw = false;
  parseCmd->add_flag("--raw", raw, "Keep voices and ties as written");
  auto* encodeCmd = app.add_subcommand("encode", "Encode scores as token clips (.antab.json)");
  bool text = false;
  encodeCmd->add_flag("--text", text, "Also write the three token lines as .antab.txt");
  auto* analyzeCmd = app.add_subcommand("analyze", "Key, chords, melody/bass tags and technique events");
  auto* statsCmd = app.add_subcommand("stats", "Corpus histograms as CSV plus report.json");
  auto* clipCmd = app.add_subcommand("clip", "Cut annotated clips out of scores");
  int start = 0;
  int end = 0;
  std::string label;
  std::optional<fs::path> annotations;
  bool encodeClips = false;
  clipCmd->add_option("--start", start, "First bar");
  clipCmd->add_option("--end", end, "Last bar");
  clipCmd->add_option("--label", label, "intro, verse, chorus or bridge")
      ->check(CLI::IsMember({"intro", "verse", "chorus", "bridge"}));
  clipCmd->add_option("--annotations", annotations, "CSV: sourceId,structure,startBar,endBar");
  clipCmd->add_flag("--encode", encodeClips, "Also write each clip as .antab.json");
  for (auto* cmd : {parseCmd, encodeCmd, analyzeCmd, statsCmd, clipCmd}) addCommonOptions(*cmd, config, mode, logLevel);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "tabproc: " << e.what() << '\n';
    return kExitFatal;
  }
  config.tokenMode = *tokenModeFromString(mode);
  config.logLevel = logLevel == "quiet" ? LogLevel::quiet : logLevel == "debug" ? LogLevel::debug : LogLevel::info;

  Runner runner(config, err);
  try {
    runner.prepare();
  } catch (const std::exception& e) {
    err << "tabproc: " << e.what() << '\n';
    return kExitFatal;
  }
  const auto files = expandInputs(config.inputPaths);
  const fs::path& outDir = config.outputDir;

  if (parseCmd->parsed()) {
    if (files.empty()) return err << "tabproc: no input files\n", kExitFatal;
    auto results = runner.forEach(files, [&](std::size_t i, FileResult& r) {
      auto loaded = runner.load(files[i], !raw);
      auto stem = stemOf(files[i]);
      writeFile(outDir / (stem + ".score.json"), serializeScore(loaded.score));
      writeFile(outDir / (stem + ".report.json"), dumpCanonical(toJson(loaded.report)));
      runner.noteReport(files[i], loaded.report, r);
    });
    return runner.finish(results, "parse");
  }

  if (encodeCmd->parsed()) {
    if (files.empty()) return err << "tabproc: no input files\n", kExitFatal;
    auto results = runner.forEach(files, [&](std::size_t i, FileResult& r) {
      auto loaded = runner.load(files[i]);
      EncodedClip clip = encodeClip(loaded.score, config.tokenMode);
      auto stem = stemOf(files[i]);
      writeFile(outDir / (stem + ".antab.json"), clipToJson(clip));
      if (text) writeFile(outDir / (stem + ".antab.txt"), clipToText(clip));
      runner.noteReport(files[i], loaded.report, r);
    });
    return runner.finish(results, "encode");
  }

  if (analyzeCmd->parsed()) {
    if (files.empty()) return err << "tabproc: no input files\n", kExitFatal;
    auto results = runner.forEach(files, [&](std::size_t i, FileResult& r) {
      auto loaded = runner.load(files[i]);
      auto stem = stemOf(files[i]);
      writeFile(outDir / (stem + ".analysis.json"),
                dumpCanonical(analysisJson(loaded.score, files[i].filename().string(), config.tokenMode)));
      runner.noteReport(files[i], loaded.report, r);
    });
    return runner.finish(results, "analyze");
  }

  if (statsCmd->parsed()) {
    std::vector<CorpusCounts> perFile(files.size());
    std::vector<std::vector<std::string>> warnings(files.size());
    auto results = runner.forEach(files, [&](std::size_t i, FileResult& r) {
      auto loaded = runner.load(files[i]);
      perFile[i] = countScore(loaded.score, &warnings[i]);
      for (const auto& w : warnings[i]) r.messages.push_back(files[i].string() + ": warning: " + w);
      runner.noteReport(files[i], loaded.report, r);
    });
    CorpusCounts total;
    for (std::size_t i = 0; i < files.size(); ++i) {
      if (results[i].ok) total.merge(perFile[i]);
    }
    for (const auto& r : results) {
      for (const auto& m : r.messages) err << m << '\n';
    }
    if (total.scores == 0) {
      err << "tabproc: empty corpus\n";
      return kExitFatal;
    }
    try {
      writeStatsFiles(total, outDir, config.maxFret);
    } catch (const std::exception& e) {
      err << "tabproc: " << e.what() << '\n';
      return kExitFatal;
    }
    auto failed = std::count_if(results.begin(), results.end(), [](const FileResult& r) { return !r.ok; });
    if (config.logLevel != LogLevel::quiet) {
      err << "stats: " << total.scores << " scores counted, " << failed << " failed\n";
    }
    return failed == 0 ? kExitOk : kExitPartial;
  }

  // clip
  std::vector<ClipAnnotation> rows;
  if (annotations) {
    std::ifstream in(*annotations, std::ios::binary);
    if (!in) return err << "tabproc: " << annotations->string() << ": no such file\n", kExitFatal;
    std::string csv((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
      rows = parseAnnotationCsv(csv);
    } catch (const std::exception& e) {
      err << "tabproc: " << e.what() << '\n';
      return kExitFatal;
    }
  } else {
    if (start < 1 || end < start || label.empty()) {
      err << "tabproc: clip needs --annotations or --start, --end and --label\n";
      return kExitFatal;
    }
    rows.push_back({*structureFromString(label), start, end, ""});
  }
  if (files.empty()) return err << "tabproc: no input files\n", kExitFatal;
  auto results = runner.forEach(files, [&](std::size_t i, FileResult& r) {
    auto stem = stemOf(files[i]);
    auto loaded = runner.load(files[i]);
    int written = 0;
    for (ClipAnnotation a : rows) {
      if (!a.sourceId.empty() && a.sourceId != stem && a.sourceId != files[i].filename().string()) continue;
      a.sourceId = stem;
      ParseReport clipReport;
      Score clip = sliceClip(loaded.score, a, &clipReport);
      auto name = stem + "." + std::string(toString(a.structure)) + "-" + std::to_string(a.startBar) + "-" +
                  std::to_string(a.endBar);
      writeFile(outDir / (name + ".score.json"), serializeScore(clip));
      if (encodeClips) writeFile(outDir / (name + ".antab.json"), clipToJson(encodeClip(clip, config.tokenMode)));
      loaded.report.append(clipReport);
      ++written;
    }
    if (written == 0) r.messages.push_back(files[i].string() + ": no annotation rows for '" + stem + "'");
    runner.noteReport(files[i], loaded.report, r);
  });
  return runner.finish(results, "clip");
}

}  // namespace tabproc::cli
