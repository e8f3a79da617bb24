#include "tabproc/corpus_stats.h"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "tabproc/analysis.h"
#include "tabproc/error.h"
#include "tabproc/ingest.h"
#include "tabproc/score_json.h"

namespace tabproc {

namespace {

const std::vector<std::string> kDegrees{"I", "II", "III", "IV", "V", "VI", "VII", "other"};
const std::vector<std::string> kFunctions{"T", "S", "D", "other"};
constexpr std::array<int, 7> kMajorSteps{0, 2, 4, 5, 7, 9, 11};
constexpr std::array<int, 7> kMinorSteps{0, 2, 3, 5, 7, 8, 10};
constexpr TimeSignature kCommonTime{4, 4};

template <typename Map>
void addCounts(Map& into, const Map& from) {
  for (const auto& [key, n] : from) into[key] += n;
}

template <typename Map>
std::int64_t totalOf(const Map& m) {
  std::int64_t total = 0;
  for (const auto& [key, n] : m) total += n;
  return total;
}

template <typename Key>
std::map<Key, double> normalize(const std::map<Key, std::int64_t>& counts) {
  std::map<Key, double> out;
  const auto total = static_cast<double>(totalOf(counts));
  for (const auto& [key, n] : counts) out[key] = static_cast<double>(n) / total;
  return out;
}

void requireScores(const CorpusCounts& counts) {
  if (counts.scores == 0) throw Error("empty corpus");
}

double share(std::int64_t n, std::int64_t total) {
  return total == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(total);
}

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::string& header) : out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot write " + path.string());
    out_ << header << '\n';
  }

  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cells, first = false), ...);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

}  // namespace

int gridSlot(const Rational& onset) {
  Rational sixteenths = onset * 4;
  std::int64_t whole = sixteenths.numerator() / sixteenths.denominator();
  Rational frac = sixteenths - whole;
  if (frac > Rational(1, 2)) ++whole;
  return static_cast<int>(std::clamp<std::int64_t>(whole + 1, 1, kGridSlots));
}

std::string scaleDegree(int root, const KeyResult& key) {
  const auto& steps = key.mode == Mode::major ? kMajorSteps : kMinorSteps;
  int offset = ((root - key.tonic) % 12 + 12) % 12;
  auto it = std::find(steps.begin(), steps.end(), offset);
  if (it == steps.end()) return "other";
  return kDegrees[static_cast<std::size_t>(it - steps.begin())];
}

std::string harmonicFunction(const std::string& degree) {
  if (degree == "I" || degree == "III" || degree == "VI") return "T";
  if (degree == "II" || degree == "IV") return "S";
  if (degree == "V" || degree == "VII") return "D";
  return "other";
}

void CorpusCounts::merge(const CorpusCounts& other) {
  scores += other.scores;
  chordGridSkipped += other.chordGridSkipped;
  addCounts(degreeGrid, other.degreeGrid);
  addCounts(keys, other.keys);
  addCounts(pitches, other.pitches);
  addCounts(intervals, other.intervals);
  addCounts(durations, other.durations);
  addCounts(fingerboard, other.fingerboard);
  addCounts(harmonics, other.harmonics);
  addCounts(slides, other.slides);
}

CorpusCounts countScore(const Score& input, std::vector<std::string>* warnings) {
  Score score = normalizeCapo(input.voicesMerged ? input : normalizeScore(input));
  CorpusCounts counts;
  counts.scores = 1;

  std::optional<KeyResult> key;
  if (countPitchClasses(score).total() > 0) {
    key = detectKey(score);
    ++counts.keys[{static_cast<int>(key->mode), key->tonic}];
  } else if (warnings) {
    warnings->push_back(score.title + ": no notes; key and chords skipped");
  }

  for (const auto& m : score.measures) {
    const bool gridBar = m.time == kCommonTime;
    if (!gridBar) ++counts.chordGridSkipped;
    for (const auto& c : m.clusters) {
      std::vector<int> midis;
      for (const auto& e : c.events) {
        if (e.isRest()) continue;
        midis.push_back(e.midi());
        ++counts.pitches[e.midi()];
        ++counts.durations[e.duration];
        ++counts.fingerboard[{*e.string, *e.fret}];
        for (const auto& t : e.techniques) {
          if (t.kind == TechniqueKind::naturalHarmonic) ++counts.harmonics[{*e.string, *e.fret}];
          if (t.kind == TechniqueKind::slideOut && t.detail && *t.detail != *e.fret) {
            ++counts.slides[{*e.string, *e.fret, *t.detail}];
          }
        }
      }
      std::sort(midis.begin(), midis.end());
      for (std::size_t i = 1; i < midis.size(); ++i) ++counts.intervals[(midis[i] - midis[i - 1]) % 12];

      if (!gridBar || !key) continue;
      if (auto chord = recognizeChord(c, score.tuning, score.capo)) {
        std::string degree = chord->root ? scaleDegree(*chord->root, *key) : "other";
        ++counts.degreeGrid[{gridSlot(c.onset), degree}];
      }
    }
  }
  if (counts.chordGridSkipped > 0 && warnings) {
    warnings->push_back(score.title + ": " + std::to_string(counts.chordGridSkipped) +
                        " bars outside 4/4 left out of the chord grid");
  }
  return counts;
}

GridHistogram chordGrid(const CorpusCounts& counts) {
  requireScores(counts);
  GridHistogram grid;
  for (const auto& d : kDegrees) grid.degrees[d].fill(0.0);
  for (const auto& f : kFunctions) grid.functions[f].fill(0.0);
  const std::int64_t total = totalOf(counts.degreeGrid);
  for (const auto& [key, n] : counts.degreeGrid) {
    const auto& [slot, degree] = key;
    double p = share(n, total);
    grid.degrees[degree][static_cast<std::size_t>(slot - 1)] += p;
    grid.functions[harmonicFunction(degree)][static_cast<std::size_t>(slot - 1)] += p;
  }
  return grid;
}

std::map<std::string, double> keyHistogram(const CorpusCounts& counts) {
  requireScores(counts);
  std::map<std::string, double> out;
  const std::int64_t total = totalOf(counts.keys);
  for (const auto& [key, n] : counts.keys) {
    out[keyName({key.second, static_cast<Mode>(key.first), 0})] = share(n, total);
  }
  return out;
}

std::map<int, double> pitchHistogram(const CorpusCounts& counts) {
  requireScores(counts);
  return normalize(counts.pitches);
}

std::map<int, double> intervalHistogram(const CorpusCounts& counts) {
  requireScores(counts);
  return normalize(counts.intervals);
}

std::map<Rational, double> durationHistogram(const CorpusCounts& counts) {
  requireScores(counts);
  return normalize(counts.durations);
}

FingerboardMap fingerboardMap(const CorpusCounts& counts, int maxFret) {
  requireScores(counts);
  FingerboardMap map;
  map.cells.assign(kStringCount, std::vector<double>(static_cast<std::size_t>(maxFret + 1), 0.0));
  const std::int64_t total = totalOf(counts.fingerboard);
  for (const auto& [cell, n] : counts.fingerboard) {
    if (cell.second > maxFret) continue;
    map.cells[static_cast<std::size_t>(cell.first - 1)][static_cast<std::size_t>(cell.second)] = share(n, total);
  }
  for (const auto& [cell, n] : counts.harmonics) map.harmonics.push_back({cell.first, cell.second, n});
  for (const auto& [arc, n] : counts.slides) {
    auto [string, from, to] = arc;
    map.slides.push_back({string, from, to, to > from, n});
  }
  return map;
}

std::string formatNumber(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::vector<std::string> writeStatsFiles(const CorpusCounts& counts, const std::filesystem::path& dir,
                                         int maxFret) {
  requireScores(counts);
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  auto open = [&](const std::string& name, const std::string& header) {
    written.push_back(name);
    return CsvFile(dir / name, header);
  };
  Json report;
  report["scores"] = counts.scores;
  report["barsOutsideCommonTime"] = counts.chordGridSkipped;

  const std::int64_t chordTotal = totalOf(counts.degreeGrid);
  report["chords"] = chordTotal;
  {
    auto csv = open("chord_degree_grid.csv", "slot,degree,count,probability");
    Json series = Json::object();
    for (const auto& d : kDegrees) {
      Json values = Json::array();
      for (int slot = 1; slot <= kGridSlots; ++slot) {
        auto it = counts.degreeGrid.find({slot, d});
        std::int64_t n = it == counts.degreeGrid.end() ? 0 : it->second;
        csv.row(slot, d, n, formatNumber(share(n, chordTotal)));
        values.push_back(share(n, chordTotal));
      }
      series[d] = std::move(values);
    }
    report["chordDegreeGrid"] = std::move(series);
  }
  {
    std::map<std::pair<int, std::string>, std::int64_t> byFunction;
    for (const auto& [key, n] : counts.degreeGrid) byFunction[{key.first, harmonicFunction(key.second)}] += n;
    auto csv = open("chord_function_grid.csv", "slot,function,count,probability");
    Json series = Json::object();
    for (const auto& f : kFunctions) {
      Json values = Json::array();
      for (int slot = 1; slot <= kGridSlots; ++slot) {
        auto it = byFunction.find({slot, f});
        std::int64_t n = it == byFunction.end() ? 0 : it->second;
        csv.row(slot, f, n, formatNumber(share(n, chordTotal)));
        values.push_back(share(n, chordTotal));
      }
      series[f] = std::move(values);
    }
    report["chordFunctionGrid"] = std::move(series);
  }
  {
    auto csv = open("keys.csv", "key,tonic,mode,count,probability");
    const std::int64_t total = totalOf(counts.keys);
    Json keys = Json::object();
    for (const auto& [key, n] : counts.keys) {
      KeyResult k{key.second, static_cast<Mode>(key.first), 0};
      csv.row(keyName(k), k.tonic, k.mode == Mode::major ? "major" : "minor", n, formatNumber(share(n, total)));
      keys[keyName(k)] = share(n, total);
    }
    report["keys"] = std::move(keys);
  }
  {
    auto csv = open("pitches.csv", "midi,name,count,probability");
    const std::int64_t total = totalOf(counts.pitches);
    Json pitches = Json::object();
    for (const auto& [midi, n] : counts.pitches) {
      csv.row(midi, midiName(midi), n, formatNumber(share(n, total)));
      pitches[midiName(midi)] = share(n, total);
    }
    report["pitches"] = std::move(pitches);
  }
  {
    auto csv = open("intervals.csv", "semitones,count,probability");
    const std::int64_t total = totalOf(counts.intervals);
    Json intervals = Json::array();
    for (int semis = 0; semis < 12; ++semis) {
      auto it = counts.intervals.find(semis);
      std::int64_t n = it == counts.intervals.end() ? 0 : it->second;
      csv.row(semis, n, formatNumber(share(n, total)));
      intervals.push_back(share(n, total));
    }
    report["intervals"] = std::move(intervals);
  }
  {
    auto csv = open("durations.csv", "duration,quarters,count,probability");
    const std::int64_t total = totalOf(counts.durations);
    Json durations = Json::object();
    for (const auto& [d, n] : counts.durations) {
      csv.row(toString(d), formatNumber(toDouble(d)), n, formatNumber(share(n, total)));
      durations[toString(d)] = share(n, total);
    }
    report["durations"] = std::move(durations);
  }
  {
    auto csv = open("fingerboard.csv", "string,fret,count,probability");
    const std::int64_t total = totalOf(counts.fingerboard);
    for (int s = 1; s <= kStringCount; ++s) {
      for (int f = 0; f <= maxFret; ++f) {
        auto it = counts.fingerboard.find({s, f});
        std::int64_t n = it == counts.fingerboard.end() ? 0 : it->second;
        csv.row(s, f, n, formatNumber(share(n, total)));
      }
    }
    report["notes"] = total;
  }
  {
    auto csv = open("harmonics.csv", "string,fret,count");
    Json points = Json::array();
    for (const auto& [cell, n] : counts.harmonics) {
      csv.row(cell.first, cell.second, n);
      points.push_back(Json{{"string", cell.first}, {"fret", cell.second}, {"count", n}});
    }
    report["harmonics"] = std::move(points);
  }
  {
    auto csv = open("slides.csv", "string,from_fret,to_fret,direction,count");
    Json arcs = Json::array();
    for (const auto& [arc, n] : counts.slides) {
      auto [string, from, to] = arc;
      const char* direction = to > from ? "up" : "down";
      csv.row(string, from, to, direction, n);
      arcs.push_back(Json{{"string", string}, {"fromFret", from}, {"toFret", to}, {"direction", direction}, {"count", n}});
    }
    report["slides"] = std::move(arcs);
  }
  {
    std::ofstream out(dir / "report.json", std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / "report.json").string());
    out << dumpCanonical(report);
    written.push_back("report.json");
  }
  return written;
}

}  // namespace tabproc
