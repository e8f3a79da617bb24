// Corpus-level statistics: chord positions in the bar, keys, pitches,
// intervals, durations and fretboard usage.
//
// Every score is reduced to integer counts (CorpusCounts); counts merge by
// addition, so aggregation is order-independent. Probabilities are produced
// only when a histogram is emitted.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "tabproc/model.h"

namespace tabproc {

inline constexpr int kGridSlots = 16;

/// 1-based 16th-note slot of an onset (in quarter notes) within a 4/4 bar.
/// Off-grid onsets snap to the nearest slot, halfway cases to the earlier one.
int gridSlot(const Rational& onset);

/// Scale-degree label ("I".."VII") of a chord root in a key, or "other" for
/// roots outside the key's scale.
std::string scaleDegree(int root, const KeyResult& key);

/// "T", "S" or "D" for a degree label, "other" otherwise.
std::string harmonicFunction(const std::string& degree);

struct CorpusCounts {
  std::int64_t scores = 0;
  std::int64_t chordGridSkipped = 0;  // bars outside 4/4
  std::map<std::pair<int, std::string>, std::int64_t> degreeGrid;  // (slot, degree)
  std::map<std::pair<int, int>, std::int64_t> keys;                // (mode, tonic)
  std::map<int, std::int64_t> pitches;                             // MIDI
  std::map<int, std::int64_t> intervals;                           // semitones mod 12
  std::map<Rational, std::int64_t> durations;
  std::map<std::pair<int, int>, std::int64_t> fingerboard;         // (string, fret)
  std::map<std::pair<int, int>, std::int64_t> harmonics;           // (string, fret)
  std::map<std::tuple<int, int, int>, std::int64_t> slides;        // (string, from, to)

  void merge(const CorpusCounts& other);

  friend bool operator==(const CorpusCounts&, const CorpusCounts&) = default;
};

/// Counts one normalized score (voices merged, ties cleaned); the capo is
/// normalized to 0 first. Notes for skipped parts go to `warnings`.
CorpusCounts countScore(const Score& score, std::vector<std::string>* warnings = nullptr);

struct GridHistogram {
  // Label -> probability per slot (index 0 = slot 1). Probabilities share
  // one denominator, the number of recognized chords in the corpus.
  std::map<std::string, std::array<double, kGridSlots>> degrees;
  std::map<std::string, std::array<double, kGridSlots>> functions;
};

struct HarmonicPoint {
  int string = 1;
  int fret = 0;
  std::int64_t count = 0;
};

struct SlideArc {
  int string = 1;
  int fromFret = 0;
  int toFret = 0;
  bool up = true;
  std::int64_t count = 0;
};

struct FingerboardMap {
  std::vector<std::vector<double>> cells;  // [string - 1][fret], fret 0 = open
  std::vector<HarmonicPoint> harmonics;
  std::vector<SlideArc> slides;
};

// Each histogram throws Error("empty corpus") when no score was counted.
GridHistogram chordGrid(const CorpusCounts& counts);
/// Keyed by keyName(), e.g. "C major".
std::map<std::string, double> keyHistogram(const CorpusCounts& counts);
std::map<int, double> pitchHistogram(const CorpusCounts& counts);
std::map<int, double> intervalHistogram(const CorpusCounts& counts);
std::map<Rational, double> durationHistogram(const CorpusCounts& counts);
FingerboardMap fingerboardMap(const CorpusCounts& counts, int maxFret = kMaxFret);

/// Writes one CSV per figure panel plus report.json into `dir`; returns the
/// file names written, in write order.
std::vector<std::string> writeStatsFiles(const CorpusCounts& counts, const std::filesystem::path& dir,
                                         int maxFret = kMaxFret);

/// Shortest decimal that reads back to the same double.
std::string formatNumber(double value);

}  // namespace tabproc
