// Rule-based analyses over a normalized score: bassline and melody tagging,
// key detection and transposition, chord recognition and technique events.

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <vector>

#include "tabproc/fretboard.h"
#include "tabproc/model.h"

namespace tabproc {

enum class VoiceTag { melody, bassline, inner };

/// Address of one event: measure, cluster and event indices.
struct EventRef {
  std::size_t measure = 0;
  std::size_t cluster = 0;
  std::size_t event = 0;

  friend auto operator<=>(const EventRef&, const EventRef&) = default;
};

/// A VoiceTag for every event of a score, shaped like the score.
class TagAssignment {
 public:
  explicit TagAssignment(const Score& score);

  VoiceTag at(const EventRef& ref) const;
  void set(const EventRef& ref, VoiceTag tag);
  std::vector<EventRef> tagged(VoiceTag tag) const;

 private:
  std::vector<std::vector<std::vector<VoiceTag>>> tags_;
};

/// Per measure: the single or lowest note of each cluster on string 5 or 6 is
/// bass. A measure left with fewer than two bass notes also takes every note
/// on string 4.
TagAssignment extractBassline(const Score& score);

/// The highest note of every multi-note cluster is melody. A lone note is
/// melody when its effective string is 1 or 2; a fret above 5 raises the
/// effective string by one until a later lone note drops below fret 5.
TagAssignment extractMelody(const Score& score);

struct PitchClassCount {
  std::array<int, 12> counts{};

  int total() const;
};

/// One count per pitched note event (ties already merged).
PitchClassCount countPitchClasses(const Score& score);

/// Picks the major key whose diatonic set collects the most notes (lowest
/// tonic on ties), then reports its relative minor when the sixth degree
/// outnumbers the fifth. Throws Error when there are no notes.
KeyResult detectKey(const PitchClassCount& counts);
KeyResult detectKey(const Score& score);

/// Shifts every pitch by the smallest move (-6, +6] from the detected tonic
/// to target.tonic and re-fingers each note: the original string when
/// playable and free, else the lowest free fret. Throws RangeError listing
/// every note that leaves the instrument.
Score transposeToKey(const Score& score, const KeyResult& target, int maxFret = kMaxFret);

/// A cyclic interval signature; the root is the pitch after the marked step.
struct IntervalPattern {
  ChordQuality quality = ChordQuality::maj;
  std::vector<int> cyclic;
  std::optional<std::size_t> rootMarkIndex;  // empty for augmented
};

const std::vector<IntervalPattern>& chordPatterns();

/// Matches a set of pitch classes against chordPatterns(). Needs 2-4
/// distinct classes; returns nullopt otherwise or when nothing matches.
std::optional<ChordResult> recognizePitchClasses(const std::vector<int>& pitchClasses);

/// Chord of the notes a cluster holds on strings 3-6.
std::optional<ChordResult> recognizeChord(const Cluster& cluster, const Tuning& tuning, int capo);

struct DetectedEvent {
  int bar = 0;
  Rational onset;
  TechniqueTag tag;

  friend bool operator==(const DetectedEvent&, const DetectedEvent&) = default;
};

/// Every technique tag in time order, plus a chordEvent for each cluster of
/// three or more notes. A non-empty `only` restricts the output to those kinds.
std::vector<DetectedEvent> detectEvents(const Score& score, const std::set<TechniqueKind>& only = {});

}  // namespace tabproc
