// Normalized in-memory model of a guitar tablature score.
//
// String numbering follows tablature convention: string 1 is the
// highest-pitched (high E), string 6 the lowest. Onsets and durations are
// exact rationals measured in quarter notes.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tabproc/rational.h"

namespace tabproc {

inline constexpr int kStringCount = 6;
inline constexpr int kMaxFret = 24;
inline constexpr int kMaxCapo = 12;
inline constexpr int kMaxTuningOffset = 7;

/// Semitone offset per string from standard tuning; index 0 is string 1.
using Tuning = std::array<int, kStringCount>;

inline constexpr Tuning kStandardTuning{0, 0, 0, 0, 0, 0};

struct PitchSpec {
  char step = 'C';  // 'A'..'G'
  int alter = 0;    // -2..+2
  int octave = 4;   // octave 4 holds middle C

  friend bool operator==(const PitchSpec&, const PitchSpec&) = default;
};

/// Semitones of a natural letter above C. Throws RangeError for non-letters.
int letterSemitone(char step);

/// 12 * (octave + 1) + letter + alter. Throws RangeError outside [0, 127].
int midiOf(const PitchSpec& p);

/// Spells a MIDI number with sharps, or flats when preferFlats is set.
PitchSpec spellMidi(int midi, bool preferFlats = false);

/// Shifts a pitch by semitones, keeping the sharp/flat flavour of its spelling.
PitchSpec transposePitch(const PitchSpec& p, int semitones);

/// "C#4" style name of a MIDI number (sharps).
std::string midiName(int midi);

enum class TechniqueKind {
  mute,
  naturalHarmonic,
  artificialHarmonic,
  slideIn,
  slideOut,
  hammerOn,
  pullOff,
  letRing,
  triplet,
  rest,
  chordEvent,
};

std::string_view toString(TechniqueKind kind);
std::optional<TechniqueKind> techniqueFromString(std::string_view name);

struct TechniqueTag {
  TechniqueKind kind = TechniqueKind::mute;
  // Slides only: the fret at the other end of the slide, when known.
  std::optional<int> detail;

  friend bool operator==(const TechniqueTag&, const TechniqueTag&) = default;
};

struct NoteEvent {
  Rational onset;     // from the start of the owning measure
  Rational duration;  // duration / divisions, quarter note = 1
  std::optional<PitchSpec> pitch;  // empty for rests
  std::optional<int> string;
  std::optional<int> fret;
  int voice = 1;
  int track = 0;
  bool tieStart = false;
  bool tieStop = false;
  std::vector<TechniqueTag> techniques;

  bool isRest() const { return !pitch.has_value(); }
  int midi() const { return midiOf(*pitch); }
  bool has(TechniqueKind kind) const;

  friend bool operator==(const NoteEvent&, const NoteEvent&) = default;
};

/// Events sharing one onset, ordered high to low pitch with rests last.
struct Cluster {
  Rational onset;
  std::vector<NoteEvent> events;

  int pitchedCount() const;

  friend bool operator==(const Cluster&, const Cluster&) = default;
};

/// Orders events by descending MIDI (string number breaks unisons), rests last.
void sortCluster(Cluster& cluster);

struct TimeSignature {
  int numerator = 4;
  int denominator = 4;

  friend bool operator==(const TimeSignature&, const TimeSignature&) = default;
};

struct Measure {
  int index = 1;
  int divisions = 1;
  TimeSignature time;
  std::vector<Cluster> clusters;

  friend bool operator==(const Measure&, const Measure&) = default;
};

/// numerator * 4 / denominator quarter notes. Throws RangeError on a zero
/// or negative denominator.
Rational measureLength(const TimeSignature& time);
inline Rational measureLength(const Measure& m) { return measureLength(m.time); }

enum class Structure { intro, verse, chorus, bridge };

std::string_view toString(Structure s);
std::optional<Structure> structureFromString(std::string_view name);

struct ClipAnnotation {
  Structure structure = Structure::verse;
  int startBar = 1;
  int endBar = 1;
  std::string sourceId;

  friend bool operator==(const ClipAnnotation&, const ClipAnnotation&) = default;
};

/// Throws RangeError unless 1 <= startBar <= endBar.
void validate(const ClipAnnotation& annotation);

struct Score {
  std::string title;
  std::string artist;
  Tuning tuning = kStandardTuning;
  int capo = 0;
  // Set once mergeVoices has joined same-onset clusters of all voices.
  bool voicesMerged = false;
  std::optional<ClipAnnotation> annotation;
  std::vector<Measure> measures;

  friend bool operator==(const Score&, const Score&) = default;
};

/// Lists every broken Score invariant; empty when the score is valid.
std::vector<std::string> checkInvariants(const Score& score);

enum class Mode { major, minor };

struct KeyResult {
  int tonic = 0;  // pitch class
  Mode mode = Mode::major;
  int score = 0;  // winning diatonic sum

  friend bool operator==(const KeyResult&, const KeyResult&) = default;
};

/// "C major", "F# minor", ...
std::string keyName(const KeyResult& key);
std::string_view pitchClassName(int pc);

enum class ChordQuality { maj, min, maj7, min7, dom7, aug, dim };

std::string_view toString(ChordQuality q);

struct ChordResult {
  ChordQuality quality = ChordQuality::maj;
  std::optional<int> root;  // empty means ambiguous (augmented only)
  std::vector<int> matchedPattern;

  friend bool operator==(const ChordResult&, const ChordResult&) = default;
};

}  // namespace tabproc
