#include "tabproc/model.h"

#include <algorithm>
#include <array>
#include <set>

#include "tabproc/error.h"
#include "tabproc/fretboard.h"

namespace tabproc {

namespace {

constexpr std::array<std::string_view, 12> kSharpNames{"C",  "C#", "D",  "D#", "E",  "F",
                                                       "F#", "G",  "G#", "A",  "A#", "B"};
constexpr std::array<std::string_view, 12> kKeyNames{"C",  "C#", "D",  "Eb", "E",  "F",
                                                     "F#", "G",  "Ab", "A",  "Bb", "B"};

// (step, alter) per pitch class.
constexpr std::array<std::pair<char, int>, 12> kSharpSpelling{
    {{'C', 0}, {'C', 1}, {'D', 0}, {'D', 1}, {'E', 0}, {'F', 0},
     {'F', 1}, {'G', 0}, {'G', 1}, {'A', 0}, {'A', 1}, {'B', 0}}};
constexpr std::array<std::pair<char, int>, 12> kFlatSpelling{
    {{'C', 0}, {'D', -1}, {'D', 0}, {'E', -1}, {'E', 0}, {'F', 0},
     {'G', -1}, {'G', 0}, {'A', -1}, {'A', 0}, {'B', -1}, {'B', 0}}};

constexpr std::array<std::string_view, 11> kTechniqueNames{
    "mute",    "naturalHarmonic", "artificialHarmonic", "slideIn", "slideOut", "hammerOn",
    "pullOff", "letRing",         "triplet",            "rest",    "chordEvent"};

constexpr std::array<std::string_view, 4> kStructureNames{"intro", "verse", "chorus", "bridge"};

constexpr std::array<std::string_view, 7> kQualityNames{"maj",  "min", "maj7", "min7",
                                                        "dom7", "aug", "dim"};

}  // namespace

int letterSemitone(char step) {
  switch (step) {
    case 'C': return 0;
    case 'D': return 2;
    case 'E': return 4;
    case 'F': return 5;
    case 'G': return 7;
    case 'A': return 9;
    case 'B': return 11;
    default: throw RangeError(std::string("invalid pitch step '") + step + "'");
  }
}

int midiOf(const PitchSpec& p) {
  if (p.alter < -2 || p.alter > 2) {
    throw RangeError("alter " + std::to_string(p.alter) + " outside -2..+2");
  }
  int midi = 12 * (p.octave + 1) + letterSemitone(p.step) + p.alter;
  if (midi < 0 || midi > 127) {
    throw RangeError("pitch " + std::string(1, p.step) + std::to_string(p.octave) +
                     " gives MIDI " + std::to_string(midi) + " outside [0, 127]");
  }
  return midi;
}

PitchSpec spellMidi(int midi, bool preferFlats) {
  if (midi < 0 || midi > 127) throw RangeError("MIDI " + std::to_string(midi) + " outside [0, 127]");
  const auto& table = preferFlats ? kFlatSpelling : kSharpSpelling;
  auto [step, alter] = table[static_cast<std::size_t>(midi % 12)];
  return PitchSpec{step, alter, midi / 12 - 1};
}

PitchSpec transposePitch(const PitchSpec& p, int semitones) {
  if (semitones == 0) return p;
  return spellMidi(midiOf(p) + semitones, p.alter < 0);
}

std::string midiName(int midi) {
  return std::string(kSharpNames[static_cast<std::size_t>(midi % 12)]) + std::to_string(midi / 12 - 1);
}

std::string_view toString(TechniqueKind kind) {
  return kTechniqueNames[static_cast<std::size_t>(kind)];
}

std::optional<TechniqueKind> techniqueFromString(std::string_view name) {
  for (std::size_t i = 0; i < kTechniqueNames.size(); ++i) {
    if (kTechniqueNames[i] == name) return static_cast<TechniqueKind>(i);
  }
  return std::nullopt;
}

bool NoteEvent::has(TechniqueKind kind) const {
  return std::any_of(techniques.begin(), techniques.end(),
                     [kind](const TechniqueTag& t) { return t.kind == kind; });
}

int Cluster::pitchedCount() const {
  return static_cast<int>(std::count_if(events.begin(), events.end(),
                                        [](const NoteEvent& e) { return !e.isRest(); }));
}

namespace {

bool clusterOrder(const NoteEvent& a, const NoteEvent& b) {
  if (a.isRest() != b.isRest()) return !a.isRest();
  if (a.isRest()) return a.voice < b.voice;
  int ma = a.midi();
  int mb = b.midi();
  if (ma != mb) return ma > mb;
  return a.string.value_or(0) < b.string.value_or(0);
}

}  // namespace

void sortCluster(Cluster& cluster) {
  std::stable_sort(cluster.events.begin(), cluster.events.end(), clusterOrder);
}

Rational measureLength(const TimeSignature& time) {
  if (time.denominator <= 0 || time.numerator <= 0) {
    throw RangeError("invalid time signature " + std::to_string(time.numerator) + "/" +
                     std::to_string(time.denominator));
  }
  return Rational(time.numerator) * Rational(4, time.denominator);
}

std::string_view toString(Structure s) { return kStructureNames[static_cast<std::size_t>(s)]; }

std::optional<Structure> structureFromString(std::string_view name) {
  for (std::size_t i = 0; i < kStructureNames.size(); ++i) {
    if (kStructureNames[i] == name) return static_cast<Structure>(i);
  }
  return std::nullopt;
}

void validate(const ClipAnnotation& annotation) {
  if (annotation.startBar < 1 || annotation.endBar < annotation.startBar) {
    throw RangeError("invalid bar range " + std::to_string(annotation.startBar) + "-" +
                     std::to_string(annotation.endBar));
  }
}

std::vector<std::string> checkInvariants(const Score& score) {
  std::vector<std::string> problems;
  auto report = [&](int bar, const std::string& msg) {
    problems.push_back("bar " + std::to_string(bar) + ": " + msg);
  };
  for (int offset : score.tuning) {
    if (offset < -kMaxTuningOffset || offset > kMaxTuningOffset) {
      problems.push_back("tuning offset " + std::to_string(offset) + " outside [-7, 7]");
    }
  }
  if (score.capo < 0 || score.capo > kMaxCapo) {
    problems.push_back("capo " + std::to_string(score.capo) + " outside [0, 12]");
  }
  if (!problems.empty()) return problems;

  for (const auto& m : score.measures) {
    if (m.divisions <= 0) report(m.index, "non-positive divisions");
    if (m.time.numerator <= 0 || m.time.denominator <= 0) report(m.index, "invalid time signature");
    std::optional<Rational> previous;
    for (const auto& c : m.clusters) {
      if (c.events.empty()) report(m.index, "empty cluster");
      if (previous) {
        bool ordered = score.voicesMerged ? c.onset > *previous : c.onset >= *previous;
        if (!ordered) report(m.index, "cluster onsets out of order at " + toString(c.onset));
      }
      previous = c.onset;
      std::set<std::pair<int, int>> strings;  // (voice or 0, string)
      for (std::size_t i = 0; i < c.events.size(); ++i) {
        const auto& e = c.events[i];
        if (e.onset != c.onset) report(m.index, "event onset differs from its cluster");
        if (e.duration <= 0) report(m.index, "non-positive duration");
        if (i > 0 && clusterOrder(e, c.events[i - 1])) {
          report(m.index, "cluster at " + toString(c.onset) + " not ordered high to low");
        }
        if (e.isRest()) {
          if (e.string || e.fret) report(m.index, "rest carries a fretboard position");
          if (e.tieStop || e.tieStart) report(m.index, "tied rest");
          continue;
        }
        if (!e.string || !e.fret) {
          report(m.index, "pitched event without a fretboard position");
          continue;
        }
        if (*e.string < 1 || *e.string > kStringCount || *e.fret < 0 || *e.fret > kMaxFret) {
          report(m.index, "position out of range");
          continue;
        }
        int key = score.voicesMerged ? 0 : e.voice;
        if (!strings.insert({key, *e.string}).second) {
          report(m.index, "two notes on string " + std::to_string(*e.string) + " at " +
                              toString(c.onset));
        }
        try {
          if (e.midi() != positionToMidi(*e.string, *e.fret, score.tuning, score.capo)) {
            report(m.index, "pitch " + midiName(e.midi()) + " does not match position (" +
                                std::to_string(*e.string) + "," + std::to_string(*e.fret) + ")");
          }
        } catch (const Error& err) {
          report(m.index, err.what());
        }
      }
    }
  }
  return problems;
}

std::string_view pitchClassName(int pc) { return kKeyNames[static_cast<std::size_t>(((pc % 12) + 12) % 12)]; }

std::string keyName(const KeyResult& key) {
  return std::string(pitchClassName(key.tonic)) + (key.mode == Mode::major ? " major" : " minor");
}

std::string_view toString(ChordQuality q) { return kQualityNames[static_cast<std::size_t>(q)]; }

}  // namespace tabproc
