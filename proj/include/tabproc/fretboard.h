// Conversions between fretboard positions and MIDI numbers.

#pragma once

#include <vector>

#include "tabproc/model.h"

namespace tabproc {

/// Standard-tuning open strings, string 1..6: E4 B3 G3 D3 A2 E2.
inline constexpr std::array<int, kStringCount> kStandardOpenMidi{64, 59, 55, 50, 45, 40};

struct Position {
  int string = 1;
  int fret = 0;

  friend bool operator==(const Position&, const Position&) = default;
};

/// Open-string MIDI under standard tuning. Throws RangeError for strings
/// outside 1..6.
int openMidi(int string);

/// openMidi(string) + tuning offset + capo + fret.
int positionToMidi(int string, int fret, const Tuning& tuning, int capo);
inline int positionToMidi(Position p, const Tuning& tuning, int capo) {
  return positionToMidi(p.string, p.fret, tuning, capo);
}

/// Every position sounding `midi`, lower-pitched string first (string 6
/// towards string 1). Frets are counted from the capo and bounded by
/// maxFret - capo. Throws NotPlayable when the list would be empty.
std::vector<Position> midiToPositions(int midi, const Tuning& tuning, int capo,
                                      int maxFret = kMaxFret);

/// Lowest and highest playable MIDI under the tuning and capo.
int lowestMidi(const Tuning& tuning, int capo);
int highestMidi(const Tuning& tuning, int capo, int maxFret = kMaxFret);

}  // namespace tabproc
