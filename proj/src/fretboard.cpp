#include "tabproc/fretboard.h"

#include <algorithm>

#include "tabproc/error.h"

namespace tabproc {

namespace {

void checkCapo(int capo) {
  if (capo < 0 || capo > kMaxCapo) throw RangeError("capo " + std::to_string(capo) + " outside [0, 12]");
}

}  // namespace

int openMidi(int string) {
  if (string < 1 || string > kStringCount) {
    throw RangeError("string " + std::to_string(string) + " outside 1..6");
  }
  return kStandardOpenMidi[static_cast<std::size_t>(string - 1)];
}

int positionToMidi(int string, int fret, const Tuning& tuning, int capo) {
  int open = openMidi(string);
  if (fret < 0 || fret > kMaxFret) throw RangeError("fret " + std::to_string(fret) + " outside 0..24");
  checkCapo(capo);
  return open + tuning[static_cast<std::size_t>(string - 1)] + capo + fret;
}

std::vector<Position> midiToPositions(int midi, const Tuning& tuning, int capo, int maxFret) {
  if (midi < 0 || midi > 127) throw RangeError("MIDI " + std::to_string(midi) + " outside [0, 127]");
  checkCapo(capo);
  std::vector<Position> positions;
  for (int string = kStringCount; string >= 1; --string) {
    int fret = midi - openMidi(string) - tuning[static_cast<std::size_t>(string - 1)] - capo;
    if (fret >= 0 && fret <= maxFret - capo) positions.push_back({string, fret});
  }
  if (positions.empty()) throw NotPlayable("MIDI " + std::to_string(midi) + " is not playable");
  return positions;
}

int lowestMidi(const Tuning& tuning, int capo) {
  int lowest = 127;
  for (int s = 1; s <= kStringCount; ++s) lowest = std::min(lowest, positionToMidi(s, 0, tuning, capo));
  return lowest;
}

int highestMidi(const Tuning& tuning, int capo, int maxFret) {
  checkCapo(capo);
  int highest = 0;
  for (int s = 1; s <= kStringCount; ++s) {
    highest = std::max(highest, openMidi(s) + tuning[static_cast<std::size_t>(s - 1)] + maxFret);
  }
  return highest;
}

}  // namespace tabproc
