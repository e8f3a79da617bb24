#include "tabproc/analysis.h"

#include <algorithm>
#include <numeric>

#include "tabproc/error.h"

namespace tabproc {

namespace {

constexpr std::array<int, 7> kMajorScale{0, 2, 4, 5, 7, 9, 11};
constexpr int kFifthDegree = 7;
constexpr int kSixthDegree = 9;
constexpr int kMinChordNotes = 3;
constexpr int kMelodyFretThreshold = 5;

// Tonics (as relative major) conventionally spelled with flats: F Bb Eb Ab Db Gb.
bool prefersFlats(const KeyResult& key) {
  int major = key.mode == Mode::major ? key.tonic : (key.tonic + 3) % 12;
  return major == 5 || major == 10 || major == 3 || major == 8 || major == 1 || major == 6;
}

const NoteEvent* lowestPitched(const Cluster& c) {
  const NoteEvent* low = nullptr;
  for (const auto& e : c.events) {
    if (!e.isRest() && (!low || e.midi() < low->midi())) low = &e;
  }
  return low;
}

}  // namespace

TagAssignment::TagAssignment(const Score& score) {
  tags_.resize(score.measures.size());
  for (std::size_t m = 0; m < score.measures.size(); ++m) {
    const auto& clusters = score.measures[m].clusters;
    tags_[m].resize(clusters.size());
    for (std::size_t c = 0; c < clusters.size(); ++c) tags_[m][c].assign(clusters[c].events.size(), VoiceTag::inner);
  }
}

VoiceTag TagAssignment::at(const EventRef& ref) const { return tags_.at(ref.measure).at(ref.cluster).at(ref.event); }

void TagAssignment::set(const EventRef& ref, VoiceTag tag) { tags_.at(ref.measure).at(ref.cluster).at(ref.event) = tag; }

std::vector<EventRef> TagAssignment::tagged(VoiceTag tag) const {
  std::vector<EventRef> out;
  for (std::size_t m = 0; m < tags_.size(); ++m) {
    for (std::size_t c = 0; c < tags_[m].size(); ++c) {
      for (std::size_t e = 0; e < tags_[m][c].size(); ++e) {
        if (tags_[m][c][e] == tag) out.push_back({m, c, e});
      }
    }
  }
  return out;
}

TagAssignment extractBassline(const Score& score) {
  TagAssignment tags(score);
  for (std::size_t m = 0; m < score.measures.size(); ++m) {
    const auto& clusters = score.measures[m].clusters;
    int found = 0;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      const NoteEvent* low = lowestPitched(clusters[c]);
      if (!low || *low->string < 5) continue;
      auto e = static_cast<std::size_t>(low - clusters[c].events.data());
      tags.set({m, c, e}, VoiceTag::bassline);
      ++found;
    }
    if (found >= 2) continue;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      for (std::size_t e = 0; e < clusters[c].events.size(); ++e) {
        const auto& ev = clusters[c].events[e];
        if (!ev.isRest() && *ev.string == 4) tags.set({m, c, e}, VoiceTag::bassline);
      }
    }
  }
  return tags;
}

TagAssignment extractMelody(const Score& score) {
  TagAssignment tags(score);
  bool raised = false;
  for (std::size_t m = 0; m < score.measures.size(); ++m) {
    const auto& clusters = score.measures[m].clusters;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      const auto& events = clusters[c].events;
      if (clusters[c].pitchedCount() == 0) continue;
      // Events are ordered high to low, so the first pitched one is the top note.
      auto top = static_cast<std::size_t>(std::find_if(events.begin(), events.end(),
                                                       [](const NoteEvent& e) { return !e.isRest(); }) -
                                          events.begin());
      if (clusters[c].pitchedCount() > 1) {
        tags.set({m, c, top}, VoiceTag::melody);
        continue;
      }
      const auto& note = events[top];
      if (*note.fret > kMelodyFretThreshold) {
        raised = true;
      } else if (*note.fret < kMelodyFretThreshold) {
        raised = false;
      }
      int effective = *note.string - (raised ? 1 : 0);
      if (effective <= 2) tags.set({m, c, top}, VoiceTag::melody);
    }
  }
  return tags;
}

int PitchClassCount::total() const { return std::accumulate(counts.begin(), counts.end(), 0); }

PitchClassCount countPitchClasses(const Score& score) {
  PitchClassCount out;
  for (const auto& m : score.measures) {
    for (const auto& c : m.clusters) {
      for (const auto& e : c.events) {
        if (!e.isRest()) ++out.counts[static_cast<std::size_t>(e.midi() % 12)];
      }
    }
  }
  return out;
}

KeyResult detectKey(const PitchClassCount& counts) {
  if (counts.total() == 0) throw Error("key detection needs at least one note");
  auto count = [&](int pc) { return counts.counts[static_cast<std::size_t>(pc % 12)]; };
  int bestTonic = 0;
  int bestSum = -1;
  for (int tonic = 0; tonic < 12; ++tonic) {
    int sum = 0;
    for (int step : kMajorScale) sum += count(tonic + step);
    if (sum > bestSum) {
      bestSum = sum;
      bestTonic = tonic;
    }
  }
  if (count(bestTonic + kSixthDegree) > count(bestTonic + kFifthDegree)) {
    return {(bestTonic + kSixthDegree) % 12, Mode::minor, bestSum};
  }
  return {bestTonic, Mode::major, bestSum};
}

KeyResult detectKey(const Score& score) { return detectKey(countPitchClasses(score)); }

Score transposeToKey(const Score& score, const KeyResult& target, int maxFret) {
  KeyResult detected = detectKey(score);
  int delta = ((target.tonic - detected.tonic) % 12 + 12) % 12;
  if (delta > 6) delta -= 12;
  if (delta == 0) return score;

  const bool flats = prefersFlats(target);
  Score out = score;
  std::vector<std::string> offenders;
  for (auto& m : out.measures) {
    for (auto& c : m.clusters) {
      std::vector<int> used;
      for (auto& e : c.events) {
        if (e.isRest()) continue;
        int midi = e.midi() + delta;
        std::vector<Position> positions;
        try {
          positions = midiToPositions(midi, score.tuning, score.capo, maxFret);
        } catch (const RangeError&) {
        }
        std::erase_if(positions, [&](const Position& p) {
          return std::find(used.begin(), used.end(), p.string) != used.end();
        });
        if (positions.empty()) {
          offenders.push_back("bar " + std::to_string(m.index) + " " + midiName(e.midi()) + "->" +
                              (midi >= 0 && midi <= 127 ? midiName(midi) : std::to_string(midi)));
          continue;
        }
        auto same = std::find_if(positions.begin(), positions.end(),
                                 [&](const Position& p) { return p.string == *e.string; });
        Position chosen = same != positions.end()
                              ? *same
                              : *std::min_element(positions.begin(), positions.end(),
                                                  [](const Position& a, const Position& b) { return a.fret < b.fret; });
        used.push_back(chosen.string);
        e.pitch = spellMidi(midi, flats);
        e.string = chosen.string;
        e.fret = chosen.fret;
      }
      sortCluster(c);
    }
  }
  if (!offenders.empty()) {
    std::string list;
    for (const auto& o : offenders) list += (list.empty() ? "" : ", ") + o;
    throw RangeError("transposition leaves the guitar range: " + list);
  }
  return out;
}

const std::vector<IntervalPattern>& chordPatterns() {
  using Q = ChordQuality;
  // Longest patterns first so richer evidence wins.
  static const std::vector<IntervalPattern> patterns = [] {
    std::vector<IntervalPattern> p{
        {Q::maj, {4, 3, 5}, 2},  {Q::maj, {7, 5}, 1},     {Q::maj, {4, 8}, 1},
        {Q::min, {3, 4, 5}, 2},  {Q::min, {3, 9}, 1},     {Q::maj7, {4, 3, 4, 1}, 3},
        {Q::maj7, {4, 7, 1}, 2}, {Q::maj7, {7, 4, 1}, 2}, {Q::min7, {3, 4, 3, 2}, 3},
        {Q::min7, {7, 2, 3}, 1}, {Q::min7, {7, 3, 2}, 2}, {Q::dom7, {4, 3, 3, 2}, 3},
        {Q::dom7, {2, 4, 6}, 0}, {Q::aug, {4, 4, 4}, std::nullopt}, {Q::dim, {3, 3, 6}, 2},
    };
    std::stable_sort(p.begin(), p.end(),
                     [](const IntervalPattern& a, const IntervalPattern& b) { return a.cyclic.size() > b.cyclic.size(); });
    return p;
  }();
  return patterns;
}

std::optional<ChordResult> recognizePitchClasses(const std::vector<int>& pitchClasses) {
  std::vector<int> pcs;
  for (int pc : pitchClasses) pcs.push_back(((pc % 12) + 12) % 12);
  std::sort(pcs.begin(), pcs.end());
  pcs.erase(std::unique(pcs.begin(), pcs.end()), pcs.end());
  const std::size_t n = pcs.size();
  if (n < 2 || n > 4) return std::nullopt;

  std::vector<int> intervals(n);
  for (std::size_t i = 0; i + 1 < n; ++i) intervals[i] = pcs[i + 1] - pcs[i];
  intervals[n - 1] = 12 + pcs[0] - pcs[n - 1];

  std::vector<int> rotated(n);
  for (const auto& pattern : chordPatterns()) {
    if (pattern.cyclic.size() != n) continue;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < n; ++j) rotated[j] = intervals[(r + j) % n];
      if (rotated != pattern.cyclic) continue;
      ChordResult result;
      result.quality = pattern.quality;
      result.matchedPattern = pattern.cyclic;
      if (pattern.rootMarkIndex) result.root = pcs[(r + *pattern.rootMarkIndex + 1) % n];
      return result;
    }
  }
  return std::nullopt;
}

std::optional<ChordResult> recognizeChord(const Cluster& cluster, const Tuning& tuning, int capo) {
  std::vector<int> pcs;
  for (const auto& e : cluster.events) {
    if (e.isRest() || *e.string < 3) continue;
    pcs.push_back(positionToMidi(*e.string, *e.fret, tuning, capo) % 12);
  }
  return recognizePitchClasses(pcs);
}

std::vector<DetectedEvent> detectEvents(const Score& score, const std::set<TechniqueKind>& only) {
  std::vector<DetectedEvent> out;
  auto wanted = [&](TechniqueKind k) { return only.empty() || only.count(k) > 0; };
  for (const auto& m : score.measures) {
    for (const auto& c : m.clusters) {
      if (c.pitchedCount() >= kMinChordNotes && wanted(TechniqueKind::chordEvent)) {
        out.push_back({m.index, c.onset, {TechniqueKind::chordEvent, std::nullopt}});
      }
      for (const auto& e : c.events) {
        for (const auto& t : e.techniques) {
          if (wanted(t.kind)) out.push_back({m.index, c.onset, t});
        }
      }
    }
  }
  return out;
}

}  // namespace tabproc
