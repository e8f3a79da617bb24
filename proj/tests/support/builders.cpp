#include "builders.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "tabproc/ingest.h"

namespace tabproc::testing {

namespace {

NoteEvent pitchedEvent(Rational onset, Rational duration, Position p, const Tuning& tuning, int capo, int voice,
                       bool flats = false) {
  NoteEvent e;
  e.onset = onset;
  e.duration = duration;
  e.pitch = spellMidi(positionToMidi(p, tuning, capo), flats);
  e.string = p.string;
  e.fret = p.fret;
  e.voice = voice;
  return e;
}

NoteEvent restEvent(Rational onset, Rational duration, int voice) {
  NoteEvent e;
  e.onset = onset;
  e.duration = duration;
  e.voice = voice;
  e.techniques.push_back({TechniqueKind::rest, std::nullopt});
  return e;
}

void sortMeasure(Measure& m) {
  for (auto& c : m.clusters) sortCluster(c);
  std::stable_sort(m.clusters.begin(), m.clusters.end(), [](const Cluster& a, const Cluster& b) {
    if (a.onset != b.onset) return a.onset < b.onset;
    return a.events.front().voice < b.events.front().voice;
  });
}

// Picks the octave of a pitch class that fits on `string` within frets 0..11.
Position placeOnString(int pc, int string, const Tuning& tuning) {
  int open = openMidi(string) + tuning[static_cast<std::size_t>(string - 1)];
  return {string, ((pc - open) % 12 + 12) % 12};
}

}  // namespace

ScoreBuilder& ScoreBuilder::tuning(const Tuning& t) {
  score_.tuning = t;
  return *this;
}

ScoreBuilder& ScoreBuilder::capo(int c) {
  score_.capo = c;
  return *this;
}

ScoreBuilder& ScoreBuilder::time(int numerator, int denominator) {
  time_ = {numerator, denominator};
  return *this;
}

ScoreBuilder& ScoreBuilder::bar() {
  Measure m;
  m.index = static_cast<int>(score_.measures.size()) + 1;
  m.divisions = 4;
  m.time = time_;
  score_.measures.push_back(std::move(m));
  return *this;
}

ScoreBuilder& ScoreBuilder::notes(Rational onset, Rational duration, const std::vector<Position>& positions,
                                  int voice) {
  Cluster c;
  c.onset = onset;
  for (const auto& p : positions) {
    c.events.push_back(pitchedEvent(onset, duration, p, score_.tuning, score_.capo, voice));
  }
  score_.measures.back().clusters.push_back(std::move(c));
  return *this;
}

ScoreBuilder& ScoreBuilder::rest(Rational onset, Rational duration, int voice) {
  Cluster c;
  c.onset = onset;
  c.events.push_back(restEvent(onset, duration, voice));
  score_.measures.back().clusters.push_back(std::move(c));
  return *this;
}

ScoreBuilder& ScoreBuilder::tie(bool start, bool stop) {
  for (auto& e : score_.measures.back().clusters.back().events) {
    e.tieStart = start;
    e.tieStop = stop;
  }
  return *this;
}

ScoreBuilder& ScoreBuilder::technique(TechniqueKind kind, std::optional<int> detail) {
  for (auto& e : score_.measures.back().clusters.back().events) e.techniques.push_back({kind, detail});
  return *this;
}

Score ScoreBuilder::build(bool merged) const {
  Score s = score_;
  s.voicesMerged = merged;
  for (auto& m : s.measures) sortMeasure(m);
  return s;
}

std::string toMusicXml(const Score& score) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<score-partwise version=\"3.1\">\n";
  out << "  <work><work-title>" << score.title << "</work-title></work>\n";
  out << "  <identification><creator type=\"artist\">" << score.artist << "</creator></identification>\n";
  out << "  <part-list><score-part id=\"P1\"><part-name>Guitar</part-name></score-part></part-list>\n";
  out << "  <part id=\"P1\">\n";
  std::optional<TimeSignature> lastTime;
  int lastDivisions = 0;
  for (std::size_t mi = 0; mi < score.measures.size(); ++mi) {
    const Measure& m = score.measures[mi];
    out << "    <measure number=\"" << m.index << "\">\n";
    if (mi == 0 || m.time != *lastTime || m.divisions != lastDivisions) {
      out << "      <attributes><divisions>" << m.divisions << "</divisions>";
      out << "<time><beats>" << m.time.numerator << "</beats><beat-type>" << m.time.denominator
          << "</beat-type></time>";
      if (mi == 0) {
        out << "<staff-details><staff-lines>6</staff-lines>";
        for (int line = 1; line <= kStringCount; ++line) {
          int string = kStringCount + 1 - line;
          PitchSpec p = spellMidi(openMidi(string) + score.tuning[static_cast<std::size_t>(string - 1)]);
          out << "<staff-tuning line=\"" << line << "\"><tuning-step>" << p.step << "</tuning-step>";
          if (p.alter) out << "<tuning-alter>" << p.alter << "</tuning-alter>";
          out << "<tuning-octave>" << p.octave << "</tuning-octave></staff-tuning>";
        }
        if (score.capo) out << "<capo>" << score.capo << "</capo>";
        out << "</staff-details>";
      }
      out << "</attributes>\n";
      lastTime = m.time;
      lastDivisions = m.divisions;
    }
    auto ticks = [&](const Rational& r) {
      Rational t = r * m.divisions;
      return t.numerator() / t.denominator();
    };
    std::set<int> voices;
    for (const auto& c : m.clusters) voices.insert(c.events.front().voice);
    bool firstVoice = true;
    for (int voice : voices) {
      if (!firstVoice) out << "      <backup><duration>" << ticks(measureLength(m)) << "</duration></backup>\n";
      firstVoice = false;
      Rational cursor = 0;
      for (const auto& c : m.clusters) {
        if (c.events.front().voice != voice) continue;
        if (c.onset > cursor) out << "      <forward><duration>" << ticks(c.onset - cursor) << "</duration></forward>\n";
        bool chord = false;
        for (const auto& e : c.events) {
          out << "      <note>";
          if (chord) out << "<chord/>";
          if (e.isRest()) {
            out << "<rest/>";
          } else {
            out << "<pitch><step>" << e.pitch->step << "</step>";
            if (e.pitch->alter) out << "<alter>" << e.pitch->alter << "</alter>";
            out << "<octave>" << e.pitch->octave << "</octave></pitch>";
          }
          out << "<duration>" << ticks(e.duration) << "</duration>";
          if (e.tieStop) out << "<tie type=\"stop\"/>";
          if (e.tieStart) out << "<tie type=\"start\"/>";
          out << "<voice>" << e.voice << "</voice>";
          if (!e.isRest()) {
            out << "<notations><technical><string>" << *e.string << "</string><fret>" << *e.fret
                << "</fret></technical></notations>";
          }
          out << "</note>\n";
          chord = true;
        }
        cursor = c.onset + c.events.front().duration;
      }
    }
    out << "    </measure>\n";
  }
  out << "  </part>\n</score-partwise>\n";
  return out.str();
}

Score randomRawScore(std::mt19937_64& rng, const RandomScoreOptions& options) {
  static const std::vector<Tuning> kTunings{kStandardTuning, {0, 0, 0, 0, 0, -2}, {-2, -2, -1, 0, 0, -2},
                                            {-1, -1, -1, -1, -1, -1}};
  static const std::vector<Rational> kDurations{Rational(1, 4), Rational(1, 2), Rational(3, 4), Rational(1),
                                                Rational(3, 2), Rational(2)};
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto chance = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };

  Score s;
  s.title = "random";
  s.artist = "generator";
  if (options.varyTuning) {
    s.tuning = kTunings[static_cast<std::size_t>(uniform(0, static_cast<int>(kTunings.size()) - 1))];
    s.capo = uniform(0, 1) ? uniform(0, 5) : 0;
  }
  bool flats = uniform(0, 1) == 1;
  TimeSignature time = options.allowThreeFour && uniform(0, 3) == 0 ? TimeSignature{3, 4} : TimeSignature{4, 4};
  int bars = uniform(options.minBars, options.maxBars);
  int voices = uniform(1, options.maxVoices);

  for (int b = 1; b <= bars; ++b) {
    Measure m;
    m.index = b;
    m.divisions = 4;
    m.time = time;
    s.measures.push_back(std::move(m));
  }
  // Voice v owns strings 2v-1 and 2v.
  for (int v = 1; v <= voices; ++v) {
    bool previousPitched = false;
    std::vector<Position> previousPositions;
    for (auto& m : s.measures) {
      Rational cursor = 0;
      Rational length = measureLength(m);
      while (cursor < length) {
        std::vector<Rational> fits;
        for (const auto& d : kDurations) {
          if (cursor + d <= length) fits.push_back(d);
        }
        Rational d = fits[static_cast<std::size_t>(uniform(0, static_cast<int>(fits.size()) - 1))];
        Cluster c;
        c.onset = cursor;
        if (chance(options.restProbability)) {
          c.events.push_back(restEvent(cursor, d, v));
          previousPitched = false;
        } else {
          bool tie = previousPitched && chance(options.tieProbability);
          std::vector<Position> positions;
          if (tie) {
            positions = previousPositions;
          } else {
            int first = 2 * v - 1 + uniform(0, 1);
            positions.push_back({first, uniform(0, 12)});
            if (uniform(0, 1)) positions.push_back({first == 2 * v ? 2 * v - 1 : 2 * v, uniform(0, 12)});
          }
          for (const auto& p : positions) {
            NoteEvent e = pitchedEvent(cursor, d, p, s.tuning, s.capo, v, flats);
            e.tieStop = tie;
            c.events.push_back(std::move(e));
          }
          previousPositions = positions;
          previousPitched = true;
        }
        m.clusters.push_back(std::move(c));
        cursor += d;
      }
    }
  }
  // A tie stop implies a tie start on the same string in the voice's previous cluster.
  for (int v = 1; v <= voices; ++v) {
    std::map<int, NoteEvent*> lastOnString;
    for (auto& m : s.measures) {
      for (auto& c : m.clusters) {
        if (c.events.front().voice != v) continue;
        if (c.events.front().isRest()) {
          lastOnString.clear();
          continue;
        }
        std::map<int, NoteEvent*> current;
        for (auto& e : c.events) {
          if (e.tieStop) {
            auto it = lastOnString.find(*e.string);
            if (it != lastOnString.end()) it->second->tieStart = true;
          }
          current[*e.string] = &e;
        }
        lastOnString = std::move(current);
      }
    }
  }
  for (auto& m : s.measures) sortMeasure(m);
  return s;
}

Score randomChordScore(std::mt19937_64& rng, int bars) {
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  static const int kTonics[] = {0, 7, 2, 5, 9};
  int tonic = kTonics[uniform(0, 4)];
  static const int kMajorScale[] = {0, 2, 4, 5, 7, 9, 11};
  ScoreBuilder b;
  for (int bar = 0; bar < bars; ++bar) {
    b.bar();
    std::set<int> slots{0};
    int extra = uniform(0, 4);
    for (int i = 0; i < extra; ++i) slots.insert(uniform(1, 15));
    std::vector<int> ordered(slots.begin(), slots.end());
    for (std::size_t i = 0; i < ordered.size(); ++i) {
      Rational onset(ordered[i], 4);
      Rational end(i + 1 < ordered.size() ? ordered[i + 1] : 16, 4);
      int degree = uniform(0, 6);
      int root = (tonic + kMajorScale[degree]) % 12;
      int third = (tonic + kMajorScale[(degree + 2) % 7]) % 12;
      int fifth = (tonic + kMajorScale[(degree + 4) % 7]) % 12;
      std::vector<Position> ps;
      int shape = uniform(0, 3);
      if (shape == 0) {
        ps.push_back(placeOnString(root, 6, kStandardTuning));
      } else {
        ps.push_back(placeOnString(root, 6, kStandardTuning));
        ps.push_back(placeOnString(fifth, 5, kStandardTuning));
        ps.push_back(placeOnString(third, 4, kStandardTuning));
        if (shape == 3) ps.push_back(placeOnString(root, 3, kStandardTuning));
      }
      ps.push_back({1, uniform(0, 12)});
      b.notes(onset, end - onset, ps);
    }
  }
  Score s = b.build(true);
  s.title = "chords";
  return s;
}

Score diatonicScore(std::mt19937_64& rng, const KeyResult& key) {
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  static const int kMajorScale[] = {0, 2, 4, 5, 7, 9, 11};
  int majorTonic = key.mode == Mode::major ? key.tonic : (key.tonic + 3) % 12;
  std::array<int, 7> counts{};
  for (auto& c : counts) c = uniform(1, 8);
  // Degree 5 is index 4, degree 6 index 5 of the relative major.
  if (key.mode == Mode::major && counts[4] <= counts[5]) counts[4] = counts[5] + uniform(1, 3);
  if (key.mode == Mode::minor && counts[5] <= counts[4]) counts[5] = counts[4] + uniform(1, 3);
  std::vector<int> pcs;
  for (int d = 0; d < 7; ++d) {
    for (int i = 0; i < counts[static_cast<std::size_t>(d)]; ++i) pcs.push_back((majorTonic + kMajorScale[d]) % 12);
  }
  std::shuffle(pcs.begin(), pcs.end(), rng);
  ScoreBuilder b;
  for (std::size_t i = 0; i < pcs.size(); ++i) {
    if (i % 4 == 0) b.bar();
    int midi = 48 + pcs[i] + 12 * uniform(0, 1);
    auto positions = midiToPositions(midi, kStandardTuning, 0, kMaxFret);
    auto best = *std::min_element(positions.begin(), positions.end(),
                                  [](const Position& a, const Position& p) { return a.fret < p.fret; });
    b.notes(Rational(static_cast<std::int64_t>(i % 4)), 1, {best});
  }
  for (std::size_t i = pcs.size(); i % 4 != 0; ++i) b.rest(Rational(static_cast<std::int64_t>(i % 4)), 1);
  Score s = b.build(true);
  s.title = "diatonic";
  return s;
}

std::map<int, Rational> soundingByMidi(const Score& score) {
  std::map<int, Rational> out;
  for (const auto& m : score.measures) {
    for (const auto& c : m.clusters) {
      for (const auto& e : c.events) {
        if (!e.isRest()) out[e.midi()] += e.duration;
      }
    }
  }
  return out;
}

int countTieFlags(const Score& score) {
  int n = 0;
  for (const auto& m : score.measures) {
    for (const auto& c : m.clusters) {
      for (const auto& e : c.events) n += (e.tieStart ? 1 : 0) + (e.tieStop ? 1 : 0);
    }
  }
  return n;
}

}  // namespace tabproc::testing
