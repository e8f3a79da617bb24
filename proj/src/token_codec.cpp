#include "tabproc/token_codec.h"

#include <algorithm>
#include <charconv>
#include <map>
#include <numeric>
#include <set>

#include "tabproc/error.h"
#include "tabproc/fretboard.h"
#include "tabproc/score_json.h"

namespace tabproc {

namespace {

constexpr std::string_view kRestToken = "R";
constexpr std::string_view kRestFinger = "(R,R)";

std::vector<std::string_view> splitSpaces(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto end = s.find(' ', start);
    if (end == std::string_view::npos) end = s.size();
    parts.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

std::string joinSpaces(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

std::string fingerToken(int string, int fret) {
  return "(" + std::to_string(string) + "," + std::to_string(fret) + ")";
}

// (string, fret) from "(s,f)"; nullopt for "(R,R)".
std::optional<Position> decodeFinger(std::string_view token) {
  if (token == kRestFinger) return std::nullopt;
  auto bad = [&] { return DecodeError("malformed finger token '" + std::string(token) + "'"); };
  if (token.size() < 5 || token.front() != '(' || token.back() != ')') throw bad();
  auto inner = token.substr(1, token.size() - 2);
  auto comma = inner.find(',');
  if (comma == std::string_view::npos) throw bad();
  Position p;
  auto s = inner.substr(0, comma);
  auto f = inner.substr(comma + 1);
  auto r1 = std::from_chars(s.data(), s.data() + s.size(), p.string);
  auto r2 = std::from_chars(f.data(), f.data() + f.size(), p.fret);
  if (r1.ec != std::errc() || r1.ptr != s.data() + s.size() || r2.ec != std::errc() ||
      r2.ptr != f.data() + f.size()) {
    throw bad();
  }
  if (p.string < 1 || p.string > kStringCount || p.fret < 0 || p.fret > kMaxFret) throw bad();
  return p;
}

struct TimedNote {
  Rational start;
  Rational end;
  PitchSpec pitch;
  int midi;
  int string;
  int fret;
};

bool highToLow(const TimedNote* a, const TimedNote* b) {
  if (a->midi != b->midi) return a->midi > b->midi;
  return a->string < b->string;
}

TimeSignature signatureForBar(const std::vector<TimeSignatureChange>& changes, int bar) {
  TimeSignature time;
  for (const auto& c : changes) {
    if (c.bar <= bar) time = c.time;
  }
  return time;
}

std::int64_t lcm64(std::int64_t a, std::int64_t b) { return std::lcm(a, b); }

std::string formatFloat(float value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace

std::string_view toString(TokenMode mode) {
  return mode == TokenMode::pitchOctave ? "pitch-octave" : "octave-pitch";
}

std::optional<TokenMode> tokenModeFromString(std::string_view name) {
  if (name == "pitch-octave") return TokenMode::pitchOctave;
  if (name == "octave-pitch") return TokenMode::octavePitch;
  return std::nullopt;
}

std::string encodePitchToken(const std::optional<PitchSpec>& pitch, TokenMode mode) {
  if (!pitch) return std::string(kRestToken);
  const PitchSpec& p = *pitch;
  if (p.alter < -1 || p.alter > 1) {
    throw EncodeError("double accidental on " + std::string(1, p.step) + std::to_string(p.octave) +
                      " cannot be tokenized");
  }
  midiOf(p);
  if (p.octave < 0 || p.octave > 9) throw EncodeError("octave " + std::to_string(p.octave) + " outside 0..9");
  std::string accidental = p.alter == 1 ? "#" : p.alter == -1 ? "b" : "";
  std::string step(1, p.step);
  std::string octave = std::to_string(p.octave);
  return mode == TokenMode::pitchOctave ? step + octave + accidental : octave + step + accidental;
}

std::optional<PitchSpec> decodePitchToken(std::string_view token, TokenMode mode) {
  if (token == kRestToken) return std::nullopt;
  auto bad = [&] {
    return DecodeError("malformed pitch token '" + std::string(token) + "' for " + std::string(toString(mode)) +
                       " mode");
  };
  if (token.size() < 2 || token.size() > 3) throw bad();
  char stepChar = mode == TokenMode::pitchOctave ? token[0] : token[1];
  char octaveChar = mode == TokenMode::pitchOctave ? token[1] : token[0];
  if (stepChar < 'A' || stepChar > 'G' || octaveChar < '0' || octaveChar > '9') throw bad();
  PitchSpec p{stepChar, 0, octaveChar - '0'};
  if (token.size() == 3) {
    if (token[2] == '#') {
      p.alter = 1;
    } else if (token[2] == 'b') {
      p.alter = -1;
    } else {
      throw bad();
    }
  }
  try {
    midiOf(p);
  } catch (const RangeError&) {
    throw bad();
  }
  return p;
}

int pitchTokenToMidi(std::string_view token, TokenMode mode) {
  auto p = decodePitchToken(token, mode);
  if (!p) throw DecodeError("rest token has no MIDI value");
  return midiOf(*p);
}

EncodedClip encodeClip(const Score& score, TokenMode mode) {
  if (score.measures.empty()) throw EncodeError("cannot encode an empty score");
  if (!score.voicesMerged) throw EncodeError("score voices are not merged");

  EncodedClip clip;
  clip.mode = mode;
  clip.tuning = score.tuning;
  clip.capo = score.capo;
  clip.annotation = score.annotation;

  std::vector<Rational> starts;
  std::vector<TimedNote> notes;
  std::set<Rational> restEdges;
  Rational cursor = 0;
  for (std::size_t mi = 0; mi < score.measures.size(); ++mi) {
    const auto& m = score.measures[mi];
    if (mi == 0 || m.time != score.measures[mi - 1].time) {
      clip.timeSignatures.push_back({static_cast<int>(mi + 1), m.time});
    }
    starts.push_back(cursor);
    for (const auto& c : m.clusters) {
      for (const auto& e : c.events) {
        if (e.tieStart || e.tieStop) throw EncodeError("bar " + std::to_string(m.index) + ": ties not cleaned");
        Rational begin = cursor + e.onset;
        if (e.isRest()) {
          restEdges.insert(begin);
          restEdges.insert(begin + e.duration);
          continue;
        }
        notes.push_back({begin, begin + e.duration, *e.pitch, e.midi(), *e.string, *e.fret});
      }
    }
    cursor += measureLength(m);
  }
  starts.push_back(cursor);

  // A new attack on a string silences whatever that string was holding.
  std::stable_sort(notes.begin(), notes.end(), [](const TimedNote& a, const TimedNote& b) { return a.start < b.start; });
  std::map<int, std::size_t> lastOnString;
  for (std::size_t i = 0; i < notes.size(); ++i) {
    auto it = lastOnString.find(notes[i].string);
    if (it != lastOnString.end() && notes[it->second].end > notes[i].start) {
      notes[it->second].end = std::max(notes[it->second].start, notes[i].start);
    }
    lastOnString[notes[i].string] = i;
  }

  std::set<Rational> edges(restEdges.begin(), restEdges.end());
  edges.insert(starts.begin(), starts.end());
  for (const auto& n : notes) {
    if (n.end > n.start) {
      edges.insert(n.start);
      edges.insert(n.end);
    }
  }

  std::vector<const TimedNote*> sounding;
  for (std::size_t mi = 0; mi + 1 < starts.size(); ++mi) {
    auto it = edges.lower_bound(starts[mi]);
    while (it != edges.end() && *it < starts[mi + 1]) {
      Rational begin = *it;
      ++it;
      Rational end = std::min(it == edges.end() ? starts[mi + 1] : *it, starts[mi + 1]);
      sounding.clear();
      for (const auto& n : notes) {
        if (n.start <= begin && begin < n.end) sounding.push_back(&n);
      }
      std::sort(sounding.begin(), sounding.end(), highToLow);
      std::vector<std::string> pitches;
      std::vector<std::string> fingers;
      for (const TimedNote* n : sounding) {
        pitches.push_back(encodePitchToken(n->pitch, mode));
        fingers.push_back(fingerToken(n->string, n->fret));
      }
      clip.pitchTokens.push_back(sounding.empty() ? std::string(kRestToken) : joinSpaces(pitches));
      clip.fingerTokens.push_back(sounding.empty() ? std::string(kRestFinger) : joinSpaces(fingers));
      clip.timeStamps.push_back(static_cast<float>(toDouble(end - begin)));
    }
  }
  return clip;
}

Score decodeClip(const EncodedClip& clip, ParseReport* report) {
  if (clip.pitchTokens.size() != clip.timeStamps.size() || clip.pitchTokens.size() != clip.fingerTokens.size()) {
    throw DecodeError("token lists differ in length: " + std::to_string(clip.pitchTokens.size()) + " pitch, " +
                      std::to_string(clip.timeStamps.size()) + " time, " + std::to_string(clip.fingerTokens.size()) +
                      " finger");
  }
  if (clip.capo < 0 || clip.capo > kMaxCapo) throw DecodeError("capo outside 0..12");
  for (int offset : clip.tuning) {
    if (offset < -kMaxTuningOffset || offset > kMaxTuningOffset) throw DecodeError("tuning offset outside [-7, 7]");
  }

  Score score;
  score.tuning = clip.tuning;
  score.capo = clip.capo;
  score.voicesMerged = true;
  score.annotation = clip.annotation;

  Measure current;
  current.index = 1;
  current.time = signatureForBar(clip.timeSignatures, 1);
  Rational cursor = 0;
  for (std::size_t i = 0; i < clip.pitchTokens.size(); ++i) {
    Rational length = rationalFromFloat(clip.timeStamps[i]);
    if (length <= 0) throw DecodeError("token " + std::to_string(i) + ": non-positive time stamp");
    Rational barLength = measureLength(current.time);
    if (cursor + length > barLength) {
      throw DecodeError("token " + std::to_string(i) + ": stamp crosses the barline of bar " +
                        std::to_string(current.index));
    }
    auto pitches = splitSpaces(clip.pitchTokens[i]);
    auto fingers = splitSpaces(clip.fingerTokens[i]);
    if (pitches.size() != fingers.size()) {
      throw DecodeError("token " + std::to_string(i) + ": " + std::to_string(pitches.size()) + " pitches but " +
                        std::to_string(fingers.size()) + " positions");
    }
    Cluster cluster;
    cluster.onset = cursor;
    for (std::size_t k = 0; k < pitches.size(); ++k) {
      NoteEvent e;
      e.onset = cursor;
      e.duration = length;
      e.pitch = decodePitchToken(pitches[k], clip.mode);
      auto position = decodeFinger(fingers[k]);
      if (e.pitch.has_value() != position.has_value()) {
        throw DecodeError("token " + std::to_string(i) + ": rest and position tokens disagree");
      }
      if (e.isRest()) {
        if (pitches.size() != 1) throw DecodeError("token " + std::to_string(i) + ": rest inside a note cluster");
        e.techniques.push_back({TechniqueKind::rest, std::nullopt});
      } else {
        e.string = position->string;
        e.fret = position->fret;
        int expected = positionToMidi(*position, clip.tuning, clip.capo);
        if (expected != e.midi() && report) {
          report->warn(current.index, "token " + std::to_string(i) + ": " + std::string(pitches[k]) +
                                          " does not sound at " + std::string(fingers[k]));
        }
      }
      cluster.events.push_back(std::move(e));
    }
    current.clusters.push_back(std::move(cluster));
    cursor += length;
    if (cursor == barLength) {
      score.measures.push_back(std::move(current));
      current = Measure{};
      current.index = static_cast<int>(score.measures.size()) + 1;
      current.time = signatureForBar(clip.timeSignatures, current.index);
      cursor = 0;
    }
  }
  if (cursor != 0) throw DecodeError("clip ends in the middle of bar " + std::to_string(current.index));
  if (score.measures.empty()) throw DecodeError("clip holds no complete bar");

  for (auto& m : score.measures) {
    std::int64_t divisions = 1;
    for (const auto& c : m.clusters) {
      divisions = lcm64(divisions, c.onset.denominator());
      divisions = lcm64(divisions, c.events.front().duration.denominator());
    }
    m.divisions = static_cast<int>(divisions);
  }
  return score;
}

std::vector<std::string> checkClipInvariants(const EncodedClip& clip) {
  std::vector<std::string> problems;
  if (clip.pitchTokens.size() != clip.timeStamps.size() || clip.pitchTokens.size() != clip.fingerTokens.size()) {
    problems.push_back("list lengths differ");
    return problems;
  }
  for (std::size_t i = 0; i < clip.pitchTokens.size(); ++i) {
    auto pitches = splitSpaces(clip.pitchTokens[i]);
    auto fingers = splitSpaces(clip.fingerTokens[i]);
    if (pitches.size() != fingers.size()) problems.push_back("token " + std::to_string(i) + ": note counts differ");
    int previous = 128;
    for (auto token : pitches) {
      try {
        auto p = decodePitchToken(token, clip.mode);
        if (!p) {
          if (pitches.size() != 1) problems.push_back("token " + std::to_string(i) + ": rest inside a cluster");
          continue;
        }
        int midi = midiOf(*p);
        if (midi > previous) problems.push_back("token " + std::to_string(i) + ": not ordered high to low");
        previous = midi;
      } catch (const Error& e) {
        problems.push_back("token " + std::to_string(i) + ": " + e.what());
      }
    }
    for (auto token : fingers) {
      try {
        decodeFinger(token);
      } catch (const Error& e) {
        problems.push_back("token " + std::to_string(i) + ": " + e.what());
      }
    }
  }
  return problems;
}

std::string clipToJson(const EncodedClip& clip) {
  Json j;
  j["mode"] = std::string(toString(clip.mode));
  j["tuning"] = clip.tuning;
  j["capo"] = clip.capo;
  Json signatures = Json::array();
  for (const auto& c : clip.timeSignatures) {
    signatures.push_back(Json{{"bar", c.bar}, {"numerator", c.time.numerator}, {"denominator", c.time.denominator}});
  }
  j["timeSignatures"] = std::move(signatures);
  j["pitch"] = clip.pitchTokens;
  Json time = Json::array();
  for (float stamp : clip.timeStamps) time.push_back(static_cast<double>(stamp));
  j["time"] = std::move(time);
  j["finger"] = clip.fingerTokens;
  if (clip.annotation) j["annotation"] = toJson(*clip.annotation);
  return dumpCanonical(j);
}

EncodedClip clipFromJson(std::string_view text) {
  try {
    Json j = Json::parse(text);
    EncodedClip clip;
    auto modeName = j.at("mode").get<std::string>();
    auto mode = tokenModeFromString(modeName);
    if (!mode) throw DecodeError("unknown token mode '" + modeName + "'");
    clip.mode = *mode;
    auto tuning = j.at("tuning").get<std::vector<int>>();
    if (tuning.size() != kStringCount) throw DecodeError("tuning must have 6 entries");
    std::copy(tuning.begin(), tuning.end(), clip.tuning.begin());
    clip.capo = j.at("capo").get<int>();
    for (const auto& c : j.at("timeSignatures")) {
      clip.timeSignatures.push_back(
          {c.at("bar").get<int>(), {c.at("numerator").get<int>(), c.at("denominator").get<int>()}});
    }
    clip.pitchTokens = j.at("pitch").get<std::vector<std::string>>();
    for (const auto& t : j.at("time")) clip.timeStamps.push_back(static_cast<float>(t.get<double>()));
    clip.fingerTokens = j.at("finger").get<std::vector<std::string>>();
    if (j.contains("annotation")) clip.annotation = annotationFromJson(j.at("annotation"));
    return clip;
  } catch (const Json::exception& e) {
    throw DecodeError(std::string("encoded clip JSON: ") + e.what());
  }
}

std::string clipToText(const EncodedClip& clip) {
  std::string pitch;
  std::string time;
  std::string finger;
  for (std::size_t i = 0; i < clip.pitchTokens.size(); ++i) {
    if (i > 0) {
      pitch += '\t';
      time += '\t';
      finger += '\t';
    }
    pitch += clip.pitchTokens[i];
    time += formatFloat(clip.timeStamps[i]);
    finger += clip.fingerTokens[i];
  }
  return pitch + "\n" + time + "\n" + finger + "\n";
}

}  // namespace tabproc
