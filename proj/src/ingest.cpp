#include "tabproc/ingest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "tabproc/error.h"
#include "tabproc/fretboard.h"
#include "tabproc/mxl_container.h"
#include "tabproc/xml_tree.h"

namespace tabproc {

void ParseReport::append(const ParseReport& other) {
  warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
  droppedNodes += other.droppedNodes;
}

namespace {

const std::set<std::string, std::less<>> kNoteChildren{
    "chord", "pitch",    "unpitched", "rest",       "duration",   "tie",       "voice",
    "type",  "dot",      "accidental", "time-modification", "stem", "notehead", "notehead-text",
    "staff", "beam",     "notations", "lyric",      "play",       "grace",     "cue",
    "instrument", "listen", "footnote", "level"};

const std::set<std::string, std::less<>> kMeasureChildren{
    "note",     "backup", "forward",  "attributes", "direction", "barline",  "print",
    "harmony",  "sound",  "listening", "bookmark",  "link",      "grouping", "figured-bass"};

int toInt(const std::string& text, const char* what, int bar) {
  try {
    std::size_t used = 0;
    int value = std::stoi(text, &used);
    if (used == text.size()) return value;
  } catch (const std::exception&) {
  }
  throw StructuralError("bar " + std::to_string(bar) + ": invalid " + what + " '" + text + "'");
}

std::optional<int> optionalInt(const XmlElement& node, std::string_view path, const char* what, int bar) {
  auto text = node.textAt(path);
  if (!text) return std::nullopt;
  return toInt(*text, what, bar);
}

struct PartState {
  int divisions = 0;
  TimeSignature time;
  Tuning tuning = kStandardTuning;
  bool hasTuning = false;
  int capo = 0;
  int staves = 1;
  int tabStaff = 0;  // 0 accepts every staff
};

void readStaffDetails(const XmlElement& details, PartState& state, int bar) {
  if (details.childrenNamed("staff-tuning").empty() && !details.child("capo")) return;
  if (auto number = details.attribute("number")) state.tabStaff = toInt(*number, "staff number", bar);
  int lines = optionalInt(details, "staff-lines", "staff-lines", bar).value_or(kStringCount);
  for (const XmlElement* st : details.childrenNamed("staff-tuning")) {
    int line = toInt(st->attribute("line").value_or("0"), "staff-tuning line", bar);
    int string = lines + 1 - line;
    if (string < 1 || string > kStringCount) continue;
    PitchSpec open;
    auto step = st->textAt("tuning-step").value_or("");
    if (step.size() != 1) throw StructuralError("bar " + std::to_string(bar) + ": invalid tuning-step");
    open.step = step[0];
    open.alter = static_cast<int>(std::lround(std::stod(st->textAt("tuning-alter").value_or("0"))));
    open.octave = optionalInt(*st, "tuning-octave", "tuning-octave", bar).value_or(4);
    int offset = midiOf(open) - openMidi(string);
    if (offset < -kMaxTuningOffset || offset > kMaxTuningOffset) {
      throw StructuralError("bar " + std::to_string(bar) + ": string " + std::to_string(string) +
                            " tuned " + std::to_string(offset) + " semitones from standard");
    }
    state.tuning[static_cast<std::size_t>(string - 1)] = offset;
    state.hasTuning = true;
  }
  if (auto capo = optionalInt(details, "capo", "capo", bar)) {
    if (*capo < 0 || *capo > kMaxCapo) throw StructuralError("bar " + std::to_string(bar) + ": capo outside 0..12");
    state.capo = *capo;
  }
}

void readAttributes(const XmlElement& attrs, PartState& state, int bar) {
  if (auto div = optionalInt(attrs, "divisions", "divisions", bar)) {
    if (*div <= 0) throw StructuralError("bar " + std::to_string(bar) + ": divisions must be positive");
    state.divisions = *div;
  }
  if (const XmlElement* time = attrs.child("time")) {
    auto beats = time->textAt("beats");
    auto beatType = time->textAt("beat-type");
    if (beats && beatType) {
      state.time = {toInt(*beats, "beats", bar), toInt(*beatType, "beat-type", bar)};
      measureLength(state.time);  // rejects a zero denominator
    }
  }
  if (auto staves = optionalInt(attrs, "staves", "staves", bar)) state.staves = *staves;
  for (const XmlElement* details : attrs.childrenNamed("staff-details")) readStaffDetails(*details, state, bar);
}

bool hasTablature(const XmlElement& part) {
  for (const XmlElement* measure : part.childrenNamed("measure")) {
    for (const XmlElement* attrs : measure->childrenNamed("attributes")) {
      for (const XmlElement* details : attrs->childrenNamed("staff-details")) {
        if (details->child("staff-tuning")) return true;
      }
    }
  }
  return false;
}

struct PartResult {
  std::vector<Measure> measures;
  Tuning tuning = kStandardTuning;
  int capo = 0;
};

class PartReader {
 public:
  PartReader(const ParseOptions& options, ParseReport& report, int track)
      : options_(options), report_(report), track_(track) {}

  PartResult read(const XmlElement& part) {
    // Tuning and capo apply to the whole part even if declared after bar 1.
    for (const XmlElement* measure : part.childrenNamed("measure")) {
      for (const XmlElement* attrs : measure->childrenNamed("attributes")) {
        for (const XmlElement* details : attrs->childrenNamed("staff-details")) {
          readStaffDetails(*details, state_, 0);
        }
      }
    }
    PartResult result;
    result.tuning = state_.tuning;
    result.capo = state_.capo;
    int bar = 0;
    for (const XmlElement* measure : part.childrenNamed("measure")) {
      ++bar;
      result.measures.push_back(readMeasure(*measure, bar));
    }
    resolveSlides(result.measures);
    return result;
  }

 private:
  Measure readMeasure(const XmlElement& measure, int bar) {
    std::int64_t cursor = 0;
    std::int64_t lastOnset = 0;
    std::vector<NoteEvent> events;
    std::map<int, std::int64_t> voiceFill;  // divisions covered per voice
    bool sawTiming = false;
    for (const auto& child : measure.children) {
      if (child.name == "attributes") {
        readAttributes(child, state_, bar);
      } else if (child.name == "backup" || child.name == "forward") {
        requireDivisions(bar);
        auto dur = optionalInt(child, "duration", "duration", bar).value_or(0);
        if (child.name == "backup") {
          cursor = std::max<std::int64_t>(0, cursor - dur);
        } else {
          cursor += dur;
          voiceFill[optionalInt(child, "voice", "voice", bar).value_or(1)] += dur;
        }
      } else if (child.name == "note") {
        requireDivisions(bar);
        sawTiming = true;
        readNote(child, bar, cursor, lastOnset, events, voiceFill);
      } else if (!kMeasureChildren.count(child.name)) {
        ++report_.droppedNodes;
      }
    }
    if (!sawTiming) requireDivisions(bar);

    Measure m;
    m.index = bar;
    m.divisions = state_.divisions;
    m.time = state_.time;
    Rational expected = measureLength(m.time);
    for (const auto& [voice, fill] : voiceFill) {
      Rational got(fill, state_.divisions);
      if (got != expected) {
        report_.warn(bar, "voice " + std::to_string(voice) + " fills " + toString(got) + " of " +
                              toString(expected) + " quarter notes");
      }
    }
    m.clusters = groupByVoice(std::move(events), bar);
    return m;
  }

  void requireDivisions(int bar) {
    if (state_.divisions <= 0) throw StructuralError("bar " + std::to_string(bar) + ": missing divisions");
  }

  void readNote(const XmlElement& note, int bar, std::int64_t& cursor, std::int64_t& lastOnset,
                std::vector<NoteEvent>& events, std::map<int, std::int64_t>& voiceFill) {
    for (const auto& c : note.children) {
      if (!kNoteChildren.count(c.name)) ++report_.droppedNodes;
    }
    bool isChordMember = note.child("chord") != nullptr;
    bool pitched = note.child("pitch") != nullptr;
    if (note.child("grace")) {
      ++report_.droppedNodes;
      report_.warn(bar, "grace note dropped");
      return;
    }
    std::int64_t duration = optionalInt(note, "duration", "duration", bar).value_or(0);
    int voice = optionalInt(note, "voice", "voice", bar).value_or(1);
    std::int64_t onset = isChordMember ? lastOnset : cursor;
    if (!isChordMember) {
      lastOnset = cursor;
      cursor += duration;
    }
    auto staff = optionalInt(note, "staff", "staff", bar);
    if (state_.staves > 1 && state_.tabStaff > 0 && staff && *staff != state_.tabStaff) return;
    if (!isChordMember) voiceFill[voice] += duration;

    if (duration <= 0) {
      ++report_.droppedNodes;
      report_.warn(bar, "zero-duration note dropped");
      return;
    }
    if (note.child("unpitched")) {
      ++report_.droppedNodes;
      report_.warn(bar, "unpitched note dropped");
      return;
    }

    NoteEvent e;
    e.onset = Rational(onset, state_.divisions);
    e.duration = Rational(duration, state_.divisions);
    e.voice = voice;
    e.track = track_;
    for (TechniqueKind kind : options_.techniques.match(note)) e.techniques.push_back({kind, std::nullopt});

    if (!pitched) {
      if (!note.child("rest")) report_.warn(bar, "note without pitch treated as rest");
      events.push_back(std::move(e));
      return;
    }

    const XmlElement& pitch = *note.child("pitch");
    auto step = pitch.textAt("step").value_or("");
    double alter = std::stod(pitch.textAt("alter").value_or("0"));
    if (alter != std::round(alter)) report_.warn(bar, "microtonal alter rounded");
    PitchSpec spec;
    spec.step = step.size() == 1 ? step[0] : '?';
    spec.alter = static_cast<int>(std::lround(alter));
    spec.octave = optionalInt(pitch, "octave", "octave", bar).value_or(-10);
    int midi = 0;
    try {
      midi = midiOf(spec);
    } catch (const RangeError& err) {
      ++report_.droppedNodes;
      report_.warn(bar, std::string("pitched note dropped: ") + err.what());
      return;
    }
    e.pitch = spec;

    for (const XmlElement* tie : note.childrenNamed("tie")) applyTie(e, tie->attribute("type").value_or(""));
    if (const XmlElement* notations = note.child("notations")) {
      for (const XmlElement* tied : notations->childrenNamed("tied")) {
        applyTie(e, tied->attribute("type").value_or(""));
      }
    }

    auto string = optionalInt(note, "notations/technical/string", "string", bar);
    auto fret = optionalInt(note, "notations/technical/fret", "fret", bar);
    if (!assignPosition(e, midi, string, fret, bar)) return;
    events.push_back(std::move(e));
  }

  static void applyTie(NoteEvent& e, const std::string& type) {
    if (type == "start" || type == "continue") e.tieStart = true;
    if (type == "stop" || type == "continue") e.tieStop = true;
  }

  bool assignPosition(NoteEvent& e, int midi, std::optional<int> string, std::optional<int> fret, int bar) {
    const int maxFret = options_.maxFret - state_.capo;
    if (string && fret && *string >= 1 && *string <= kStringCount && *fret >= 0 && *fret <= maxFret) {
      if (positionToMidi(*string, *fret, state_.tuning, state_.capo) == midi) {
        e.string = string;
        e.fret = fret;
        return true;
      }
      int recomputed = midi - openMidi(*string) - state_.tuning[static_cast<std::size_t>(*string - 1)] - state_.capo;
      report_.warn(bar, "pitch " + midiName(midi) + " does not match (" + std::to_string(*string) + "," +
                            std::to_string(*fret) + "); fret recomputed from pitch");
      if (recomputed >= 0 && recomputed <= maxFret) {
        e.string = string;
        e.fret = recomputed;
        return true;
      }
    } else if (string || fret) {
      report_.warn(bar, "invalid string/fret for " + midiName(midi) + "; position recomputed from pitch");
    } else {
      report_.warn(bar, "no string/fret for " + midiName(midi) + "; position derived from pitch");
    }
    try {
      auto positions = midiToPositions(midi, state_.tuning, state_.capo, options_.maxFret);
      auto best = std::min_element(positions.begin(), positions.end(),
                                   [](const Position& a, const Position& b) { return a.fret < b.fret; });
      e.string = best->string;
      e.fret = best->fret;
      return true;
    } catch (const NotPlayable&) {
      ++report_.droppedNodes;
      report_.warn(bar, "pitched note " + midiName(midi) + " dropped: not playable under the tuning");
      return false;
    }
  }

  std::vector<Cluster> groupByVoice(std::vector<NoteEvent> events, int bar) {
    std::map<std::tuple<Rational, int, int>, Cluster> groups;
    for (auto& e : events) {
      auto& cluster = groups[{e.onset, e.voice, e.track}];
      cluster.onset = e.onset;
      if (!e.isRest()) {
        auto clash = std::find_if(cluster.events.begin(), cluster.events.end(),
                                  [&](const NoteEvent& o) { return !o.isRest() && o.string == e.string; });
        if (clash != cluster.events.end()) {
          ++report_.droppedNodes;
          report_.warn(bar, "voice " + std::to_string(e.voice) + " stacks two notes on string " +
                                std::to_string(*e.string) + "; dropped " + midiName(e.midi()));
          continue;
        }
      }
      cluster.events.push_back(std::move(e));
    }
    std::vector<Cluster> clusters;
    for (auto& [key, cluster] : groups) {
      sortCluster(cluster);
      clusters.push_back(std::move(cluster));
    }
    return clusters;
  }

  // Links each slide start to the next note of the same voice on the same
  // string that carries a slide stop, recording the far fret on both ends.
  static void resolveSlides(std::vector<Measure>& measures) {
    std::map<std::pair<int, int>, TechniqueTag*> pending;  // (voice, string) -> slideOut tag
    std::map<std::pair<int, int>, int> pendingFret;
    for (auto& m : measures) {
      for (auto& c : m.clusters) {
        for (auto& e : c.events) {
          if (e.isRest()) continue;
          std::pair<int, int> key{e.voice, *e.string};
          auto it = pending.find(key);
          if (it != pending.end()) {
            for (auto& t : e.techniques) {
              if (t.kind == TechniqueKind::slideIn && !t.detail) {
                t.detail = pendingFret[key];
                it->second->detail = *e.fret;
              }
            }
            pending.erase(it);
          }
          for (auto& t : e.techniques) {
            if (t.kind == TechniqueKind::slideOut) {
              pending[key] = &t;
              pendingFret[key] = *e.fret;
            }
          }
        }
      }
    }
  }

  const ParseOptions& options_;
  ParseReport& report_;
  int track_;
  PartState state_;
};

std::string metadataTitle(const XmlElement& root) {
  if (auto t = root.textAt("work/work-title")) return *t;
  if (auto t = root.textAt("movement-title")) return *t;
  return {};
}

std::string metadataArtist(const XmlElement& root) {
  const XmlElement* ident = root.child("identification");
  if (!ident) return {};
  auto creators = ident->childrenNamed("creator");
  for (const char* type : {"artist", "composer"}) {
    for (const XmlElement* c : creators) {
      if (c->attribute("type") == type) return c->text;
    }
  }
  return creators.empty() ? std::string{} : creators.front()->text;
}

}  // namespace

ParsedScore parseScore(std::string_view document, const ParseOptions& options) {
  XmlElement root = parseXml(document);
  if (root.name == "score-timewise") throw StructuralError("score-timewise documents are not supported");
  if (root.name != "score-partwise") throw StructuralError("root element is <" + root.name + ">, not <score-partwise>");
  if (options.maxFret < 12 || options.maxFret > kMaxFret) throw RangeError("maxFret outside [12, 24]");

  ParsedScore out;
  out.score.title = metadataTitle(root);
  out.score.artist = metadataArtist(root);

  auto parts = root.childrenNamed("part");
  if (parts.empty()) throw StructuralError("score has no <part>");
  std::vector<const XmlElement*> selected;
  for (const XmlElement* p : parts) {
    if (hasTablature(*p)) selected.push_back(p);
  }
  if (selected.empty()) {
    out.report.warn(0, "no tablature staff found; using the first part");
    selected.push_back(parts.front());
  }
  if (!options.mergeTracks) selected.resize(1);

  PartResult first = PartReader(options, out.report, 0).read(*selected.front());
  out.score.tuning = first.tuning;
  out.score.capo = first.capo;
  out.score.measures = std::move(first.measures);

  for (std::size_t t = 1; t < selected.size(); ++t) {
    PartResult extra = PartReader(options, out.report, static_cast<int>(t)).read(*selected[t]);
    std::string id = selected[t]->attribute("id").value_or("?");
    if (extra.tuning != out.score.tuning || extra.capo != out.score.capo) {
      out.report.warn(0, "part " + id + " has a different tuning or capo; not merged");
      continue;
    }
    if (extra.measures.size() != out.score.measures.size()) {
      out.report.warn(0, "part " + id + " has a different bar count; extra bars ignored");
    }
    std::size_t n = std::min(extra.measures.size(), out.score.measures.size());
    for (std::size_t i = 0; i < n; ++i) {
      auto& dst = out.score.measures[i].clusters;
      auto& src = extra.measures[i].clusters;
      dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
      std::stable_sort(dst.begin(), dst.end(), [](const Cluster& a, const Cluster& b) { return a.onset < b.onset; });
    }
  }
  return out;
}

ParsedScore readScoreFile(const std::filesystem::path& path, const ParseOptions& options) {
  return parseScore(loadMusicXmlDocument(path), options);
}

std::vector<RawVoiceStream> voiceStreams(const Measure& measure) {
  std::map<std::pair<int, int>, RawVoiceStream> streams;
  for (const auto& c : measure.clusters) {
    for (const auto& e : c.events) {
      auto& s = streams[{e.track, e.voice}];
      s.track = e.track;
      s.voice = e.voice;
      s.events.push_back(e);
    }
  }
  std::vector<RawVoiceStream> out;
  for (auto& [key, s] : streams) {
    std::stable_sort(s.events.begin(), s.events.end(),
                     [](const NoteEvent& a, const NoteEvent& b) { return a.onset < b.onset; });
    out.push_back(std::move(s));
  }
  return out;
}

Score mergeVoices(const Score& score, ParseReport* report) {
  Score out = score;
  for (auto& m : out.measures) {
    std::map<Rational, Cluster> byOnset;
    for (auto& c : m.clusters) {
      for (auto& e : c.events) {
        auto& target = byOnset[e.onset];
        target.onset = e.onset;
        target.events.push_back(std::move(e));
      }
    }
    m.clusters.clear();
    for (auto& [onset, cluster] : byOnset) {
      // Higher voice wins a string clash; walk voices from the top.
      std::stable_sort(cluster.events.begin(), cluster.events.end(), [](const NoteEvent& a, const NoteEvent& b) {
        return std::tie(a.voice, a.track) > std::tie(b.voice, b.track);
      });
      std::vector<NoteEvent> kept;
      std::set<int> used;
      for (auto& e : cluster.events) {
        if (!e.isRest() && !used.insert(*e.string).second) {
          if (report) {
            ++report->droppedNodes;
            report->warn(m.index, "voice " + std::to_string(e.voice) + " note " + midiName(e.midi()) +
                                      " on string " + std::to_string(*e.string) + " at " + toString(onset) +
                                      " clashes with a higher voice; dropped");
          }
          continue;
        }
        kept.push_back(std::move(e));
      }
      cluster.events = std::move(kept);
      sortCluster(cluster);
      m.clusters.push_back(std::move(cluster));
    }
  }
  out.voicesMerged = true;
  return out;
}

Score cleanTies(const Score& score, ParseReport* report) {
  Score out = score;
  auto warn = [&](int bar, const std::string& msg) {
    if (report) report->warn(bar, msg);
  };

  struct Ref {
    std::size_t m, c, e;
  };
  struct Chain {
    Ref head;
    Rational end;
  };
  std::map<std::pair<int, int>, Chain> open;  // (string, midi)
  std::vector<std::vector<std::vector<bool>>> removed(out.measures.size());

  auto headOf = [&](const Chain& chain) -> NoteEvent& {
    return out.measures[chain.head.m].clusters[chain.head.c].events[chain.head.e];
  };
  auto closeUnfinished = [&](const Chain& chain) {
    NoteEvent& head = headOf(chain);
    warn(out.measures[chain.head.m].index, "tie from " + midiName(head.midi()) + " never closed; treated as plain note");
    head.tieStart = false;
  };

  Rational measureStart = 0;
  for (std::size_t mi = 0; mi < out.measures.size(); ++mi) {
    auto& m = out.measures[mi];
    removed[mi].resize(m.clusters.size());
    for (std::size_t ci = 0; ci < m.clusters.size(); ++ci) {
      auto& c = m.clusters[ci];
      removed[mi][ci].assign(c.events.size(), false);
      for (std::size_t ei = 0; ei < c.events.size(); ++ei) {
        auto& e = c.events[ei];
        if (e.isRest()) {
          e.tieStart = e.tieStop = false;
          continue;
        }
        Rational at = measureStart + e.onset;
        std::pair<int, int> key{*e.string, e.midi()};
        auto it = open.find(key);
        if (e.tieStop) {
          if (it != open.end() && it->second.end == at) {
            NoteEvent& head = headOf(it->second);
            head.duration += e.duration;
            it->second.end += e.duration;
            removed[mi][ci][ei] = true;
            if (!e.tieStart) {
              head.tieStart = false;
              open.erase(it);
            }
            continue;
          }
          warn(m.index, "tie into " + midiName(e.midi()) + " at " + toString(e.onset) + " has no open tie; cleared");
          e.tieStop = false;
        }
        // A fresh attack of the same pitch on the same string closes any open chain.
        if (it != open.end()) {
          closeUnfinished(it->second);
          open.erase(it);
        }
        if (e.tieStart) open[key] = Chain{Ref{mi, ci, ei}, at + e.duration};
      }
    }
    measureStart += measureLength(m);
  }
  for (auto& [key, chain] : open) closeUnfinished(chain);

  for (std::size_t mi = 0; mi < out.measures.size(); ++mi) {
    auto& clusters = out.measures[mi].clusters;
    std::vector<Cluster> kept;
    for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
      Cluster c;
      c.onset = clusters[ci].onset;
      for (std::size_t ei = 0; ei < clusters[ci].events.size(); ++ei) {
        if (!removed[mi][ci][ei]) c.events.push_back(std::move(clusters[ci].events[ei]));
      }
      for (auto& e : c.events) e.tieStop = false;
      if (!c.events.empty()) kept.push_back(std::move(c));
    }
    clusters = std::move(kept);
  }
  return out;
}

Score normalizeScore(const Score& score, ParseReport* report) {
  return cleanTies(mergeVoices(score, report), report);
}

Score normalizeCapo(const Score& score) {
  Score out = score;
  if (out.capo == 0) return out;
  for (auto& m : out.measures) {
    for (auto& c : m.clusters) {
      for (auto& e : c.events) {
        if (!e.isRest()) e.pitch = transposePitch(*e.pitch, -score.capo);
      }
    }
  }
  out.capo = 0;
  return out;
}

Score sliceClip(const Score& score, const ClipAnnotation& annotation, ParseReport* report) {
  validate(annotation);
  if (annotation.endBar > static_cast<int>(score.measures.size())) {
    throw RangeError("bar range " + std::to_string(annotation.startBar) + "-" + std::to_string(annotation.endBar) +
                     " exceeds the score's " + std::to_string(score.measures.size()) + " bars");
  }
  auto warn = [&](int bar, const std::string& msg) {
    if (report) report->warn(bar, msg);
  };

  Score clip;
  clip.title = score.title;
  clip.artist = score.artist;
  clip.tuning = score.tuning;
  clip.capo = score.capo;
  clip.voicesMerged = score.voicesMerged;
  clip.annotation = annotation;

  std::vector<Rational> starts{0};
  for (int i = 1; i < annotation.startBar; ++i) {
    starts.push_back(starts.back() + measureLength(score.measures[static_cast<std::size_t>(i - 1)]));
  }
  const Rational clipStart = starts.back();
  for (int i = 1; i < annotation.startBar; ++i) {
    for (const auto& c : score.measures[static_cast<std::size_t>(i - 1)].clusters) {
      for (const auto& e : c.events) {
        if (!e.isRest() && starts[static_cast<std::size_t>(i - 1)] + e.onset + e.duration > clipStart) {
          warn(1, "note " + midiName(e.midi()) + " sustained from before the clip is cut");
        }
      }
    }
  }
  Rational clipLength = 0;
  for (int i = annotation.startBar; i <= annotation.endBar; ++i) {
    clipLength += measureLength(score.measures[static_cast<std::size_t>(i - 1)]);
  }

  Rational offset = 0;
  int first = annotation.startBar;
  int last = annotation.endBar;
  for (int i = first; i <= last; ++i) {
    Measure m = score.measures[static_cast<std::size_t>(i - 1)];
    m.index = i - first + 1;
    for (auto& c : m.clusters) {
      for (auto& e : c.events) {
        if (e.isRest()) continue;
        if (i == first && e.tieStop) {
          e.tieStop = false;
          warn(m.index, "tie into " + midiName(e.midi()) + " crosses the clip start; cut");
        }
        if (i == last && e.tieStart) {
          e.tieStart = false;
          warn(m.index, "tie from " + midiName(e.midi()) + " crosses the clip end; cut");
        }
        Rational end = offset + e.onset + e.duration;
        if (end > clipLength) {
          e.duration -= end - clipLength;
          warn(m.index, "note " + midiName(e.midi()) + " sustained past the clip end; cut");
        }
      }
    }
    offset += measureLength(m);
    clip.measures.push_back(std::move(m));
  }
  return normalizeCapo(clip);
}

std::vector<ClipAnnotation> parseAnnotationCsv(std::string_view csv) {
  std::vector<ClipAnnotation> out;
  std::istringstream in{std::string(csv)};
  std::string line;
  int lineNo = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (header) {
      header = false;
      if (fields != std::vector<std::string>{"sourceId", "structure", "startBar", "endBar"}) {
        throw Error("annotation CSV: expected header sourceId,structure,startBar,endBar");
      }
      continue;
    }
    if (fields.size() != 4) throw Error("annotation CSV line " + std::to_string(lineNo) + ": expected 4 fields");
    auto structure = structureFromString(fields[1]);
    if (!structure) throw Error("annotation CSV line " + std::to_string(lineNo) + ": unknown structure '" + fields[1] + "'");
    ClipAnnotation a;
    a.sourceId = fields[0];
    a.structure = *structure;
    a.startBar = toInt(fields[2], "startBar", 0);
    a.endBar = toInt(fields[3], "endBar", 0);
    validate(a);
    out.push_back(std::move(a));
  }
  return out;
}

std::string annotationCsv(const std::vector<ClipAnnotation>& annotations) {
  std::string out = "sourceId,structure,startBar,endBar\n";
  for (const auto& a : annotations) {
    out += a.sourceId + "," + std::string(toString(a.structure)) + "," + std::to_string(a.startBar) + "," +
           std::to_string(a.endBar) + "\n";
  }
  return out;
}

}  // namespace tabproc
