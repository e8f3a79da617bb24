#include "tabproc/score_json.h"

#include "tabproc/error.h"

namespace tabproc {

namespace {

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(std::string("score JSON: missing \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw Error(std::string("score JSON: bad type for \"") + key + "\"");
  }
}

Json toJson(const TechniqueTag& t) {
  Json j{{"kind", std::string(toString(t.kind))}};
  if (t.detail) j["detail"] = *t.detail;
  return j;
}

TechniqueTag techniqueFromJson(const Json& j) {
  auto name = field<std::string>(j, "kind");
  auto kind = techniqueFromString(name);
  if (!kind) throw Error("score JSON: unknown technique '" + name + "'");
  TechniqueTag t{*kind, std::nullopt};
  if (j.contains("detail")) t.detail = field<int>(j, "detail");
  return t;
}

Json toJson(const NoteEvent& e) {
  Json j;
  j["onset"] = toString(e.onset);
  j["duration"] = toString(e.duration);
  j["pitch"] = e.pitch ? toJson(*e.pitch) : Json(nullptr);
  j["string"] = e.string ? Json(*e.string) : Json(nullptr);
  j["fret"] = e.fret ? Json(*e.fret) : Json(nullptr);
  j["voice"] = e.voice;
  j["track"] = e.track;
  j["tieStart"] = e.tieStart;
  j["tieStop"] = e.tieStop;
  Json techniques = Json::array();
  for (const auto& t : e.techniques) techniques.push_back(toJson(t));
  j["techniques"] = std::move(techniques);
  return j;
}

NoteEvent eventFromJson(const Json& j) {
  NoteEvent e;
  e.onset = parseRational(field<std::string>(j, "onset"));
  e.duration = parseRational(field<std::string>(j, "duration"));
  if (!j.at("pitch").is_null()) e.pitch = pitchFromJson(j.at("pitch"));
  if (!j.at("string").is_null()) e.string = field<int>(j, "string");
  if (!j.at("fret").is_null()) e.fret = field<int>(j, "fret");
  e.voice = field<int>(j, "voice");
  e.track = field<int>(j, "track");
  e.tieStart = field<bool>(j, "tieStart");
  e.tieStop = field<bool>(j, "tieStop");
  for (const auto& t : j.at("techniques")) e.techniques.push_back(techniqueFromJson(t));
  return e;
}

}  // namespace

Json toJson(const PitchSpec& p) {
  return Json{{"step", std::string(1, p.step)}, {"alter", p.alter}, {"octave", p.octave}};
}

PitchSpec pitchFromJson(const Json& j) {
  auto step = field<std::string>(j, "step");
  if (step.size() != 1) throw Error("score JSON: bad step '" + step + "'");
  PitchSpec p{step[0], field<int>(j, "alter"), field<int>(j, "octave")};
  midiOf(p);
  return p;
}

Json toJson(const ClipAnnotation& a) {
  return Json{{"structure", std::string(toString(a.structure))},
              {"startBar", a.startBar},
              {"endBar", a.endBar},
              {"sourceId", a.sourceId}};
}

ClipAnnotation annotationFromJson(const Json& j) {
  auto name = field<std::string>(j, "structure");
  auto structure = structureFromString(name);
  if (!structure) throw Error("unknown structure label '" + name + "'");
  ClipAnnotation a{*structure, field<int>(j, "startBar"), field<int>(j, "endBar"), field<std::string>(j, "sourceId")};
  validate(a);
  return a;
}

Json toJson(const Score& score) {
  Json j;
  j["title"] = score.title;
  j["artist"] = score.artist;
  j["tuning"] = score.tuning;
  j["capo"] = score.capo;
  j["voicesMerged"] = score.voicesMerged;
  j["annotation"] = score.annotation ? toJson(*score.annotation) : Json(nullptr);
  Json measures = Json::array();
  for (const auto& m : score.measures) {
    Json jm;
    jm["index"] = m.index;
    jm["divisions"] = m.divisions;
    jm["time"] = {m.time.numerator, m.time.denominator};
    Json clusters = Json::array();
    for (const auto& c : m.clusters) {
      Json events = Json::array();
      for (const auto& e : c.events) events.push_back(toJson(e));
      clusters.push_back(Json{{"onset", toString(c.onset)}, {"events", std::move(events)}});
    }
    jm["clusters"] = std::move(clusters);
    measures.push_back(std::move(jm));
  }
  j["measures"] = std::move(measures);
  return j;
}

Score scoreFromJson(const Json& j) {
  Score s;
  s.title = field<std::string>(j, "title");
  s.artist = field<std::string>(j, "artist");
  auto tuning = field<std::vector<int>>(j, "tuning");
  if (tuning.size() != kStringCount) throw Error("score JSON: tuning must have 6 entries");
  std::copy(tuning.begin(), tuning.end(), s.tuning.begin());
  s.capo = field<int>(j, "capo");
  s.voicesMerged = field<bool>(j, "voicesMerged");
  if (j.contains("annotation") && !j.at("annotation").is_null()) s.annotation = annotationFromJson(j.at("annotation"));
  for (const auto& jm : field<Json>(j, "measures")) {
    Measure m;
    m.index = field<int>(jm, "index");
    m.divisions = field<int>(jm, "divisions");
    auto time = field<std::vector<int>>(jm, "time");
    if (time.size() != 2) throw Error("score JSON: time must be [numerator, denominator]");
    m.time = {time[0], time[1]};
    for (const auto& jc : field<Json>(jm, "clusters")) {
      Cluster c;
      c.onset = parseRational(field<std::string>(jc, "onset"));
      for (const auto& je : field<Json>(jc, "events")) c.events.push_back(eventFromJson(je));
      m.clusters.push_back(std::move(c));
    }
    s.measures.push_back(std::move(m));
  }
  return s;
}

Json toJson(const ParseReport& report) {
  Json warnings = Json::array();
  for (const auto& w : report.warnings) warnings.push_back(Json{{"bar", w.bar}, {"message", w.message}});
  return Json{{"warnings", std::move(warnings)}, {"droppedNodes", report.droppedNodes}};
}

std::string dumpCanonical(const Json& j) { return j.dump(2) + "\n"; }

std::string serializeScore(const Score& score) { return dumpCanonical(toJson(score)); }

Score parseScoreJson(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(std::string("score JSON: ") + e.what());
  }
  try {
    return scoreFromJson(j);
  } catch (const Json::exception& e) {
    throw Error(std::string("score JSON: ") + e.what());
  }
}

}  // namespace tabproc
