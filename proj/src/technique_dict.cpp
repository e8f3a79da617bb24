#include "tabproc/technique_dict.h"

#include <algorithm>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "tabproc/error.h"

namespace tabproc {

namespace {

using Json = nlohmann::json;

TechniqueRule rule(std::string path, TechniqueKind kind) { return TechniqueRule{std::move(path), {}, {}, kind}; }

TechniqueRule ruleWithAttribute(std::string path, std::string attr, std::string value, TechniqueKind kind) {
  return TechniqueRule{std::move(path), std::make_pair(std::move(attr), std::move(value)), {}, kind};
}

TechniqueRule ruleWithText(std::string path, std::string text, TechniqueKind kind) {
  return TechniqueRule{std::move(path), {}, std::move(text), kind};
}

void collect(const XmlElement& node, std::string_view path, std::vector<const XmlElement*>& out) {
  if (path.empty()) {
    out.push_back(&node);
    return;
  }
  auto slash = path.find('/');
  auto head = path.substr(0, slash);
  auto rest = slash == std::string_view::npos ? std::string_view{} : path.substr(slash + 1);
  for (const auto& c : node.children) {
    if (c.name == head) collect(c, rest, out);
  }
}

}  // namespace

TechniqueDictionary TechniqueDictionary::defaults() {
  using K = TechniqueKind;
  return TechniqueDictionary({
      ruleWithAttribute("notations/technical/hammer-on", "type", "start", K::hammerOn),
      ruleWithAttribute("notations/technical/pull-off", "type", "start", K::pullOff),
      rule("notations/technical/harmonic/natural", K::naturalHarmonic),
      rule("notations/technical/harmonic/artificial", K::artificialHarmonic),
      ruleWithAttribute("notations/slide", "type", "start", K::slideOut),
      ruleWithAttribute("notations/slide", "type", "stop", K::slideIn),
      ruleWithAttribute("notations/glissando", "type", "start", K::slideOut),
      ruleWithAttribute("notations/glissando", "type", "stop", K::slideIn),
      ruleWithText("notehead", "x", K::mute),
      rule("play/mute", K::mute),
      ruleWithText("notations/technical/other-technical", "let ring", K::letRing),
      ruleWithText("time-modification/actual-notes", "3", K::triplet),
      rule("rest", K::rest),
  });
}

TechniqueDictionary TechniqueDictionary::fromJson(std::string_view json) {
  Json doc;
  try {
    doc = Json::parse(json);
  } catch (const Json::parse_error& e) {
    throw Error(std::string("technique dictionary: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("rules") || !doc["rules"].is_array()) {
    throw Error("technique dictionary: expected an object with a \"rules\" array");
  }
  std::vector<TechniqueRule> rules;
  for (const auto& entry : doc["rules"]) {
    if (!entry.is_object() || !entry.contains("path") || !entry.contains("kind")) {
      throw Error("technique dictionary: every rule needs \"path\" and \"kind\"");
    }
    TechniqueRule r;
    r.path = entry["path"].get<std::string>();
    auto kindName = entry["kind"].get<std::string>();
    auto kind = techniqueFromString(kindName);
    if (!kind || *kind == TechniqueKind::chordEvent) {
      throw Error("technique dictionary: unknown kind '" + kindName + "'");
    }
    r.kind = *kind;
    if (entry.contains("attribute")) {
      const auto& attr = entry["attribute"];
      if (!attr.is_object() || attr.size() != 1) {
        throw Error("technique dictionary: \"attribute\" must hold exactly one name/value pair");
      }
      r.attribute = std::make_pair(attr.begin().key(), attr.begin().value().get<std::string>());
    }
    if (entry.contains("text")) r.text = entry["text"].get<std::string>();
    rules.push_back(std::move(r));
  }
  return TechniqueDictionary(std::move(rules));
}

TechniqueDictionary TechniqueDictionary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(path.string() + ": no such file");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fromJson(text);
}

std::string TechniqueDictionary::toJson() const {
  Json rules = Json::array();
  for (const auto& r : rules_) {
    Json entry;
    entry["path"] = r.path;
    entry["kind"] = std::string(toString(r.kind));
    if (r.attribute) entry["attribute"] = Json{{r.attribute->first, r.attribute->second}};
    if (r.text) entry["text"] = *r.text;
    rules.push_back(std::move(entry));
  }
  return Json{{"rules", rules}}.dump(2) + "\n";
}

std::vector<TechniqueKind> TechniqueDictionary::match(const XmlElement& note) const {
  std::vector<TechniqueKind> kinds;
  std::vector<const XmlElement*> hits;
  for (const auto& r : rules_) {
    hits.clear();
    collect(note, r.path, hits);
    bool fired = std::any_of(hits.begin(), hits.end(), [&](const XmlElement* e) {
      if (r.attribute && e->attribute(r.attribute->first) != r.attribute->second) return false;
      if (r.text && e->text != *r.text) return false;
      return true;
    });
    if (fired && std::find(kinds.begin(), kinds.end(), r.kind) == kinds.end()) kinds.push_back(r.kind);
  }
  return kinds;
}

}  // namespace tabproc
