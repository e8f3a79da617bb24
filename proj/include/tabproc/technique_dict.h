// Data-driven mapping from MusicXML <note> sub-elements to technique tags.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tabproc/model.h"
#include "tabproc/xml_tree.h"

namespace tabproc {

/// One dictionary entry. `path` is relative to <note>; the rule fires when
/// any element at that path satisfies the optional attribute and text tests.
struct TechniqueRule {
  std::string path;
  std::optional<std::pair<std::string, std::string>> attribute;
  std::optional<std::string> text;
  TechniqueKind kind = TechniqueKind::mute;

  friend bool operator==(const TechniqueRule&, const TechniqueRule&) = default;
};

class TechniqueDictionary {
 public:
  TechniqueDictionary() = default;
  explicit TechniqueDictionary(std::vector<TechniqueRule> rules) : rules_(std::move(rules)) {}

  /// The GuitarPro 7 export dialect (also shipped as data/technique_dict.json).
  static TechniqueDictionary defaults();

  /// Schema: {"rules": [{"path": str, "kind": str, "attribute"?: {name: value},
  /// "text"?: str}, ...]}. Throws Error on schema violations.
  static TechniqueDictionary fromJson(std::string_view json);
  static TechniqueDictionary load(const std::filesystem::path& path);

  std::string toJson() const;

  /// Kinds fired by a <note> element, in rule order, without duplicates.
  std::vector<TechniqueKind> match(const XmlElement& note) const;

  const std::vector<TechniqueRule>& rules() const { return rules_; }

 private:
  std::vector<TechniqueRule> rules_;
};

}  // namespace tabproc
