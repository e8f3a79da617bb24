// Minimal read-only element tree built on expat.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tabproc {

struct XmlElement {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::string text;  // character data directly inside this element, trimmed
  std::vector<XmlElement> children;
  int line = 0;

  std::optional<std::string> attribute(std::string_view key) const;

  /// First direct child with the given name, or nullptr.
  const XmlElement* child(std::string_view childName) const;

  /// All direct children with the given name, in document order.
  std::vector<const XmlElement*> childrenNamed(std::string_view childName) const;

  /// First element reached by a '/'-separated path of child names.
  const XmlElement* find(std::string_view path) const;

  /// Text of the element at `path`, or nullopt when absent.
  std::optional<std::string> textAt(std::string_view path) const;
};

/// Parses a complete XML document and returns its root element. Throws
/// ParseError carrying the line of the first syntax error.
XmlElement parseXml(std::string_view document);

}  // namespace tabproc
