#include "tabproc/xml_tree.h"

#include <expat.h>

#include <memory>

#include "tabproc/error.h"

namespace tabproc {

std::optional<std::string> XmlElement::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return v;
  }
  return std::nullopt;
}

const XmlElement* XmlElement::child(std::string_view childName) const {
  for (const auto& c : children) {
    if (c.name == childName) return &c;
  }
  return nullptr;
}

std::vector<const XmlElement*> XmlElement::childrenNamed(std::string_view childName) const {
  std::vector<const XmlElement*> out;
  for (const auto& c : children) {
    if (c.name == childName) out.push_back(&c);
  }
  return out;
}

const XmlElement* XmlElement::find(std::string_view path) const {
  const XmlElement* node = this;
  while (node && !path.empty()) {
    auto slash = path.find('/');
    auto head = path.substr(0, slash);
    node = node->child(head);
    path = slash == std::string_view::npos ? std::string_view{} : path.substr(slash + 1);
  }
  return node;
}

std::optional<std::string> XmlElement::textAt(std::string_view path) const {
  const XmlElement* node = find(path);
  if (!node) return std::nullopt;
  return node->text;
}

namespace {

struct BuildState {
  XML_Parser parser = nullptr;
  std::vector<XmlElement> stack;
  std::optional<XmlElement> root;
};

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

void XMLCALL onStart(void* data, const XML_Char* name, const XML_Char** attrs) {
  auto* state = static_cast<BuildState*>(data);
  XmlElement element;
  element.name = name;
  element.line = static_cast<int>(XML_GetCurrentLineNumber(state->parser));
  for (int i = 0; attrs[i]; i += 2) element.attributes.emplace_back(attrs[i], attrs[i + 1]);
  state->stack.push_back(std::move(element));
}

void XMLCALL onEnd(void* data, const XML_Char* /*name*/) {
  auto* state = static_cast<BuildState*>(data);
  XmlElement element = std::move(state->stack.back());
  state->stack.pop_back();
  element.text = trim(element.text);
  if (state->stack.empty()) {
    state->root = std::move(element);
  } else {
    state->stack.back().children.push_back(std::move(element));
  }
}

void XMLCALL onText(void* data, const XML_Char* s, int len) {
  auto* state = static_cast<BuildState*>(data);
  if (!state->stack.empty()) state->stack.back().text.append(s, static_cast<std::size_t>(len));
}

}  // namespace

XmlElement parseXml(std::string_view document) {
  std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"),
                                                                       &XML_ParserFree);
  if (!parser) throw Error("cannot allocate XML parser");
  BuildState state;
  state.parser = parser.get();
  XML_SetUserData(parser.get(), &state);
  XML_SetElementHandler(parser.get(), onStart, onEnd);
  XML_SetCharacterDataHandler(parser.get(), onText);
  if (XML_Parse(parser.get(), document.data(), static_cast<int>(document.size()), XML_TRUE) ==
      XML_STATUS_ERROR) {
    throw ParseError(XML_ErrorString(XML_GetErrorCode(parser.get())),
                     static_cast<int>(XML_GetCurrentLineNumber(parser.get())));
  }
  if (!state.root) throw ParseError("document has no root element", 1);
  return std::move(*state.root);
}

}  // namespace tabproc
