#pragma once

// Minimal XML DOM for the URDF subset. Elements, attributes, comments and
// processing instructions only; text content is recorded but callers treat
// non-whitespace text as unknown content. Tracks 1-based line/column for
// every node so parse errors can point at the offending markup.

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace cic::xml {

struct Attribute {
  std::string name;
  std::string value;
  std::size_t line = 0;
  std::size_t column = 0;
};

struct Element {
  std::string name;
  std::vector<Attribute> attributes;
  std::vector<std::unique_ptr<Element>> children;
  std::string text;  // concatenated character data directly inside this element
  std::size_t line = 0;
  std::size_t column = 0;

  const Attribute* find_attribute(std::string_view attr_name) const;
  const Element* first_child(std::string_view child_name) const;
  std::vector<const Element*> children_named(std::string_view child_name) const;
};

/// Parses a complete document and returns its root element.
/// Throws cic::SyntaxError on malformed markup.
std::unique_ptr<Element> parse_document(std::string_view text);

}  // namespace cic::xml
