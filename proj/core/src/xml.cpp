#include "xml.hpp"

#include <cctype>
#include <utility>

#include "cic/errors.hpp"

namespace cic::xml {

const Attribute* Element::find_attribute(std::string_view attr_name) const {
  for (const auto& a : attributes) {
    if (a.name == attr_name) return &a;
  }
  return nullptr;
}

const Element* Element::first_child(std::string_view child_name) const {
  for (const auto& c : children) {
    if (c->name == child_name) return c.get();
  }
  return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view child_name) const {
  std::vector<const Element*> out;
  for (const auto& c : children) {
    if (c->name == child_name) out.push_back(c.get());
  }
  return out;
}

namespace {

class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  bool starts_with(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

  char take() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  void take(std::size_t count) {
    for (std::size_t i = 0; i < count && !eof(); ++i) take();
  }

  void skip_whitespace() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) take();
  }

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, line_, column_); }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
}

bool is_name_char(char c) {
  return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.';
}

std::string scan_name(Scanner& s) {
  if (s.eof() || !is_name_start(s.peek())) s.fail("expected a name");
  std::string name;
  while (!s.eof() && is_name_char(s.peek())) name.push_back(s.take());
  return name;
}

std::string decode_entity(Scanner& s) {
  // s positioned right after '&'
  std::string entity;
  while (!s.eof() && s.peek() != ';') {
    entity.push_back(s.take());
    if (entity.size() > 8) s.fail("unterminated entity reference");
  }
  if (s.eof()) s.fail("unterminated entity reference");
  s.take();  // ';'
  if (entity == "amp") return "&";
  if (entity == "lt") return "<";
  if (entity == "gt") return ">";
  if (entity == "quot") return "\"";
  if (entity == "apos") return "'";
  s.fail("unknown entity '&" + entity + ";'");
}

std::string scan_attribute_value(Scanner& s) {
  if (s.eof() || (s.peek() != '"' && s.peek() != '\'')) s.fail("expected quoted attribute value");
  char quote = s.take();
  std::string value;
  while (true) {
    if (s.eof()) s.fail("unterminated attribute value");
    char c = s.peek();
    if (c == quote) {
      s.take();
      return value;
    }
    if (c == '<') s.fail("'<' not allowed in attribute value");
    if (c == '&') {
      s.take();
      value += decode_entity(s);
    } else {
      value.push_back(s.take());
    }
  }
}

void skip_comment(Scanner& s) {
  // s positioned at "<!--"
  s.take(4);
  while (!s.eof()) {
    if (s.starts_with("-->")) {
      s.take(3);
      return;
    }
    s.take();
  }
  s.fail("unterminated comment");
}

void skip_processing_instruction(Scanner& s) {
  // s positioned at "<?"
  s.take(2);
  while (!s.eof()) {
    if (s.starts_with("?>")) {
      s.take(2);
      return;
    }
    s.take();
  }
  s.fail("unterminated processing instruction");
}

// Parses one element whose '<' has already been consumed by the caller.
std::unique_ptr<Element> parse_element(Scanner& s, std::size_t start_line, std::size_t start_col) {
  auto elem = std::make_unique<Element>();
  elem->line = start_line;
  elem->column = start_col;
  elem->name = scan_name(s);

  while (true) {
    s.skip_whitespace();
    if (s.eof()) s.fail("unterminated start tag <" + elem->name + ">");
    if (s.peek() == '/') {
      s.take();
      if (s.eof() || s.peek() != '>') s.fail("expected '>' after '/'");
      s.take();
      return elem;  // self-closing
    }
    if (s.peek() == '>') {
      s.take();
      break;
    }
    Attribute attr;
    attr.line = s.line();
    attr.column = s.column();
    attr.name = scan_name(s);
    s.skip_whitespace();
    if (s.eof() || s.peek() != '=') s.fail("expected '=' after attribute '" + attr.name + "'");
    s.take();
    s.skip_whitespace();
    attr.value = scan_attribute_value(s);
    for (const auto& existing : elem->attributes) {
      if (existing.name == attr.name) {
        throw SyntaxError("duplicate attribute '" + attr.name + "' in <" + elem->name + ">",
                          attr.line, attr.column);
      }
    }
    elem->attributes.push_back(std::move(attr));
  }

  // Content until the matching end tag.
  while (true) {
    if (s.eof()) s.fail("missing end tag </" + elem->name + ">");
    if (s.peek() == '<') {
      std::size_t tag_line = s.line();
      std::size_t tag_col = s.column();
      if (s.starts_with("<!--")) {
        skip_comment(s);
        continue;
      }
      if (s.starts_with("<?")) {
        skip_processing_instruction(s);
        continue;
      }
      s.take();  // '<'
      if (!s.eof() && s.peek() == '/') {
        s.take();
        std::string closing = scan_name(s);
        if (closing != elem->name) {
          throw SyntaxError(
              "mismatched end tag </" + closing + ">, expected </" + elem->name + ">", tag_line,
              tag_col);
        }
        s.skip_whitespace();
        if (s.eof() || s.peek() != '>') s.fail("expected '>' in end tag");
        s.take();
        return elem;
      }
      elem->children.push_back(parse_element(s, tag_line, tag_col));
    } else if (s.peek() == '&') {
      s.take();
      elem->text += decode_entity(s);
    } else {
      elem->text.push_back(s.take());
    }
  }
}

}  // namespace

std::unique_ptr<Element> parse_document(std::string_view text) {
  Scanner s(text);
  std::unique_ptr<Element> root;
  while (true) {
    s.skip_whitespace();
    if (s.eof()) break;
    if (s.starts_with("<!--")) {
      skip_comment(s);
      continue;
    }
    if (s.starts_with("<?")) {
      skip_processing_instruction(s);
      continue;
    }
    if (s.peek() != '<') s.fail("expected markup, found character data at top level");
    std::size_t line = s.line();
    std::size_t col = s.column();
    s.take();
    if (root) {
      throw SyntaxError("multiple top-level elements", line, col);
    }
    root = parse_element(s, line, col);
  }
  if (!root) throw SyntaxError("document contains no element", s.line(), s.column());
  return root;
}

}  // namespace cic::xml
