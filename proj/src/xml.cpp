#include "geollm/xml.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include <fmt/format.h>

#include "geollm/error.hpp"
#include "geollm/text_util.hpp"

namespace geollm::xml {

std::string_view Node::local_name() const {
  const auto colon = name.find(':');
  return colon == std::string::npos ? std::string_view(name) : std::string_view(name).substr(colon + 1);
}

std::string_view Node::prefix() const {
  const auto colon = name.find(':');
  return colon == std::string::npos ? std::string_view{} : std::string_view(name).substr(0, colon);
}

const std::string* Node::attribute(std::string_view qualified) const {
  for (const auto& [k, v] : attributes) {
    if (k == qualified) return &v;
  }
  return nullptr;
}

const Node* Node::child(std::string_view local) const {
  for (const auto& c : children) {
    if (c.local_name() == local) return &c;
  }
  return nullptr;
}

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace {

using Scope = std::map<std::string, std::string, std::less<>>;

class Parser {
 public:
  explicit Parser(std::string_view doc) : doc_(doc) {}

  Node parse_document() {
    skip_bom();
    skip_misc(true);
    if (eof() || peek() != '<') fail("expected a root element");
    Scope scope{{"xml", "http://www.w3.org/XML/1998/namespace"}};
    Node root = parse_element(scope);
    skip_misc(false);
    if (!eof()) fail("content after the root element");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError("malformed XML: " + message, line_, column_);
  }

  bool eof() const { return pos_ >= doc_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < doc_.size() ? doc_[pos_ + ahead] : '\0';
  }
  bool looking_at(std::string_view s) const { return doc_.substr(pos_, s.size()) == s; }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < doc_.size(); ++i) {
      if (doc_[pos_] == '\n') {
        ++line_;
        column_ = 1;
      } else if ((static_cast<unsigned char>(doc_[pos_]) & 0xC0) != 0x80) {
        ++column_;
      }
      ++pos_;
    }
  }

  void expect(std::string_view s) {
    if (!looking_at(s)) fail(fmt::format("expected '{}'", s));
    advance(s.size());
  }

  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
  static bool is_name_start(char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalpha(u) || c == '_' || c == ':' || u >= 0x80;
  }
  static bool is_name_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    return is_name_start(c) || std::isdigit(u) || c == '-' || c == '.';
  }

  void skip_space() {
    while (!eof() && is_space(peek())) advance();
  }

  void skip_bom() {
    if (looking_at("\xEF\xBB\xBF")) pos_ += 3;
  }

  // Whitespace, comments, PIs and (before the root) one DOCTYPE.
  void skip_misc(bool prolog) {
    bool first = true;
    while (true) {
      if (first && prolog && looking_at("<?xml") && is_space(peek(5))) {
        skip_until("?>", "XML declaration");
        first = false;
        continue;
      }
      first = false;
      skip_space();
      if (looking_at("<!--")) {
        skip_comment();
      } else if (looking_at("<?")) {
        skip_until("?>", "processing instruction");
      } else if (prolog && looking_at("<!DOCTYPE")) {
        skip_until(">", "DOCTYPE");
      } else {
        return;
      }
    }
  }

  void skip_until(std::string_view terminator, const char* what) {
    const auto end = doc_.find(terminator, pos_);
    if (end == std::string_view::npos) fail(fmt::format("unterminated {}", what));
    advance(end + terminator.size() - pos_);
  }

  void skip_comment() {
    advance(4);
    const auto end = doc_.find("--", pos_);
    if (end == std::string_view::npos) fail("unterminated comment");
    advance(end - pos_);
    if (!looking_at("-->")) fail("'--' inside comment");
    advance(3);
  }

  std::string parse_name() {
    if (eof() || !is_name_start(peek())) fail("expected a name");
    const std::size_t start = pos_;
    while (!eof() && is_name_char(peek())) advance();
    std::string name(doc_.substr(start, pos_ - start));
    if (name.front() == ':' || name.back() == ':' || std::count(name.begin(), name.end(), ':') > 1) {
      fail(fmt::format("invalid qualified name '{}'", name));
    }
    return name;
  }

  void append_reference(std::string& out) {
    const std::size_t line = line_;
    const std::size_t col = column_;
    const auto end = doc_.find(';', pos_);
    if (end == std::string_view::npos || end - pos_ > 12) {
      throw ParseError("malformed XML: unterminated entity reference", line, col);
    }
    const auto ref = doc_.substr(pos_ + 1, end - pos_ - 1);
    if (ref == "lt") {
      out += '<';
    } else if (ref == "gt") {
      out += '>';
    } else if (ref == "amp") {
      out += '&';
    } else if (ref == "quot") {
      out += '"';
    } else if (ref == "apos") {
      out += '\'';
    } else if (!ref.empty() && ref[0] == '#') {
      unsigned long cp = 0;
      try {
        cp = ref.size() > 1 && ref[1] == 'x' ? std::stoul(std::string(ref.substr(2)), nullptr, 16)
                                             : std::stoul(std::string(ref.substr(1)), nullptr, 10);
      } catch (const std::exception&) {
        throw ParseError("malformed XML: bad character reference", line, col);
      }
      if (cp == 0 || cp > 0x10FFFF) throw ParseError("malformed XML: bad character reference", line, col);
      append_utf8(out, static_cast<char32_t>(cp));
    } else {
      throw ParseError(fmt::format("malformed XML: unknown entity '&{};'", ref), line, col);
    }
    advance(end + 1 - pos_);
  }

  static void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }

  std::string parse_attribute_value() {
    const char quote = peek();
    if (quote != '"' && quote != '\'') fail("attribute value must be quoted");
    advance();
    std::string value;
    while (true) {
      if (eof()) fail("unterminated attribute value");
      const char c = peek();
      if (c == quote) break;
      if (c == '<') fail("'<' inside attribute value");
      if (c == '&') {
        append_reference(value);
      } else {
        value += c;
        advance();
      }
    }
    advance();
    return value;
  }

  std::string resolve(const Scope& scope, std::string_view qname, bool is_attribute) const {
    const auto colon = qname.find(':');
    if (colon == std::string_view::npos) {
      if (is_attribute) return {};
      auto it = scope.find("");
      return it == scope.end() ? std::string{} : it->second;
    }
    const auto prefix = qname.substr(0, colon);
    auto it = scope.find(prefix);
    if (it == scope.end()) {
      throw ParseError(fmt::format("malformed XML: undeclared namespace prefix '{}'", prefix),
                       line_, column_);
    }
    return it->second;
  }

  Node parse_element(const Scope& parent_scope) {
    Node node;
    node.line = line_;
    node.column = column_;
    expect("<");
    node.name = parse_name();
    while (true) {
      const bool had_space = !eof() && is_space(peek());
      skip_space();
      if (eof()) fail("unterminated start tag");
      if (peek() == '>' || looking_at("/>")) break;
      if (!had_space) fail("attributes must be separated by whitespace");
      auto key = parse_name();
      skip_space();
      expect("=");
      skip_space();
      auto value = parse_attribute_value();
      if (node.attribute(key)) fail(fmt::format("duplicate attribute '{}'", key));
      node.attributes.emplace_back(std::move(key), std::move(value));
    }
    Scope scope = parent_scope;
    for (const auto& [k, v] : node.attributes) {
      if (k == "xmlns") {
        scope[""] = v;
      } else if (starts_with(k, "xmlns:")) {
        if (v.empty()) fail(fmt::format("empty namespace binding for '{}'", k));
        scope[k.substr(6)] = v;
      }
    }
    node.namespace_uri = resolve(scope, node.name, false);
    for (const auto& [k, v] : node.attributes) {
      if (k != "xmlns" && !starts_with(k, "xmlns:")) resolve(scope, k, true);
    }
    if (looking_at("/>")) {
      advance(2);
      return node;
    }
    advance();  // '>'
    while (true) {
      if (eof()) fail(fmt::format("element '{}' is not closed", node.name));
      if (looking_at("</")) {
        advance(2);
        const auto close = parse_name();
        if (close != node.name) {
          fail(fmt::format("end tag '{}' does not match start tag '{}'", close, node.name));
        }
        skip_space();
        expect(">");
        return node;
      }
      if (looking_at("<!--")) {
        skip_comment();
      } else if (looking_at("<![CDATA[")) {
        advance(9);
        const auto end = doc_.find("]]>", pos_);
        if (end == std::string_view::npos) fail("unterminated CDATA section");
        node.text += doc_.substr(pos_, end - pos_);
        advance(end + 3 - pos_);
      } else if (looking_at("<?")) {
        skip_until("?>", "processing instruction");
      } else if (peek() == '<') {
        node.children.push_back(parse_element(scope));
      } else if (peek() == '&') {
        append_reference(node.text);
      } else {
        if (looking_at("]]>")) fail("']]>' in character data");
        node.text += peek();
        advance();
      }
    }
  }

  std::string_view doc_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

}  // namespace

Node parse(std::string_view document) { return Parser(document).parse_document(); }

}  // namespace geollm::xml
