#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace geollm::xml {

struct Node {
  std::string name;  // qualified name as written, e.g. "diggs_geo:trialNo"
  std::string namespace_uri;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Node> children;
  std::string text;  // concatenated character data directly inside this element
  std::size_t line = 0;
  std::size_t column = 0;

  std::string_view local_name() const;
  std::string_view prefix() const;
  const std::string* attribute(std::string_view qualified) const;
  // First child with the given local name, or nullptr.
  const Node* child(std::string_view local) const;
};

// Parses a well-formed document into its root element. Supports the XML
// declaration, processing instructions, comments, a DOCTYPE without internal
// subset, CDATA, the predefined and numeric character references, and
// namespace prefix resolution (undeclared prefixes are errors). Throws
// ParseError with the 1-based line and column of the problem.
Node parse(std::string_view document);

std::string escape(std::string_view text);

}  // namespace geollm::xml
