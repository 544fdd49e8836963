#include "geollm/diggs.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <optional>

#include <fmt/format.h>

#include "geollm/error.hpp"
#include "geollm/text_util.hpp"
#include "geollm/xml.hpp"

namespace geollm::diggs {

std::string emit_plastic_limit_xml(const PlasticLimitTrialSet& set, const Namespaces& ns) {
  if (set.trials.empty()) throw ValidationError("plastic limit trial set is empty");
  for (double v : set.trials) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError(fmt::format("water content must be finite and >= 0, got {}", v));
    }
  }
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += fmt::format("<diggs_geo:PlasticLimitTest xmlns:diggs_geo=\"{}\" xmlns:gml=\"{}\">\n",
                     xml::escape(ns.diggs_geo), xml::escape(ns.gml));
  const char* manual = set.is_manual ? "true" : "false";
  for (std::size_t i = 0; i < set.trials.size(); ++i) {
    const auto n = i + 1;
    out += "  <diggs_geo:plasticLimitTrial>\n";
    out += fmt::format("    <diggs_geo:PlasticLimitTrial gml:id=\"tr{}\">\n", n);
    out += fmt::format("      <diggs_geo:trialNo>{}</diggs_geo:trialNo>\n", n);
    out += fmt::format("      <diggs_geo:waterContent>{}</diggs_geo:waterContent>\n",
                       format_with_decimal(set.trials[i]));
    out += fmt::format("      <diggs_geo:isManual>{}</diggs_geo:isManual>\n", manual);
    out += "    </diggs_geo:PlasticLimitTrial>\n";
    out += "  </diggs_geo:plasticLimitTrial>\n";
  }
  out += "</diggs_geo:PlasticLimitTest>\n";
  return out;
}

namespace {

struct Found {
  const xml::Node* trial;
  const xml::Node* parent;
};

void collect(const xml::Node& node, const xml::Node* parent, std::vector<Found>& out) {
  if (node.local_name() == "PlasticLimitTrial") out.push_back({&node, parent});
  for (const auto& c : node.children) collect(c, &node, out);
}

std::string where(const xml::Node& n) {
  return fmt::format("line {}, column {}", n.line, n.column);
}

const std::string* gml_id(const xml::Node& n) {
  for (const auto& [k, v] : n.attributes) {
    if (k.size() > 3 && k.compare(k.size() - 3, 3, ":id") == 0) return &v;
  }
  return nullptr;
}

std::string child_text(const xml::Node& trial, std::string_view local) {
  const auto* c = trial.child(local);
  if (c == nullptr) {
    throw ConsistencyError(fmt::format("PlasticLimitTrial at {} lacks {}", where(trial), local));
  }
  return std::string(trim(c->text));
}

}  // namespace

PlasticLimitTrialSet parse_plastic_limit_xml(std::string_view document) {
  const auto root = xml::parse(document);
  std::vector<Found> found;
  collect(root, nullptr, found);
  if (found.empty()) throw ConsistencyError("document contains no PlasticLimitTrial elements");

  PlasticLimitTrialSet set;
  std::optional<bool> manual;
  for (const auto& [trial, parent] : found) {
    if (parent == nullptr || parent->local_name() != "plasticLimitTrial") {
      throw ConsistencyError(fmt::format(
          "PlasticLimitTrial at {} is not inside a plasticLimitTrial container", where(*trial)));
    }
    const auto* id = gml_id(*trial);
    if (id == nullptr) {
      throw ConsistencyError(fmt::format("PlasticLimitTrial at {} has no gml:id", where(*trial)));
    }
    const auto number_text = child_text(*trial, "trialNo");
    const auto number = parse_integer(number_text);
    if (!number || *number < 1) {
      throw ConsistencyError(
          fmt::format("trialNo '{}' at {} is not a positive integer", number_text, where(*trial)));
    }
    if (*id != fmt::format("tr{}", *number)) {
      throw ConsistencyError(fmt::format("gml:id '{}' does not match trialNo {} at {}", *id,
                                         *number, where(*trial)));
    }
    const auto wc_text = child_text(*trial, "waterContent");
    const auto wc = parse_double(wc_text);
    if (!wc || *wc < 0.0) {
      throw ConsistencyError(
          fmt::format("waterContent '{}' at {} is not a non-negative number", wc_text,
                      where(*trial)));
    }
    set.trials.push_back(*wc);
    if (trial->child("isManual") != nullptr) {
      const auto flag = to_lower(child_text(*trial, "isManual"));
      bool value = false;
      if (flag == "true" || flag == "1") {
        value = true;
      } else if (flag != "false" && flag != "0") {
        throw ConsistencyError(fmt::format("isManual '{}' is not a boolean", flag));
      }
      if (manual && *manual != value) {
        throw ConsistencyError("trials disagree on isManual");
      }
      manual = value;
    }
  }
  set.is_manual = manual.value_or(true);
  return set;
}

namespace {

std::string normalize_concept(std::string_view text) {
  std::string out;
  bool space = false;
  for (char c : trim(text)) {
    if (c == '?' || c == '.') continue;
    if (std::isspace(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

const std::map<std::string, TagPath>& tag_table() {
  static const std::map<std::string, TagPath> table = {
      {"plastic limit", {"diggs_geo:plasticLimitTrial", "diggs_geo:waterContent"}},
      {"plastic limit water content", {"diggs_geo:plasticLimitTrial", "diggs_geo:waterContent"}},
      {"plastic limit trial", {"diggs_geo:plasticLimitTrial", "diggs_geo:PlasticLimitTrial"}},
      {"plastic limit trial number", {"diggs_geo:PlasticLimitTrial", "diggs_geo:trialNo"}},
      {"trial number", {"diggs_geo:PlasticLimitTrial", "diggs_geo:trialNo"}},
      {"manual determination", {"diggs_geo:PlasticLimitTrial", "diggs_geo:isManual"}},
      {"is manual", {"diggs_geo:PlasticLimitTrial", "diggs_geo:isManual"}},
  };
  return table;
}

}  // namespace

TagPath tag_for(std::string_view concept_name) {
  const auto key = normalize_concept(concept_name);
  const auto& table = tag_table();
  if (auto it = table.find(key); it != table.end()) return it->second;
  throw NotFoundError(fmt::format("no curated DIGGS tag for '{}'", concept_name));
}

std::vector<std::string> known_concepts() {
  std::vector<std::string> out;
  for (const auto& [k, v] : tag_table()) out.push_back(k);
  return out;
}

}  // namespace geollm::diggs
