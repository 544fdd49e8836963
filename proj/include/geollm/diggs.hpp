#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace geollm::diggs {

struct PlasticLimitTrialSet {
  std::vector<double> trials;  // water content, percent, in trial order
  bool is_manual = true;

  bool operator==(const PlasticLimitTrialSet&) const = default;
};

// Only the prefixes are fixed; the URIs are placeholders that can be swapped
// for the bindings of a target DIGGS release.
struct Namespaces {
  std::string diggs_geo = "http://diggsml.org/schemas/2.6/geotechnical";
  std::string gml = "http://www.opengis.net/gml/3.2";
};

// Trial n (1-based) becomes
//   <diggs_geo:plasticLimitTrial>
//     <diggs_geo:PlasticLimitTrial gml:id="tr{n}">
//       <diggs_geo:trialNo>n</diggs_geo:trialNo>
//       <diggs_geo:waterContent>value</diggs_geo:waterContent>
//       <diggs_geo:isManual>true|false</diggs_geo:isManual>
// inside a diggs_geo:PlasticLimitTest root. Values print in their shortest
// round-trip form with at least one decimal.
std::string emit_plastic_limit_xml(const PlasticLimitTrialSet& set, const Namespaces& ns = {});

// Inverse of emit. Trials are read in document order; "tr{n}" must match
// trialNo n (ConsistencyError otherwise), malformed XML raises ParseError.
PlasticLimitTrialSet parse_plastic_limit_xml(std::string_view document);

struct TagPath {
  std::string parent;
  std::string child;
};

// Closed lookup from a concept ("plastic limit") to its qualified element
// path. Unknown concepts raise NotFoundError; nothing is synthesized.
TagPath tag_for(std::string_view concept_name);
std::vector<std::string> known_concepts();

}  // namespace geollm::diggs
