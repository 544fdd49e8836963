#pragma once

#include <optional>
#include <string>

#include "geollm/soil.hpp"

namespace oracle {

// Independent transcription of the USCS decision table as a flat list of
// rows, first match wins. Returns nullopt when a row needs a field the sample
// does not carry. Shares no code with the library classifier.
std::optional<std::string> uscs_symbol(const geollm::SoilSample& sample);

}  // namespace oracle
