#pragma once

#include <string>

#include "respclass/learners.hpp"

namespace respclass {

// Flat self-describing text format, version-tagged, doubles at 17
// significant digits so a load reproduces predictions bit-for-bit.
void save_classifier(const std::string& path, const ResponderClassifier& clf);

// Throws DataError on unreadable, malformed, or version-mismatched files.
ResponderClassifier load_classifier(const std::string& path);

}  // namespace respclass
