#pragma once

#include <string>

#include "ccb/featurize.hpp"
#include "ccb/heads.hpp"

namespace ccb::model_io {

// Versioned JSON container. Round-trip stable: serialize(deserialize(t)) == t
// bit-for-bit on the double payloads (shortest round-trip encoding).
std::string classifier_to_json(const heads::OneVsRestClassifier& clf);
heads::OneVsRestClassifier classifier_from_json(const std::string& json_text);

std::string vocabulary_to_json(const featurize::Vocabulary& vocab);
featurize::Vocabulary vocabulary_from_json(const std::string& json_text);

} // namespace ccb::model_io
