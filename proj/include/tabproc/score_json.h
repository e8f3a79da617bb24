// Canonical JSON form of Score and related records (schema in docs/file-formats.md).

#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "tabproc/ingest.h"
#include "tabproc/model.h"

namespace tabproc {

using Json = nlohmann::json;

Json toJson(const PitchSpec& p);
Json toJson(const ClipAnnotation& a);
Json toJson(const Score& score);
Json toJson(const ParseReport& report);

PitchSpec pitchFromJson(const Json& j);
ClipAnnotation annotationFromJson(const Json& j);
Score scoreFromJson(const Json& j);

/// Sorted keys, two-space indent, trailing newline.
std::string dumpCanonical(const Json& j);

std::string serializeScore(const Score& score);
/// Throws Error on malformed JSON or schema violations.
Score parseScoreJson(std::string_view text);

}  // namespace tabproc
