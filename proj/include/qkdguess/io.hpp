#pragma once

// JSON and CSV encodings of configurations and reports, plus atomic output.

#include <string>

#include <json.hpp>

#include "qkdguess/analysis.hpp"
#include "qkdguess/guessing.hpp"
#include "qkdguess/keyrate.hpp"
#include "qkdguess/protocol.hpp"

namespace qkdguess {

using nlohmann::json;

/// {"t", "directions": [{"theta", "phi"}], "basis_probs", "class"}.
/// Throws Error(InvalidArgument) on schema violations; the result is validated.
ProtocolConfig protocol_from_json(const json& j);
json to_json(const ProtocolConfig& config);

/// "bb84", "sixstate", or a path to a ProtocolConfig JSON file.
ProtocolConfig load_protocol(const std::string& name_or_path);

json to_json(const EntropyReport& rep);
EntropyReport entropy_report_from_json(const json& j);

json to_json(const GuessResult& res);
GuessResult guess_result_from_json(const json& j);

json to_json(const CriticalReport& rep);
CriticalReport critical_report_from_json(const json& j);

/// Single-row CSV with a header; numbers printed with 17 significant digits
/// so they carry the same values as the JSON encodings.
std::string to_csv(const EntropyReport& rep);
std::string to_csv(const GuessResult& res);
std::string to_csv(const CriticalReport& rep);

/// Array of objects keyed by the CSV header; numeric cells become numbers.
json csv_to_json(const std::string& csv);

/// Writes to stdout for "-"; otherwise writes a sibling temporary file and
/// renames it over `path`, so a failed run leaves no partial file.
void write_output(const std::string& path, const std::string& content);

}  // namespace qkdguess
