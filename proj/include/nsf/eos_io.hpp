#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "nsf/thermo.hpp"

namespace nsf {

using Json = nlohmann::json;

// Issues are appended as "path: message [label]"; the returned spec is only meaningful when
// no issue was added.
EosSpec eos_from_json(const Json& j, const std::string& path, std::vector<std::string>& issues);
TransportSpec transport_from_json(const Json& j, const std::string& path, std::vector<std::string>& issues);

Json eos_to_json(const EosSpec& eos, const TransportSpec& ts);

struct EosDocument {
  EosSpec eos;
  TransportSpec transport;
};

// Throws Error(Validation) listing every issue, Error(Io) when unreadable.
EosDocument parse_eos_document(const std::string& text);
EosDocument load_eos_document(const std::string& path);

std::string read_text_file(const std::string& path);

}  // namespace nsf
