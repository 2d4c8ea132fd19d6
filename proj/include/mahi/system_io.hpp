#pragma once

#include <string>

#include "json.hpp"
#include "mahi/system.hpp"

namespace mahi {

// Throws InputError carrying the line (for syntax errors) or field path
// (for schema errors), or the first violated invariant.
SystemBundle load_system(const std::string& path);
SystemBundle parse_system(const std::string& text, const std::string& source = "<string>");
SystemBundle system_from_json(const nlohmann::json& j);

nlohmann::json system_to_json(const SystemBundle& bundle);
std::string dump_system(const SystemBundle& bundle);
void save_system(const std::string& path, const SystemBundle& bundle);

}  // namespace mahi
