#pragma once

#include "eds/involution.hpp"

#include <json.hpp>

namespace eds {

/// Stable v1 report schema; field order is fixed for byte-identical output.
nlohmann::ordered_json report_json(const CartanReport &rep, const std::string &system_name);

std::string report_text(const CartanReport &rep, const std::string &system_name);

} // namespace eds
