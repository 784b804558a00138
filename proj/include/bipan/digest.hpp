#pragma once

#include <string>
#include <string_view>

#include "bipan/model.hpp"

namespace bipan {

/// Lower-case hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

/// SHA-256 of the canonical model document, binding plans and twins to one
/// model version.
std::string model_digest(const BiPanModel& model);

}  // namespace bipan
