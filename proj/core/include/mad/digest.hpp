#pragma once

#include <string>

namespace mad {

std::string sha256_hex(const std::string& data);

}  // namespace mad
