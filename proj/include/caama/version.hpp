#pragma once

#include <string>

namespace caama {

inline std::string version_tag() { return "caama-0.1.0"; }

}  // namespace caama
