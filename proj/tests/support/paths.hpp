#pragma once

#include <string>

#ifndef TCCP_SOURCE_DIR
#error "TCCP_SOURCE_DIR must point at the repository root"
#endif

namespace paths {

inline std::string repo(const std::string& rel) { return std::string(TCCP_SOURCE_DIR) + "/" + rel; }

inline const char* kPhotocopierEntry = "initialize(MIdle) || tell(MIdle = 5)";

}  // namespace paths
