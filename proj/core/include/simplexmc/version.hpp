#pragma once

namespace simplexmc {

inline constexpr const char* kVersion = "0.1.0";

}
