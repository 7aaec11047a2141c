#pragma once

namespace confsense {

inline constexpr char kVersion[] = "0.1.0";

} // namespace confsense
