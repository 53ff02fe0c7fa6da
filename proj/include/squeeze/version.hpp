#ifndef SQUEEZE_VERSION_HPP
#define SQUEEZE_VERSION_HPP

namespace squeeze {

inline constexpr const char* kToolName = "squeeze-sim";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace squeeze

#endif
