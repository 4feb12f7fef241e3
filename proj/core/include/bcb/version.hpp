#ifndef BCB_VERSION_HPP
#define BCB_VERSION_HPP

namespace bcb {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bcb

#endif  // BCB_VERSION_HPP
