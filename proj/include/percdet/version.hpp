#ifndef PERCDET_VERSION_HPP
#define PERCDET_VERSION_HPP

namespace percdet {
inline constexpr const char* kVersion = "0.1.0";
}

#endif  // PERCDET_VERSION_HPP
