#ifndef ANNSIM_UTIL_HPP
#define ANNSIM_UTIL_HPP

#include <string>

namespace annsim::util {

// Shortest round-trip decimal form of a double (locale-independent).
std::string format_double(double v);

// Reads a whole file; throws std::runtime_error with the path on failure.
std::string read_file(const std::string& path);

}  // namespace annsim::util

#endif
