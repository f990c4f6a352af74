#include "annsim/util.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace annsim::util {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw std::runtime_error("error reading file: " + path);
    return std::move(buf).str();
}

}  // namespace annsim::util
