#ifndef ANNSIM_TESTS_PROCESS_HPP
#define ANNSIM_TESTS_PROCESS_HPP

#include <array>
#include <cstdio>
#include <stdexcept>
#include <string>

#include <sys/wait.h>

namespace annsim::testsupport {

struct ProcessResult {
    int exit_code = -1;
    std::string out;  // captured stdout
};

// Runs a shell command and captures its stdout. Append "2>&1" to the command
// to fold stderr into the capture.
inline ProcessResult run_process(const std::string& command) {
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed for: " + command);

    ProcessResult result;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.out.append(buf.data(), n);

    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

inline std::string cli_path() { return ANNSIM_CLI_PATH; }

inline std::string fixture_path(const std::string& rel) {
    return std::string(ANNSIM_FIXTURE_DIR) + "/" + rel;
}

}  // namespace annsim::testsupport

#endif
