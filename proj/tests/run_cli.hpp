#pragma once

// Runs the built CLI through the shell and captures stdout and exit status.

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

namespace clirun {

struct Result {
    int status = -1;
    std::string out;
};

inline Result run(const std::string& args) {
    const std::string cmd = std::string("'") + NETAGG_CLI + "' " + args + " 2>/dev/null";
    Result r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe)
        return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
        r.out.append(buf.data(), n);
    const int raw = ::pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

inline std::string sample(const std::string& name) {
    return std::string("'") + NETAGG_SAMPLES_DIR + "/" + name + "'";
}

} // namespace clirun
