#pragma once

#include <stdexcept>
#include <string>

namespace mcmimo {

/// Error categories; values line up with the CLI exit codes where applicable
/// (config -> 1, infeasible -> 2, io -> 3).
enum class ErrorCode {
    config = 1,
    infeasible = 2,
    io = 3,
    geometry = 4,
    data = 5,
    simulation = 6,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

inline void require(bool cond, ErrorCode code, const std::string& msg) {
    if (!cond) fail(code, msg);
}

} // namespace mcmimo
