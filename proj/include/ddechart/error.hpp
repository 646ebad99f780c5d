#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ddechart {

// Runtime failure with a short machine-readable code ("invalid-domain",
// "not-in-image", ...) used by the CLI for exit-code mapping and reports.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(std::string code, const std::string& message) {
    throw Error(std::move(code), message);
}

}  // namespace ddechart
