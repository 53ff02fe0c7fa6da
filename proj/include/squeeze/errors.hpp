#ifndef SQUEEZE_ERRORS_HPP
#define SQUEEZE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace squeeze {

// Bad scenario file / unusable user input. CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Integration blew up, matrix lost positivity, Fock cutoff exceeded, ...
// CLI maps this to exit code 2.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace squeeze

#endif
