#ifndef COSSU_ERROR_HPP
#define COSSU_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cossu {

// Raised for malformed or inconsistent input data (unknown symbols, empty
// sequences, bad model files). The CLI maps it to exit code 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cossu

#endif // COSSU_ERROR_HPP
