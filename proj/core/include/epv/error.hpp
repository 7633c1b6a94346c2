#pragma once

#include <stdexcept>
#include <string>

namespace epv {

/// Malformed input data or arguments. CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Missing or stale upstream pipeline artifact. CLI maps this to exit code 3.
class DependencyError : public std::runtime_error {
public:
    explicit DependencyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace epv
