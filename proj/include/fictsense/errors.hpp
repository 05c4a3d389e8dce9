#pragma once

#include <stdexcept>
#include <string>

namespace fictsense {

// Input data or configuration violates a documented contract.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A file exists but its contents do not follow the expected format.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem-level failure: missing file, unreadable path, failed write.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fictsense
