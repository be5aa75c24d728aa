#pragma once

#include <stdexcept>
#include <string>

namespace wtkp {

// Invalid or inconsistent generator configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Filesystem or codec failure; the message names the path involved.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed label / prediction / scene file. Carries file and line context.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
          file_(file), line_(line) {}

    const std::string& file() const { return file_; }
    std::size_t line() const { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

// Scene state that violates a geometric precondition (e.g. blades not 120 deg apart).
class SceneError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace wtkp
