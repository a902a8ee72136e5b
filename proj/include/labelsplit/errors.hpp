#ifndef LABELSPLIT_ERRORS_HPP
#define LABELSPLIT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace labelsplit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or arguments (bad timezone, bad alpha, malformed rule file, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed input data. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class MissingAttributeError : public Error {
public:
    MissingAttributeError(const std::string& attribute, const std::string& event_id)
        : Error("event '" + event_id + "' has no attribute '" + attribute + "'"),
          attribute_(attribute), event_id_(event_id) {}

    const std::string& attribute() const noexcept { return attribute_; }
    const std::string& event_id() const noexcept { return event_id_; }

private:
    std::string attribute_;
    std::string event_id_;
};

/// The refined log is not an equal-length refinement of the base log.
class RefinementError : public Error {
public:
    using Error::Error;
};

} // namespace labelsplit

#endif // LABELSPLIT_ERRORS_HPP
