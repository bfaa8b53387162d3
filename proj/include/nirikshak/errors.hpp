#pragma once

#include <stdexcept>
#include <string>

namespace nirikshak {

/// Base class for all errors raised by the engine.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or invalid user input: schema files, endpoint files, config.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// A template placeholder could not be resolved.
class TemplateError : public Error {
public:
    explicit TemplateError(const std::string& what) : Error(what) {}
};

/// Setup-phase failure (hook exited non-zero, id generation exhausted, ...).
class SetupError : public Error {
public:
    explicit SetupError(const std::string& what) : Error(what) {}
};

/// Filesystem failure writing or reading engine artifacts.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

} // namespace nirikshak
