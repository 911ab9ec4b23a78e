#pragma once

#include <stdexcept>
#include <string>

namespace triggerlab {

// Bad configuration or invalid user input. CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A required file (dataset, checkpoint, resource) is absent. Exit code 3.
struct MissingArtifact : std::runtime_error {
    explicit MissingArtifact(const std::string& path)
        : std::runtime_error("missing artifact: " + path), path(path) {}
    std::string path;
};

// Malformed file contents, reported with line context where known.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, size_t line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line(line) {}
    explicit ParseError(const std::string& what) : std::runtime_error(what), line(0) {}
    size_t line;
};

struct EmptyDatasetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace triggerlab
