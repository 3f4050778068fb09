#pragma once

#include <stdexcept>
#include <string>

namespace glots {

struct DegenerateGeometry : std::runtime_error {
    explicit DegenerateGeometry(const std::string& msg) : std::runtime_error(msg) {}
};

struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

struct LabelError : std::runtime_error {
    explicit LabelError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TrainingDiverged : std::runtime_error {
    explicit TrainingDiverged(const std::string& msg) : std::runtime_error(msg) {}
};

struct OrderError : std::runtime_error {
    explicit OrderError(const std::string& msg) : std::runtime_error(msg) {}
};

struct EmptyPool : std::runtime_error {
    explicit EmptyPool(const std::string& msg) : std::runtime_error(msg) {}
};

struct EmptyGroundTruth : std::runtime_error {
    explicit EmptyGroundTruth(const std::string& msg) : std::runtime_error(msg) {}
};

struct SpecError : std::runtime_error {
    explicit SpecError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& file, long line, const std::string& msg)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + msg),
          file(file),
          line(line) {}
    std::string file;
    long line;
};

}  // namespace glots
