#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hyperode {

// Root of every exception the library throws on contract violations.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class MeshError : public Error {
public:
    using Error::Error;
};

class SingularParameterError : public Error {
public:
    using Error::Error;
};

class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Non-finite values encountered while integrating or optimizing.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(what) {}

    NumericError(const std::string& what, double s, std::size_t stage)
        : Error(what + " (s=" + std::to_string(s) + ", stage=" + std::to_string(stage) + ")"),
          s_(s), stage_(stage), located_(true) {}

    double s() const noexcept { return s_; }
    std::size_t stage() const noexcept { return stage_; }
    bool located() const noexcept { return located_; }

private:
    double s_ = 0.0;
    std::size_t stage_ = 0;
    bool located_ = false;
};

// Adaptive step size collapsed below the representable floor.
class SolverFailure : public Error {
public:
    SolverFailure(const std::string& what, double s) : Error(what), s_(s) {}
    double s() const noexcept { return s_; }

private:
    double s_;
};

class TrainingFailure : public Error {
public:
    TrainingFailure(const std::string& what, std::size_t iteration)
        : Error(what + " at iteration " + std::to_string(iteration)), iteration_(iteration) {}
    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

} // namespace hyperode
