#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace siqr {

/// Base class of every error this library throws.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A caller violated a documented precondition (bad config, non-constant
/// coefficient where a constant one is required, ...).
class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& what) : Error(what) {}
};

/// A numeric evaluation produced a non-finite value.
class EvaluationError : public Error {
public:
    explicit EvaluationError(const std::string& what) : Error(what) {}
};

/// The disease-free linearization of an incidence does not exist
/// (divergent limit at I -> 0+ and no declared limits).
class LinearizationError : public Error {
public:
    explicit LinearizationError(const std::string& what) : Error(what) {}
};

/// Malformed scenario/expression document. Carries the JSON path of the
/// offending field so callers can point at it.
class SchemaError : public Error {
public:
    SchemaError(std::string path, const std::string& reason)
        : Error(path.empty() ? reason : path + ": " + reason), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// A structurally well-formed scenario failed semantic validation.
/// Carries one entry per violated condition.
class ScenarioValidationError : public Error {
public:
    explicit ScenarioValidationError(std::vector<std::string> violations)
        : Error(join(violations)), violations_(std::move(violations)) {}
    const std::vector<std::string>& violations() const { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "scenario validation failed:";
        for (const auto& s : v) {
            out += "\n  - " + s;
        }
        return out;
    }
    std::vector<std::string> violations_;
};

/// Integration could not continue. Carries the time at which it failed.
class IntegrationError : public Error {
public:
    IntegrationError(double t, const std::string& reason)
        : Error("integration failed at t=" + std::to_string(t) + ": " + reason), t_(t) {}
    double time() const { return t_; }

private:
    double t_;
};

/// A convergence probe ran into positivity clamping and its error
/// estimates are meaningless.
class ProbeInvalidError : public Error {
public:
    explicit ProbeInvalidError(const std::string& what) : Error(what) {}
};

} // namespace siqr
