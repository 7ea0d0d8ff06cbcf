#pragma once

#include <stdexcept>
#include <string>

namespace rlsp {

// Thrown when observed evidence has probability zero under *every* candidate
// reward, i.e. the model cannot explain the observation at all. Distinct from
// a merely unlikely theta, which shows up as a finite (very negative) value.
class ImpossibleEvidenceError : public std::runtime_error {
public:
    explicit ImpossibleEvidenceError(const std::string& what)
        : std::runtime_error(what) {}
};

// Thrown by planners that detect their own preconditions cannot be met,
// e.g. a reachability baseline asked to run on a stochastic rollout.
class BaselineRefusalError : public std::runtime_error {
public:
    explicit BaselineRefusalError(const std::string& what)
        : std::runtime_error(what) {}
};

// Thrown when an evaluation metric is undefined for the given scenario,
// e.g. a return fraction whose denominator is not positive.
class MetricUndefinedError : public std::runtime_error {
public:
    explicit MetricUndefinedError(const std::string& what)
        : std::runtime_error(what) {}
};

}  // namespace rlsp
