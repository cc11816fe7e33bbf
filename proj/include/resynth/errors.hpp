// Exception types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace resynth {

// An operation exceeded a configured resource limit (automaton state cap,
// solver deadline, iteration budget).
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// An external solver process could not be run or produced malformed output.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace resynth
