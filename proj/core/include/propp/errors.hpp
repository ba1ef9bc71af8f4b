#pragma once

#include <stdexcept>
#include <string>

namespace propp {

// Bad user input: malformed data files, arguments outside their documented
// domain, dimension mismatches.  Maps to CLI exit code 1.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// A fitting method could not produce a result on structurally valid data.
// Maps to CLI exit code 2.
class MethodFailure : public std::runtime_error {
 public:
  explicit MethodFailure(const std::string& what) : std::runtime_error(what) {}
};

// The rejection sampler's acceptance rate collapsed; the discounting
// posterior is too concentrated for uniform proposals.
class SamplerDegeneracyError : public MethodFailure {
 public:
  explicit SamplerDegeneracyError(const std::string& what) : MethodFailure(what) {}
};

// Stratified borrowing produced a stratum without trial patients.
class StratificationError : public MethodFailure {
 public:
  explicit StratificationError(const std::string& what) : MethodFailure(what) {}
};

}  // namespace propp
