#pragma once

#include <stdexcept>
#include <string>

namespace motirr {

/// A physical parameter lies outside its admissible domain.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// A caller broke a precondition that is not about physical ranges
/// (unnormalized distribution, empty batch, zero photon budget).
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// A fringe histogram is too coarse or too narrow to resolve one fringe.
class ResolutionError : public std::runtime_error {
 public:
  explicit ResolutionError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace motirr
