#pragma once

#include <stdexcept>
#include <string>

namespace fewbit {

// Truncated-moment normalizer underflowed to zero in exact-normal mode.
// Callers are expected to fall back to the logistic surrogate.
struct NonFiniteResult : std::runtime_error {
  explicit NonFiniteResult(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::invalid_argument {
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct SingularCovariance : std::runtime_error {
  explicit SingularCovariance(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidBits : std::invalid_argument {
  explicit InvalidBits(const std::string& what) : std::invalid_argument(what) {}
};

struct InvalidStep : std::invalid_argument {
  explicit InvalidStep(const std::string& what) : std::invalid_argument(what) {}
};

struct InvalidLength : std::invalid_argument {
  explicit InvalidLength(const std::string& what) : std::invalid_argument(what) {}
};

struct ZeroColumn : std::invalid_argument {
  explicit ZeroColumn(const std::string& what) : std::invalid_argument(what) {}
};

struct InvalidState : std::logic_error {
  explicit InvalidState(const std::string& what) : std::logic_error(what) {}
};

struct QuadratureFailure : std::runtime_error {
  explicit QuadratureFailure(const std::string& what) : std::runtime_error(what) {}
};

struct TooLarge : std::invalid_argument {
  explicit TooLarge(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace fewbit
