#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace krylovlab {

// Numerical failure (solver did not converge, orthogonality lost, norm blown up).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or truncated container file. Carries the byte offset of the
// first inconsistency.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& msg, std::uint64_t byte_offset)
      : std::runtime_error(msg + " (byte offset " + std::to_string(byte_offset) + ")"),
        offset(byte_offset) {}
  std::uint64_t offset;
};

// Training loss went non-finite.
class TrainingDiverged : public NumericalError {
 public:
  TrainingDiverged(int epoch_, int batch_)
      : NumericalError("training diverged: non-finite loss at epoch " +
                       std::to_string(epoch_) + ", batch " + std::to_string(batch_)),
        epoch(epoch_),
        batch(batch_) {}
  int epoch;
  int batch;
};

}  // namespace krylovlab
