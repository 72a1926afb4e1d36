#ifndef PERCDET_ERROR_HPP
#define PERCDET_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace percdet {

/// Raised for out-of-domain arguments (non-finite values, probabilities outside (0,1), ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// No threshold separates the background and object regimes: the noise level
/// is not small enough for percolation-based detection.
class InfeasibleNoise : public std::runtime_error {
 public:
  InfeasibleNoise(const std::string& what, double lower_edge, double upper_edge)
      : std::runtime_error(what), lower_edge_(lower_edge), upper_edge_(upper_edge) {}

  // Diagnostic endpoints: the background constraint needs theta > lower_edge,
  // the object constraint needs theta < upper_edge.
  double lower_edge() const noexcept { return lower_edge_; }
  double upper_edge() const noexcept { return upper_edge_; }

 private:
  double lower_edge_;
  double upper_edge_;
};

/// A lab estimator was asked to run in the wrong percolation phase.
class InvalidRegime : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t byte_offset)
      : std::runtime_error(what + " (line " + std::to_string(line) + ", byte " +
                           std::to_string(byte_offset) + ")"),
        line_(line),
        byte_offset_(byte_offset) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t line_;
  std::size_t byte_offset_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace percdet

#endif  // PERCDET_ERROR_HPP
