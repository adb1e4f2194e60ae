#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace gibbsgraph {

/// A Monte Carlo or exact quantity together with how it was obtained.
/// `valid == false` marks results whose guarantee does not apply (for example
/// a failed degree check); the value is still reported.
struct Estimate {
  double value = 0.0;
  double std_error = std::numeric_limits<double>::quiet_NaN();
  double rel_error_target = 0.0;
  double confidence = 1.0;
  std::size_t replicates = 1;
  bool valid = true;
  std::string reason;
};

/// Thrown when an exact method is asked for an instance beyond its size cap.
class SizeLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace gibbsgraph
