#pragma once

#include <stdexcept>
#include <string>

namespace duelbench {

// Base class for everything this library throws on purpose.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad knob values: nonpositive rounds, eta <= 0, K > 2^d, ...
struct invalid_config_error : error {
  using error::error;
};

// Mismatched vector dimensions in a place the type system cannot catch.
struct dimension_error : error {
  using error::error;
};

// Records fed out of order, or an update for a round that was never selected.
struct sequencing_error : error {
  using error::error;
};

// The Langevin iterate stopped being finite.
struct divergence_error : error {
  long round;
  divergence_error(const std::string& msg, long round_)
      : error(msg), round(round_) {}
};

// The logistic MLE failed to reach the requested gradient norm.
struct estimation_error : error {
  double grad_norm;
  estimation_error(const std::string& msg, double grad_norm_)
      : error(msg), grad_norm(grad_norm_) {}
};

// Aggregation over traces of unequal length (or no traces at all).
struct aggregation_error : error {
  using error::error;
};

struct io_error : error {
  using error::error;
};

}  // namespace duelbench
