#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace duelbench {

using param_vector = Eigen::VectorXd;    // model parameter theta
using feature_vector = Eigen::VectorXd;  // arm feature phi(a)

// Link function sigma(z) = log(1 + exp(-z)).  Decreasing, convex, and
// exp(-sigma(r1 - r2)) is the probability that the first reward wins a
// Bradley-Terry comparison.  Branches keep it exact for |z| up to overflow.
double link_sigma(double z);

// sigma'(z) = -1 / (1 + exp(z)), in (-1, 0)
double link_sigma_deriv(double z);

// sigma''(z) = q (1 - q) with q = -sigma'(z), in (0, 1/4]
double link_sigma_curv(double z);

// exp(r1) / (exp(r1) + exp(r2)) computed as exp(-sigma(r1 - r2))
double preference_probability(double r1, double r2);

// <theta, phi>, with an explicit dimension check
double reward(const param_vector& theta, const feature_vector& phi);

// <theta, phi1 - phi2>
double reward_gap(const param_vector& theta, const feature_vector& phi1,
                  const feature_vector& phi2);

// One duel: at `round` the pair (arm1, arm2) was shown and `preference` is
// +1 if arm1 won, -1 if arm2 won.
struct dueling_record {
  long round = 0;
  int arm1 = 0;
  int arm2 = 0;
  int preference = 0;
};

// Append-only log of duels with strictly increasing rounds.
class history {
 public:
  void append(const dueling_record& rec);
  const std::vector<dueling_record>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  long last_round() const {
    return records_.empty() ? 0 : records_.back().round;
  }

 private:
  std::vector<dueling_record> records_;
};

}  // namespace duelbench
