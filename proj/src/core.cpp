#include "core.hpp"

#include <cmath>
#include <string>

namespace duelbench {

double link_sigma(double z) {
  // log(1 + exp(-z)) without overflow on either side
  if (z >= 0.0) return std::log1p(std::exp(-z));
  return -z + std::log1p(std::exp(z));
}

double link_sigma_deriv(double z) {
  if (z >= 0.0) {
    double e = std::exp(-z);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(z));
}

double link_sigma_curv(double z) {
  double q = -link_sigma_deriv(z);
  return q * (1.0 - q);
}

double preference_probability(double r1, double r2) {
  return std::exp(-link_sigma(r1 - r2));
}

double reward(const param_vector& theta, const feature_vector& phi) {
  if (theta.size() != phi.size())
    throw dimension_error("reward: theta has dimension " +
                          std::to_string(theta.size()) + " but phi has " +
                          std::to_string(phi.size()));
  return theta.dot(phi);
}

double reward_gap(const param_vector& theta, const feature_vector& phi1,
                  const feature_vector& phi2) {
  if (phi1.size() != phi2.size())
    throw dimension_error("reward_gap: feature dimensions differ");
  return reward(theta, phi1) - reward(theta, phi2);
}

void history::append(const dueling_record& rec) {
  if (rec.round < 1)
    throw sequencing_error("history: round must be >= 1, got " +
                           std::to_string(rec.round));
  if (!records_.empty() && rec.round <= records_.back().round)
    throw sequencing_error(
        "history: rounds must be strictly increasing (got " +
        std::to_string(rec.round) + " after " +
        std::to_string(records_.back().round) + ")");
  if (rec.preference != 1 && rec.preference != -1)
    throw invalid_config_error("history: preference must be +1 or -1");
  if (rec.arm1 < 0 || rec.arm2 < 0)
    throw invalid_config_error("history: arm indices must be nonnegative");
  records_.push_back(rec);
}

}  // namespace duelbench
