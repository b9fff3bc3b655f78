#include "model_classes.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace duelbench {

double generalized_likelihood(const param_vector& theta,
                              const dueling_record& rec,
                              const Eigen::MatrixXd& arms,
                              const reward_class& cls,
                              const likelihood_config& lik) {
  if (rec.arm1 < 0 || rec.arm1 >= arms.rows() || rec.arm2 < 0 ||
      rec.arm2 >= arms.rows())
    throw invalid_config_error(
        "generalized_likelihood: record arm index out of range");
  double r1 = cls.evaluate(theta, arms.row(rec.arm1).transpose());
  double r2 = cls.evaluate(theta, arms.row(rec.arm2).transpose());
  double z = rec.preference * (r1 - r2);
  double top = -std::numeric_limits<double>::infinity();
  for (long a = 0; a < arms.rows(); ++a)
    top = std::max(top, cls.evaluate(theta, arms.row(a).transpose()));
  double adv =
      cls.evaluate(theta, arms.row(lik.adversary_of(rec)).transpose());
  return lik.eta * link_sigma(z) - lik.mu * (top - adv);
}

void finite_model_set::validate() const {
  if (models.empty())
    throw invalid_config_error("finite_model_set: no models");
  if (prior.size() != models.size())
    throw invalid_config_error(
        "finite_model_set: prior and model counts differ");
  double total = 0.0;
  for (double p : prior) {
    if (!(p >= 0.0))
      throw invalid_config_error("finite_model_set: negative prior mass");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw invalid_config_error("finite_model_set: prior sums to " +
                               std::to_string(total) + ", expected 1");
  for (std::size_t m = 1; m < models.size(); ++m)
    if (models[m].size() != models[0].size())
      throw dimension_error("finite_model_set: model dimensions differ");
}

std::vector<double> finite_posterior(const history& hist,
                                     const action_space& space,
                                     const reward_class& cls,
                                     const finite_model_set& set,
                                     const likelihood_config& lik) {
  set.validate();
  lik.validate();
  std::vector<double> neg_log(set.models.size());
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < set.models.size(); ++m) {
    if (set.prior[m] == 0.0) {
      neg_log[m] = std::numeric_limits<double>::infinity();
      continue;
    }
    double total = -std::log(set.prior[m]);
    for (const dueling_record& rec : hist.records()) {
      Eigen::MatrixXd arms =
          space.per_round() ? space.at(rec.round) : space.base();
      total += generalized_likelihood(set.models[m], rec, arms, cls, lik);
    }
    neg_log[m] = total;
    lo = std::min(lo, total);
  }
  if (!std::isfinite(lo))
    throw invalid_config_error("finite_posterior: no model has prior mass");
  std::vector<double> weights(set.models.size());
  double z = 0.0;
  for (std::size_t m = 0; m < weights.size(); ++m) {
    weights[m] = std::exp(lo - neg_log[m]);
    z += weights[m];
  }
  for (double& w : weights) w /= z;
  return weights;
}

std::size_t sample_index(rng_stream& rng, const std::vector<double>& weights) {
  if (weights.empty())
    throw invalid_config_error("sample_index: empty weight vector");
  double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;  // u landed in roundoff slack past the last mass
}

int best_arm_under(const reward_class& cls, const param_vector& theta,
                   const Eigen::MatrixXd& arms) {
  int best = 0;
  double top = cls.evaluate(theta, arms.row(0).transpose());
  for (long a = 1; a < arms.rows(); ++a) {
    double r = cls.evaluate(theta, arms.row(a).transpose());
    if (r > top) {
      top = r;
      best = static_cast<int>(a);
    }
  }
  return best;
}

std::pair<int, int> finite_fgts_select(rng_stream& rng,
                                       const finite_model_set& set,
                                       const std::vector<double>& weights1,
                                       const std::vector<double>& weights2,
                                       const reward_class& cls,
                                       const Eigen::MatrixXd& arms) {
  set.validate();
  if (weights1.size() != set.models.size() ||
      weights2.size() != set.models.size())
    throw invalid_config_error(
        "finite_fgts_select: weight/model counts differ");
  std::size_t m1 = sample_index(rng, weights1);
  std::size_t m2 = sample_index(rng, weights2);
  return {best_arm_under(cls, set.models[m1], arms),
          best_arm_under(cls, set.models[m2], arms)};
}

}  // namespace duelbench
