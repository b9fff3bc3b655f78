#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "core.hpp"
#include "env.hpp"
#include "posterior.hpp"
#include "rng.hpp"

namespace duelbench {

// A parametric reward model r_theta(phi).  The linear case is the default
// throughout; anything bounded works for the finite-model machinery below.
class reward_class {
 public:
  virtual ~reward_class() = default;
  virtual double evaluate(const param_vector& theta,
                          const feature_vector& phi) const = 0;
  // uniform bound on |r_theta| over admissible theta and features
  virtual double bound() const = 0;
};

class linear_reward_class final : public reward_class {
 public:
  explicit linear_reward_class(double bound = 1.0) : bound_(bound) {}
  double evaluate(const param_vector& theta,
                  const feature_vector& phi) const override {
    return reward(theta, phi);
  }
  double bound() const override { return bound_; }

 private:
  double bound_;
};

// Per-record feel-good term under an arbitrary reward class; reduces to
// feel_good_likelihood for linear_reward_class.
double generalized_likelihood(const param_vector& theta,
                              const dueling_record& rec,
                              const Eigen::MatrixXd& arms,
                              const reward_class& cls,
                              const likelihood_config& lik);

// Finitely many candidate models with a prior over them.
struct finite_model_set {
  std::vector<param_vector> models;
  std::vector<double> prior;  // nonnegative, sums to 1

  void validate() const;
};

// Exact posterior over the finite set:
//   w_m \propto prior_m * exp(-sum_records generalized_likelihood(theta_m)).
// Evaluated in log space.
std::vector<double> finite_posterior(const history& hist,
                                     const action_space& space,
                                     const reward_class& cls,
                                     const finite_model_set& set,
                                     const likelihood_config& lik);

// Draws one model per chain independently from `weights` and plays each
// chain's reward-maximizing arm.  Tie on the argmax goes to the lowest index.
std::pair<int, int> finite_fgts_select(rng_stream& rng,
                                       const finite_model_set& set,
                                       const std::vector<double>& weights1,
                                       const std::vector<double>& weights2,
                                       const reward_class& cls,
                                       const Eigen::MatrixXd& arms);

// index of the model drawn from discrete weights by inverse CDF
std::size_t sample_index(rng_stream& rng, const std::vector<double>& weights);

int best_arm_under(const reward_class& cls, const param_vector& theta,
                   const Eigen::MatrixXd& arms);

}  // namespace duelbench
