#pragma once

#include <Eigen/Core>
#include <vector>

#include "core.hpp"
#include "env.hpp"
#include "rng.hpp"

namespace duelbench {

// Weights of the tempered feel-good likelihood.  `chain` says which of the
// two selections this posterior backs: chain j treats the other selection's
// arm (a_{3-j}) as the fixed opponent in the exploration bonus.
struct likelihood_config {
  double eta = 1.0;  // weight of the logistic log-likelihood
  double mu = 0.0;   // weight of the feel-good bonus; 0 recovers plain TS
  int chain = 1;     // 1 or 2

  void validate() const;
  int adversary_of(const dueling_record& rec) const {
    return chain == 1 ? rec.arm2 : rec.arm1;
  }
};

struct sgld_config {
  double step0 = 0.005;   // step size at round 1
  double decay = 0.99;    // geometric decay per round
  int inner_steps = 100;  // Langevin iterations per sample
  bool warm_start = true; // start from the previous round's sample

  void validate() const;
  double step_at(long round) const;  // step0 * decay^(round-1)
};

struct prior_spec {
  enum class kind_t { gaussian, uniform_ball };
  kind_t kind = kind_t::gaussian;
  double scale = 1.0;  // std-dev of the gaussian / radius of the ball

  void validate() const;
  // -log p0(theta) up to an additive constant; +inf outside the ball
  double neg_log_density(const param_vector& theta) const;
  // gradient of the above; zero for the ball (enforced by projection in the
  // sampler instead)
  param_vector neg_log_density_grad(const param_vector& theta) const;
};

// Per-record term:
//   eta * sigma(y <theta, phi(a1) - phi(a2)>)
//   - mu * max_a <theta, phi(a) - phi(adversary)>
// where adversary = a2 for chain 1 and a1 for chain 2.  Lower is better.
double feel_good_likelihood(const param_vector& theta,
                            const dueling_record& rec,
                            const Eigen::MatrixXd& arms,
                            const likelihood_config& lik);
double feel_good_likelihood(const param_vector& theta,
                            const dueling_record& rec,
                            const action_space& space,
                            const likelihood_config& lik);

// Sum of per-record terms plus -log prior; exp(-potential) is the
// unnormalized posterior density.
double potential(const param_vector& theta, const history& hist,
                 const action_space& space, const likelihood_config& lik,
                 const prior_spec& prior);

// Gradient of `potential`.  At the (measure-zero) ties of the inner max the
// subgradient of the current argmax arm is used.
param_vector potential_gradient(const param_vector& theta,
                                const history& hist,
                                const action_space& space,
                                const likelihood_config& lik,
                                const prior_spec& prior);

// History compiled for the sampler's inner loop: the logistic part becomes
// two matrix-vector products and the feel-good part one argmax per distinct
// action set.  Agrees with potential/potential_gradient to roundoff.
class likelihood_data {
 public:
  likelihood_data(const history& hist, const action_space& space, int chain);

  long count() const { return n_; }
  // likelihood sum only, no prior term
  double value(const param_vector& theta, double eta, double mu) const;
  // adds the likelihood gradient into `out`
  void add_gradient(const param_vector& theta, double eta, double mu,
                    param_vector& out) const;

 private:
  long n_ = 0;
  Eigen::MatrixXd signed_diffs_;           // row i: y_i (phi(a1_i) - phi(a2_i))
  Eigen::VectorXd adversary_sum_;          // sum_i phi(adversary_i)
  Eigen::MatrixXd shared_arms_;            // fixed action set
  std::vector<Eigen::MatrixXd> round_arms_;  // per-record sets when resampled
};

// One draw from the posterior via stochastic gradient Langevin dynamics
// (full-batch gradients): inner_steps iterations of
//   theta <- theta - step * grad potential + sqrt(2 step) * xi
// at the given round's step size.  Throws divergence_error if an iterate
// stops being finite.  With a uniform-ball prior, iterates are projected
// back onto the ball.
param_vector sgld_sample(rng_stream& rng, const param_vector& init,
                         const history& hist, const action_space& space,
                         const likelihood_config& lik,
                         const prior_spec& prior, const sgld_config& cfg,
                         long round);

// Normalized posterior masses exp(-potential) on an explicit grid of
// parameter points, evaluated in log space so the weights cannot collectively
// underflow.  Reference oracle for the sampler.
std::vector<double> exact_posterior_grid(const history& hist,
                                         const action_space& space,
                                         const likelihood_config& lik,
                                         const prior_spec& prior,
                                         const std::vector<param_vector>& grid);

}  // namespace duelbench
