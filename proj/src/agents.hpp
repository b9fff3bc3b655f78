#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string_view>
#include <utility>
#include <vector>

#include "core.hpp"
#include "env.hpp"
#include "posterior.hpp"
#include "rng.hpp"

namespace duelbench {

// Base class enforcing the select/update alternation: select(t) must be
// followed by update(record with round t) before select(t+1).
class agent {
 public:
  explicit agent(const action_space& space) : space_(&space) {}
  virtual ~agent() = default;

  std::pair<int, int> select(long round);
  void update(const dueling_record& rec);
  long completed_rounds() const { return updated_round_; }
  virtual std::string_view name() const = 0;

 protected:
  virtual std::pair<int, int> do_select(long round,
                                        const Eigen::MatrixXd& arms) = 0;
  virtual void do_update(const dueling_record& rec,
                         const Eigen::MatrixXd& arms) = 0;
  const action_space& space() const { return *space_; }

 private:
  const Eigen::MatrixXd& arms_for(long round);

  const action_space* space_;
  long updated_round_ = 0;
  long selected_round_ = 0;
  Eigen::MatrixXd round_arms_;
  long round_arms_round_ = -1;
};

// ---------------------------------------------------------------------------
// Feel-good Thompson sampling

struct fgts_config {
  double eta = 1.0;
  double mu = 0.0;
  sgld_config sgld;
  prior_spec prior;
  // test hook: replaces the Langevin sampler when set; receives (chain, round)
  std::function<param_vector(int, long)> sampler_override;
};

// Two independent posterior chains; chain j plays the best arm under its own
// sampled parameter, and its likelihood treats the other chain's previous
// picks as the opponent in the exploration bonus.
class fgts_agent final : public agent {
 public:
  fgts_agent(const action_space& space, const fgts_config& cfg,
             std::uint64_t seed_chain1, std::uint64_t seed_chain2);
  std::string_view name() const override { return "fgts"; }
  const history& seen() const { return hist_; }
  const param_vector& last_sample(int chain) const;

 protected:
  std::pair<int, int> do_select(long round,
                                const Eigen::MatrixXd& arms) override;
  void do_update(const dueling_record& rec,
                 const Eigen::MatrixXd& arms) override;

 private:
  fgts_config cfg_;
  history hist_;
  rng_stream rng_[2];
  param_vector warm_[2];
};

// ---------------------------------------------------------------------------
// Regularized logistic maximum likelihood (shared by the UCB baselines)

struct mle_result {
  param_vector theta;
  double grad_norm = 0.0;
  int iterations = 0;
  std::vector<double> objective_path;  // objective at each iterate, decreasing
};

// Minimizes sum_i sigma(y_i <theta, dphi_i>) + lambda/2 |theta|^2 by damped
// Newton.  Converges when the gradient norm drops below `tol`; throws
// estimation_error otherwise.  `signed_diffs` rows are y_i dphi_i.
mle_result mle_fit(const Eigen::MatrixXd& signed_diffs, double lambda,
                   const param_vector* warm = nullptr, int max_iter = 100,
                   double tol = 1e-8);
mle_result mle_estimate(const history& hist, const action_space& space,
                        double lambda, const param_vector* warm = nullptr,
                        int max_iter = 100, double tol = 1e-8);

// sigma + (phi1 - phi2)(phi1 - phi2)^T
Eigen::MatrixXd covariance_update(const Eigen::MatrixXd& sigma,
                                  const feature_vector& phi1,
                                  const feature_vector& phi2);

// G = arms Sigma^{-1} arms^T, so that the optimistic pair width
// |phi_x - phi_y|_{Sigma^{-1}} is sqrt(G_xx + G_yy - 2 G_xy)
Eigen::MatrixXd uncertainty_gram(const Eigen::MatrixXd& cov,
                                 const Eigen::MatrixXd& arms);
double pair_width(const Eigen::MatrixXd& gram, int x, int y);

// ---------------------------------------------------------------------------
// Baseline selection rules (pure functions of the current statistics; ties
// resolve to the lexicographically smallest index pair)

// Keeps the arms not optimistically dominated (a survives iff for every b,
// <theta, phi_a - phi_b> + beta |phi_a - phi_b|_{Sigma^{-1}} >= 0) and plays
// the surviving pair with the largest width.
std::pair<int, int> maxinp_select(const param_vector& theta_hat,
                                  const Eigen::MatrixXd& cov,
                                  const Eigen::MatrixXd& arms, double beta);

// argmax over pairs of <theta, phi_x + phi_y> + beta |phi_x - phi_y|
std::pair<int, int> maxpairucb_select(const param_vector& theta_hat,
                                      const Eigen::MatrixXd& cov,
                                      const Eigen::MatrixXd& arms,
                                      double beta);

// First arm: argmax of <theta, phi_a> + c * epsilon_a for explicit gumbel
// perturbations (exposed for tests); second arm: optimistic challenger.
int colstim_first_arm(const param_vector& theta_hat,
                      const Eigen::MatrixXd& arms,
                      const Eigen::VectorXd& perturbations, double c);
int colstim_second_arm(const param_vector& theta_hat,
                       const Eigen::MatrixXd& cov,
                       const Eigen::MatrixXd& arms, double beta, int first);
std::pair<int, int> colstim_select(rng_stream& rng,
                                   const param_vector& theta_hat,
                                   const Eigen::MatrixXd& cov,
                                   const Eigen::MatrixXd& arms, double beta,
                                   double c);

// ---------------------------------------------------------------------------
// Baseline agents

struct baseline_config {
  double beta = 1.0;         // optimism width multiplier
  double lambda = 0.001;     // ridge weight / covariance prior
  double perturbation = 1.0; // colstim's c
  int layers = 12;           // vacdb elimination layers
};

// history + covariance + warm-started MLE, shared by the one-layer baselines
class ridge_logistic_agent : public agent {
 public:
  const param_vector& estimate() const { return theta_hat_; }
  const Eigen::MatrixXd& covariance() const { return cov_; }

 protected:
  ridge_logistic_agent(const action_space& space, const baseline_config& cfg);
  void do_update(const dueling_record& rec,
                 const Eigen::MatrixXd& arms) override;

  baseline_config cfg_;
  Eigen::MatrixXd cov_;
  param_vector theta_hat_;

 private:
  Eigen::MatrixXd signed_diffs_;  // grows one row per duel
  long filled_ = 0;
};

class maxinp_agent final : public ridge_logistic_agent {
 public:
  maxinp_agent(const action_space& space, const baseline_config& cfg)
      : ridge_logistic_agent(space, cfg) {}
  std::string_view name() const override { return "maxinp"; }

 protected:
  std::pair<int, int> do_select(long, const Eigen::MatrixXd& arms) override {
    return maxinp_select(theta_hat_, cov_, arms, cfg_.beta);
  }
};

class maxpairucb_agent final : public ridge_logistic_agent {
 public:
  maxpairucb_agent(const action_space& space, const baseline_config& cfg)
      : ridge_logistic_agent(space, cfg) {}
  std::string_view name() const override { return "maxpairucb"; }

 protected:
  std::pair<int, int> do_select(long, const Eigen::MatrixXd& arms) override {
    return maxpairucb_select(theta_hat_, cov_, arms, cfg_.beta);
  }
};

class colstim_agent final : public ridge_logistic_agent {
 public:
  colstim_agent(const action_space& space, const baseline_config& cfg,
                std::uint64_t seed)
      : ridge_logistic_agent(space, cfg), rng_(seed) {}
  std::string_view name() const override { return "colstim"; }

 protected:
  std::pair<int, int> do_select(long, const Eigen::MatrixXd& arms) override {
    return colstim_select(rng_, theta_hat_, cov_, arms, cfg_.beta,
                          cfg_.perturbation);
  }

 private:
  rng_stream rng_;
};

// Variance-aware layered elimination.  Duels are routed to the first layer
// whose pair uncertainty still exceeds its resolution 2^-l; resolved layers
// eliminate arms whose estimated reward trails some survivor by more than
// twice the resolution.  Layer statistics only ever see their own duels.
class vacdb_agent final : public agent {
 public:
  vacdb_agent(const action_space& space, const baseline_config& cfg);
  std::string_view name() const override { return "vacdb"; }
  const std::vector<char>& survivors(int layer) const;

 protected:
  std::pair<int, int> do_select(long round,
                                const Eigen::MatrixXd& arms) override;
  void do_update(const dueling_record& rec,
                 const Eigen::MatrixXd& arms) override;

 private:
  struct layer {
    Eigen::MatrixXd cov;
    history hist;
    param_vector theta_hat;
    std::vector<char> alive;
  };

  baseline_config cfg_;
  std::vector<layer> layers_;
  int pending_layer_ = -1;
};

}  // namespace duelbench
