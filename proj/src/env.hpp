#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "core.hpp"
#include "rng.hpp"

namespace duelbench {

// How arm features are scaled.  raw_pm1 keeps +-1 coordinates (norm sqrt(d));
// unit_normalized divides by sqrt(d) so every arm has unit norm.
enum class feature_convention { raw_pm1, unit_normalized };

// The agent-visible part of an environment: arm features, never the target
// parameter.  With resample_per_round the set is redrawn each round,
// deterministically in (seed, round).
class action_space {
 public:
  action_space(Eigen::MatrixXd arms, feature_convention convention,
               std::uint64_t seed, bool resample_per_round);

  long num_arms() const { return arms_.rows(); }
  long dim() const { return arms_.cols(); }
  bool per_round() const { return resample_; }
  feature_convention convention() const { return convention_; }

  // the fixed arm set (round-1 set in per-round mode)
  const Eigen::MatrixXd& base() const { return arms_; }

  // arm set shown at `round` (1-based); equals base() unless per_round()
  Eigen::MatrixXd at(long round) const;

 private:
  Eigen::MatrixXd arms_;  // one arm per row, K x d
  feature_convention convention_;
  std::uint64_t seed_;
  bool resample_;
};

struct bandit_instance {
  param_vector theta_star;  // unit norm
  action_space space;

  long dim() const { return space.dim(); }
  long num_arms() const { return space.num_arms(); }
};

// K distinct sign vectors from {-1,+1}^d (scaled per convention) and a
// uniformly random unit-norm theta*.  Deterministic in seed.
bandit_instance generate_instance(std::uint64_t seed, int d, int K,
                                  feature_convention convention,
                                  bool resample_per_round = false);

// index of the reward-maximizing arm; lowest index wins ties
int best_arm(const param_vector& theta, const Eigen::MatrixXd& arms);

// Bradley-Terry draw: +1 with probability exp(r1)/(exp(r1)+exp(r2))
int sample_preference(rng_stream& rng, const param_vector& theta_star,
                      const Eigen::MatrixXd& arms, int a1, int a2);
int sample_preference(rng_stream& rng, const bandit_instance& inst, int a1,
                      int a2);

// r*(a*) - (r*(a1) + r*(a2)) / 2, always >= 0
double per_round_regret(const param_vector& theta_star,
                        const Eigen::MatrixXd& arms, int a1, int a2);
double per_round_regret(const bandit_instance& inst, int a1, int a2);

// Residual of the exact rewrite of per-round regret in terms of two sampled
// parameters: regret = (be1 + be2 - fg1 - fg2) / 2, where for chain j with
// own arm a_j and opponent a_k,
//   be_j = <theta_j - theta*, phi(a_j) - phi(a_k)>
//   fg_j = max_a <theta_j, phi(a) - phi(a_k)> - <theta*, phi(a*) - phi(a_k)>.
// Exact (up to roundoff) when a_j maximizes reward under theta_j, which this
// function asserts.  Returns |identity mismatch|.
double regret_decomposition_residual(const bandit_instance& inst,
                                     const param_vector& theta1,
                                     const param_vector& theta2);

// Instantaneous and cumulative regret, one entry per round.
struct regret_trace {
  std::vector<double> instantaneous;
  std::vector<double> cumulative;

  void append(double r);
  long rounds() const { return static_cast<long>(instantaneous.size()); }
  double final_cumulative() const {
    return cumulative.empty() ? 0.0 : cumulative.back();
  }
};

}  // namespace duelbench
