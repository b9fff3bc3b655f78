#include "env.hpp"

#include <cmath>
#include <string>
#include <unordered_set>
#include <vector>

namespace duelbench {

namespace {

// K distinct rows from {-1,+1}^d.  When K == 2^d we enumerate and shuffle
// (rejection would stall); otherwise rejection with a seen-set.
Eigen::MatrixXd sample_sign_arms(rng_stream& rng, int d, int K) {
  Eigen::MatrixXd arms(K, d);
  std::uint64_t capacity =
      d < 63 ? (std::uint64_t{1} << d) : ~std::uint64_t{0};
  if (static_cast<std::uint64_t>(K) == capacity && d < 63) {
    std::vector<std::uint64_t> codes(capacity);
    for (std::uint64_t i = 0; i < capacity; ++i) codes[i] = i;
    for (std::uint64_t i = capacity - 1; i > 0; --i)
      std::swap(codes[i], codes[rng.below(i + 1)]);
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < d; ++j)
        arms(k, j) = (codes[k] >> j) & 1 ? 1.0 : -1.0;
    return arms;
  }
  std::unordered_set<std::string> seen;
  std::string key(static_cast<std::size_t>(d), '.');
  int k = 0;
  while (k < K) {
    for (int j = 0; j < d; ++j) key[j] = rng.uniform() < 0.5 ? '-' : '+';
    if (!seen.insert(key).second) continue;
    for (int j = 0; j < d; ++j) arms(k, j) = key[j] == '+' ? 1.0 : -1.0;
    ++k;
  }
  return arms;
}

Eigen::MatrixXd draw_arm_set(rng_stream& rng, int d, int K,
                             feature_convention convention) {
  Eigen::MatrixXd arms = sample_sign_arms(rng, d, K);
  if (convention == feature_convention::unit_normalized)
    arms /= std::sqrt(static_cast<double>(d));
  return arms;
}

}  // namespace

action_space::action_space(Eigen::MatrixXd arms,
                           feature_convention convention, std::uint64_t seed,
                           bool resample_per_round)
    : arms_(std::move(arms)),
      convention_(convention),
      seed_(seed),
      resample_(resample_per_round) {
  if (arms_.rows() < 1 || arms_.cols() < 1)
    throw invalid_config_error("action_space: need at least one arm and one "
                               "feature dimension");
}

Eigen::MatrixXd action_space::at(long round) const {
  if (!resample_) return arms_;
  if (round < 1)
    throw invalid_config_error("action_space::at: round must be >= 1");
  rng_stream rng(derive_seed(seed_, static_cast<std::uint64_t>(round),
                             stream_tag::instance));
  return draw_arm_set(rng, static_cast<int>(dim()),
                      static_cast<int>(num_arms()), convention_);
}

bandit_instance generate_instance(std::uint64_t seed, int d, int K,
                                  feature_convention convention,
                                  bool resample_per_round) {
  if (d < 1) throw invalid_config_error("generate_instance: d must be >= 1");
  if (K < 1) throw invalid_config_error("generate_instance: K must be >= 1");
  std::uint64_t capacity =
      d < 63 ? (std::uint64_t{1} << d) : ~std::uint64_t{0};
  if (static_cast<std::uint64_t>(K) > capacity)
    throw invalid_config_error(
        "generate_instance: K = " + std::to_string(K) +
        " exceeds the 2^d = " + std::to_string(capacity) +
        " distinct sign vectors");

  rng_stream rng(derive_seed(seed, 0, stream_tag::instance));
  param_vector theta_star(d);
  double norm = 0.0;
  do {
    for (int j = 0; j < d; ++j) theta_star[j] = rng.normal();
    norm = theta_star.norm();
  } while (norm < 1e-12);
  theta_star /= norm;

  // In per-round mode the base set is round 1's, derived from (seed, 1) so
  // action_space::at can reproduce it.
  Eigen::MatrixXd arms;
  if (resample_per_round) {
    rng_stream r1(derive_seed(seed, 1, stream_tag::instance));
    arms = draw_arm_set(r1, d, K, convention);
  } else {
    arms = draw_arm_set(rng, d, K, convention);
  }
  return bandit_instance{std::move(theta_star),
                         action_space(std::move(arms), convention, seed,
                                      resample_per_round)};
}

int best_arm(const param_vector& theta, const Eigen::MatrixXd& arms) {
  if (theta.size() != arms.cols())
    throw dimension_error("best_arm: theta/arm dimension mismatch");
  Eigen::VectorXd scores = arms * theta;
  int best = 0;
  for (int a = 1; a < scores.size(); ++a)
    if (scores[a] > scores[best]) best = a;
  return best;
}

namespace {
void check_arm_index(const Eigen::MatrixXd& arms, int a, const char* who) {
  if (a < 0 || a >= arms.rows())
    throw invalid_config_error(std::string(who) + ": arm index " +
                               std::to_string(a) + " out of range");
}
}  // namespace

int sample_preference(rng_stream& rng, const param_vector& theta_star,
                      const Eigen::MatrixXd& arms, int a1, int a2) {
  check_arm_index(arms, a1, "sample_preference");
  check_arm_index(arms, a2, "sample_preference");
  double r1 = reward(theta_star, arms.row(a1).transpose());
  double r2 = reward(theta_star, arms.row(a2).transpose());
  return rng.uniform() < preference_probability(r1, r2) ? 1 : -1;
}

int sample_preference(rng_stream& rng, const bandit_instance& inst, int a1,
                      int a2) {
  return sample_preference(rng, inst.theta_star, inst.space.base(), a1, a2);
}

double per_round_regret(const param_vector& theta_star,
                        const Eigen::MatrixXd& arms, int a1, int a2) {
  check_arm_index(arms, a1, "per_round_regret");
  check_arm_index(arms, a2, "per_round_regret");
  Eigen::VectorXd scores = arms * theta_star;
  double best = scores.maxCoeff();
  return best - 0.5 * (scores[a1] + scores[a2]);
}

double per_round_regret(const bandit_instance& inst, int a1, int a2) {
  return per_round_regret(inst.theta_star, inst.space.base(), a1, a2);
}

double regret_decomposition_residual(const bandit_instance& inst,
                                     const param_vector& theta1,
                                     const param_vector& theta2) {
  const Eigen::MatrixXd& arms = inst.space.base();
  int a1 = best_arm(theta1, arms);
  int a2 = best_arm(theta2, arms);
  int astar = best_arm(inst.theta_star, arms);
  double regret = per_round_regret(inst, a1, a2);

  auto phi = [&](int a) { return arms.row(a).transpose(); };
  double be1 = (theta1 - inst.theta_star).dot(phi(a1) - phi(a2));
  double be2 = (theta2 - inst.theta_star).dot(phi(a2) - phi(a1));
  // the max over arms is attained at the chain's own argmax arm
  double fg1 = theta1.dot(phi(a1) - phi(a2)) -
               inst.theta_star.dot(phi(astar) - phi(a2));
  double fg2 = theta2.dot(phi(a2) - phi(a1)) -
               inst.theta_star.dot(phi(astar) - phi(a1));
  return std::abs(regret - 0.5 * (be1 + be2 - fg1 - fg2));
}

void regret_trace::append(double r) {
  if (!(r >= 0.0))
    throw error("regret_trace: instantaneous regret must be >= 0, got " +
                std::to_string(r));
  instantaneous.push_back(r);
  cumulative.push_back((cumulative.empty() ? 0.0 : cumulative.back()) + r);
}

}  // namespace duelbench
