#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "env.hpp"
#include "errors.hpp"
#include "rng.hpp"

using namespace duelbench;

TEST_CASE("generate_instance produces a unit target and distinct sign arms") {
  for (std::uint64_t seed : {1ULL, 7ULL, 99ULL}) {
    bandit_instance inst =
        generate_instance(seed, 6, 20, feature_convention::raw_pm1);
    CHECK(inst.dim() == 6);
    CHECK(inst.num_arms() == 20);
    CHECK(inst.theta_star.norm() == doctest::Approx(1.0).epsilon(1e-12));

    const Eigen::MatrixXd& arms = inst.space.base();
    std::set<std::vector<double>> rows;
    for (long i = 0; i < arms.rows(); ++i) {
      for (long j = 0; j < arms.cols(); ++j)
        CHECK(std::abs(arms(i, j)) == doctest::Approx(1.0).epsilon(1e-15));
      rows.insert(
          std::vector<double>(arms.row(i).begin(), arms.row(i).end()));
    }
    CHECK(rows.size() == 20);  // pairwise distinct
  }
}

TEST_CASE("K = 2^d exhausts the hypercube corners") {
  bandit_instance inst =
      generate_instance(3, 5, 32, feature_convention::raw_pm1);
  std::set<std::vector<double>> rows;
  const Eigen::MatrixXd& arms = inst.space.base();
  for (long i = 0; i < 32; ++i)
    rows.insert(std::vector<double>(arms.row(i).begin(), arms.row(i).end()));
  CHECK(rows.size() == 32);  // all corners, each exactly once
}

TEST_CASE("unit convention rescales arms to unit norm") {
  bandit_instance inst =
      generate_instance(11, 7, 16, feature_convention::unit_normalized);
  const Eigen::MatrixXd& arms = inst.space.base();
  for (long i = 0; i < arms.rows(); ++i)
    CHECK(arms.row(i).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("instance generation is deterministic and validates K") {
  bandit_instance a = generate_instance(5, 4, 10, feature_convention::raw_pm1);
  bandit_instance b = generate_instance(5, 4, 10, feature_convention::raw_pm1);
  CHECK((a.theta_star - b.theta_star).norm() == 0.0);
  CHECK((a.space.base() - b.space.base()).norm() == 0.0);

  bandit_instance c = generate_instance(6, 4, 10, feature_convention::raw_pm1);
  CHECK((a.theta_star - c.theta_star).norm() > 0.0);

  CHECK_THROWS_AS(generate_instance(1, 3, 9, feature_convention::raw_pm1),
                  invalid_config_error);
  CHECK_THROWS_AS(generate_instance(1, 0, 4, feature_convention::raw_pm1),
                  invalid_config_error);
}

TEST_CASE("per-round resampling changes the set but stays deterministic") {
  bandit_instance inst =
      generate_instance(21, 4, 8, feature_convention::raw_pm1, true);
  CHECK(inst.space.per_round());
  Eigen::MatrixXd r3a = inst.space.at(3);
  Eigen::MatrixXd r3b = inst.space.at(3);
  CHECK((r3a - r3b).norm() == 0.0);
  Eigen::MatrixXd r4 = inst.space.at(4);
  CHECK((r3a - r4).norm() > 0.0);
  CHECK_THROWS_AS(inst.space.at(0), invalid_config_error);

  bandit_instance fixed =
      generate_instance(21, 4, 8, feature_convention::raw_pm1, false);
  CHECK((fixed.space.at(3) - fixed.space.base()).norm() == 0.0);
}

TEST_CASE("best_arm maximizes and breaks ties low") {
  Eigen::MatrixXd arms(4, 2);
  arms << 1, 1, 1, -1, 1, 1, -1, -1;  // rows 0 and 2 tie
  param_vector theta(2);
  theta << 1.0, 0.5;
  CHECK(best_arm(theta, arms) == 0);
  theta << -1.0, -0.5;
  CHECK(best_arm(theta, arms) == 3);

  param_vector bad(3);
  bad << 1, 2, 3;
  CHECK_THROWS_AS(best_arm(bad, arms), dimension_error);
}

TEST_CASE("sample_preference follows the Bradley-Terry frequency") {
  // identical arms: exactly a fair coin
  bandit_instance inst = generate_instance(2, 5, 8,
                                           feature_convention::raw_pm1);
  rng_stream rng(derive_seed(2, 0, stream_tag::preference));
  int wins = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i)
    if (sample_preference(rng, inst, 3, 3) == 1) ++wins;
  CHECK(std::abs(wins / double(n) - 0.5) < 0.01);

  // reward gap ln 3: probability 3/4
  Eigen::MatrixXd arms(2, 1);
  arms << std::log(3.0), 0.0;
  param_vector theta(1);
  theta << 1.0;
  rng_stream rng2(99);
  wins = 0;
  for (int i = 0; i < n; ++i)
    if (sample_preference(rng2, theta, arms, 0, 1) == 1) ++wins;
  CHECK(std::abs(wins / double(n) - 0.75) < 0.01);
}

TEST_CASE("per_round_regret is the average-reward shortfall") {
  Eigen::MatrixXd arms(3, 2);
  arms << 1, 1, 1, -1, -1, -1;
  param_vector theta(2);
  theta << 0.6, 0.8;  // rewards: 1.4, -0.2, -1.4
  CHECK(per_round_regret(theta, arms, 0, 0) == doctest::Approx(0.0));
  CHECK(per_round_regret(theta, arms, 1, 2) ==
        doctest::Approx(1.4 - (-0.2 - 1.4) / 2.0).epsilon(1e-12));
  CHECK(per_round_regret(theta, arms, 0, 1) ==
        doctest::Approx(0.8).epsilon(1e-12));
  CHECK_THROWS_AS(per_round_regret(theta, arms, 0, 5), invalid_config_error);

  rng_stream rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    bandit_instance inst =
        generate_instance(1000 + trial, 4, 8, feature_convention::raw_pm1);
    int a1 = int(rng.below(8)), a2 = int(rng.below(8));
    CHECK(per_round_regret(inst, a1, a2) >= 0.0);
  }
}

TEST_CASE("regret decomposition identity holds to roundoff") {
  rng_stream rng(271828);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    bandit_instance inst =
        generate_instance(500 + trial, 5, 16, feature_convention::raw_pm1);
    param_vector t1(5), t2(5);
    for (int i = 0; i < 5; ++i) {
      t1[i] = 3.0 * rng.normal();
      t2[i] = 3.0 * rng.normal();
    }
    worst = std::max(worst, regret_decomposition_residual(inst, t1, t2));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("regret_trace accumulates and rejects negatives") {
  regret_trace tr;
  tr.append(0.5);
  tr.append(0.0);
  tr.append(1.25);
  CHECK(tr.rounds() == 3);
  CHECK(tr.cumulative[0] == doctest::Approx(0.5));
  CHECK(tr.cumulative[1] == doctest::Approx(0.5));
  CHECK(tr.final_cumulative() == doctest::Approx(1.75));
  for (std::size_t i = 1; i < tr.cumulative.size(); ++i)
    CHECK(tr.cumulative[i] >= tr.cumulative[i - 1]);
  CHECK_THROWS_AS(tr.append(-1e-9), error);
  CHECK_THROWS_AS(tr.append(std::nan("")), error);
  CHECK(tr.rounds() == 3);
}
